#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace oraclelog::detail {

// Tarjan's strongly connected components over an adjacency list.
// Components come out in reverse topological order.
inline std::vector<std::vector<std::size_t>>
strongly_connected_components(const std::vector<std::vector<std::size_t>>& successors) {
    const std::size_t n = successors.size();
    std::vector<int> index(n, -1), lowlink(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> components;
    int next_index = 0;

    // Explicit DFS stack; node graphs can be long chains.
    struct Frame {
        std::size_t node;
        std::size_t edge = 0;
    };
    std::vector<Frame> frames;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != -1)
            continue;
        frames.push_back({root});
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            Frame& frame = frames.back();
            std::size_t v = frame.node;
            if (frame.edge < successors[v].size()) {
                std::size_t w = successors[v][frame.edge++];
                if (index[w] == -1) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w});
                } else if (on_stack[w]) {
                    lowlink[v] = std::min(lowlink[v], index[w]);
                }
            } else {
                frames.pop_back();
                if (!frames.empty())
                    lowlink[frames.back().node] =
                        std::min(lowlink[frames.back().node], lowlink[v]);
                if (lowlink[v] == index[v]) {
                    std::vector<std::size_t> component;
                    while (true) {
                        std::size_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        component.push_back(w);
                        if (w == v)
                            break;
                    }
                    components.push_back(std::move(component));
                }
            }
        }
    }
    return components;
}

} // namespace oraclelog::detail
