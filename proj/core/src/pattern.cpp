#include "oraclelog/pattern.hpp"

namespace oraclelog {

Pattern Pattern::parse(std::string_view text) {
    std::vector<bool> slots;
    slots.reserve(text.size());
    for (char c : text) {
        if (c == 'i')
            slots.push_back(true);
        else if (c == 'O')
            slots.push_back(false);
        else
            throw std::invalid_argument("pattern may contain only 'i' and 'O', got '" +
                                        std::string(text) + "'");
    }
    return Pattern(std::move(slots));
}

Pattern Pattern::base(std::size_t arity) {
    return Pattern(std::vector<bool>(arity, true));
}

bool Pattern::is_base() const {
    for (bool in : input_)
        if (!in)
            return false;
    return true;
}

std::size_t Pattern::input_count() const {
    std::size_t n = 0;
    for (bool in : input_)
        if (in)
            ++n;
    return n;
}

std::string Pattern::to_string() const {
    std::string out;
    out.reserve(input_.size());
    for (bool in : input_)
        out += in ? 'i' : 'O';
    return out;
}

Pattern pattern_of_terms(std::span<const Term> terms) {
    std::vector<bool> slots;
    slots.reserve(terms.size());
    for (const Term& t : terms)
        slots.push_back(t.is_constant());
    return Pattern(std::move(slots));
}

} // namespace oraclelog
