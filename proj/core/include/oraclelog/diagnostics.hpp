#pragma once

#include <string>
#include <vector>

namespace oraclelog {

// One diagnostic line: `<file>:<line>: <severity>: <message>`. File or line
// may be absent (package-level diagnostics name the package path instead).
struct Warning {
    enum class Kind {
        DeprecatedDirective,
        PredicateShadowed,
        UnsafeRecursionAllowed,
        LimitNearlyReached,
        Generic,
    };

    Kind kind = Kind::Generic;
    std::string message;
    std::string file;
    int line = 0;

    std::string to_string() const {
        std::string out;
        if (!file.empty()) {
            out += file;
            if (line > 0)
                out += ":" + std::to_string(line);
            out += ": ";
        } else if (line > 0) {
            out += "line " + std::to_string(line) + ": ";
        }
        out += "warning: " + message;
        return out;
    }
};

using Warnings = std::vector<Warning>;

} // namespace oraclelog
