#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "oraclelog/ast.hpp"
#include "oraclelog/diagnostics.hpp"

namespace oraclelog {

class ParseError : public std::runtime_error {
public:
    enum class Kind {
        Syntax,
        ExternalInHead,
        ClassicallyNegatedExternal,
        ImportAfterRule,
        ArityMismatch,
    };

    ParseError(Kind kind, std::string message, int line, int column)
        : std::runtime_error(std::move(message)), kind_(kind), line_(line), column_(column) {}

    Kind kind() const { return kind_; }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    Kind kind_;
    int line_;
    int column_;
};

// Parses a complete source unit. All syntax restrictions are enforced here:
// external atoms in bodies and constraints only, no classical negation,
// imports before any rule, one arity per (predicate, namespace) pair.
// `%` starts a comment running to end of line. Anonymous variables `_`
// expand to fresh variables not occurring elsewhere in the same rule.
// Non-fatal notes (e.g. the deprecated `#include` alias for `#import`) are
// appended to `warnings` when a sink is given.
Program parse_program(std::string_view text, Warnings* warnings = nullptr);

// Single rule, fact, or constraint terminated by `.`.
Rule parse_rule(std::string_view text);

} // namespace oraclelog
