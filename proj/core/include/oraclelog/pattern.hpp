#pragma once

#include <cstddef>
#include <functional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "oraclelog/term.hpp"

namespace oraclelog {

// Positional input/output mask over an external predicate's arguments.
// Surface syntax is a string over `i` (input) and `O` (output); the all-input
// pattern is the "base" pattern and doubles as the boolean membership test.
class Pattern {
public:
    Pattern() = default;
    explicit Pattern(std::vector<bool> input_slots) : input_(std::move(input_slots)) {}

    // Parses "iO"-style strings; throws std::invalid_argument on other chars.
    static Pattern parse(std::string_view text);
    // All-input pattern of the given length.
    static Pattern base(std::size_t arity);

    std::size_t size() const { return input_.size(); }
    bool is_input(std::size_t position) const { return input_[position]; }
    bool is_output(std::size_t position) const { return !input_[position]; }
    bool is_base() const;
    std::size_t input_count() const;
    std::size_t output_count() const { return size() - input_count(); }

    std::string to_string() const;

    bool operator==(const Pattern& other) const { return input_ == other.input_; }
    bool operator!=(const Pattern& other) const { return !(*this == other); }
    // Pattern-string order; used as the deterministic tie-break when several
    // oracles with equally many outputs are admissible.
    bool operator<(const Pattern& other) const { return to_string() < other.to_string(); }

private:
    std::vector<bool> input_;
};

// Pattern of a term list: constants become inputs, variables outputs.
Pattern pattern_of_terms(std::span<const Term> terms);

struct OracleSignature {
    std::string predicate;
    std::size_t arity = 0;
    Pattern pattern;
};

// A tuple of constants, one per output slot of some pattern (or one per slot
// for full ground tuples).
using ConstantTuple = std::vector<Term>;
using AnswerSet = std::set<ConstantTuple>;

// Thrown by oracle evaluation functions for genuine failures: wrong constant
// kind, arithmetic overflow. An empty answer set is not an error, it simply
// means no tuple satisfies the call.
class OracleError : public std::runtime_error {
public:
    explicit OracleError(std::string message) : std::runtime_error(std::move(message)) {}
};

// Externally supplied evaluation function for one pattern. Receives one
// constant per input slot and yields every consistent assignment of the
// output slots. Must be deterministic within a process run and consistent
// with the predicate's base oracle.
struct Oracle {
    OracleSignature signature;
    std::function<AnswerSet(const ConstantTuple& inputs)> evaluate;

    std::size_t output_count() const { return signature.pattern.output_count(); }
    bool is_base() const { return signature.pattern.is_base(); }
};

} // namespace oraclelog
