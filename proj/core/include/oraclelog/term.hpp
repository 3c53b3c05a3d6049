#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace oraclelog {

// A term is either a constant (integer, quoted string, or lowercase symbol)
// or a variable (uppercase or underscore start). Constants of different
// kinds never compare equal: integer 1, symbol `one`, string "1" are three
// distinct values.
class Term {
public:
    enum class Kind { Integer, String, Symbol, Variable };

    Term() : kind_(Kind::Integer), int_(0) {}

    static Term integer(std::int64_t value) {
        Term t;
        t.kind_ = Kind::Integer;
        t.int_ = value;
        return t;
    }
    static Term string(std::string value) {
        Term t;
        t.kind_ = Kind::String;
        t.text_ = std::move(value);
        return t;
    }
    static Term symbol(std::string name) {
        Term t;
        t.kind_ = Kind::Symbol;
        t.text_ = std::move(name);
        return t;
    }
    static Term variable(std::string name) {
        Term t;
        t.kind_ = Kind::Variable;
        t.text_ = std::move(name);
        return t;
    }

    Kind kind() const { return kind_; }
    bool is_variable() const { return kind_ == Kind::Variable; }
    bool is_constant() const { return kind_ != Kind::Variable; }
    bool is_integer() const { return kind_ == Kind::Integer; }
    bool is_string() const { return kind_ == Kind::String; }
    bool is_symbol() const { return kind_ == Kind::Symbol; }

    // Valid only for integer terms.
    std::int64_t int_value() const { return int_; }
    // Name for symbols and variables, content for strings.
    const std::string& text() const { return text_; }

    bool operator==(const Term& other) const {
        if (kind_ != other.kind_)
            return false;
        return kind_ == Kind::Integer ? int_ == other.int_ : text_ == other.text_;
    }
    bool operator!=(const Term& other) const { return !(*this == other); }

    // Total order: kind rank first, then value. Gives ground atoms a stable
    // sort for model output.
    bool operator<(const Term& other) const {
        if (kind_ != other.kind_)
            return static_cast<int>(kind_) < static_cast<int>(other.kind_);
        return kind_ == Kind::Integer ? int_ < other.int_ : text_ < other.text_;
    }

    std::size_t hash() const {
        std::size_t h = std::hash<int>{}(static_cast<int>(kind_));
        std::size_t v = kind_ == Kind::Integer ? std::hash<std::int64_t>{}(int_)
                                               : std::hash<std::string>{}(text_);
        return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    }

private:
    Kind kind_;
    std::int64_t int_ = 0;
    std::string text_;
};

// Identifier well-formedness as the parser enforces it.
bool is_variable_name(std::string_view name);
bool is_symbol_name(std::string_view name);

// Concrete syntax of a single term; strings are quoted and escaped.
std::string render(const Term& term);

} // namespace oraclelog

template <>
struct std::hash<oraclelog::Term> {
    std::size_t operator()(const oraclelog::Term& t) const { return t.hash(); }
};
