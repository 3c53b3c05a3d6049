#include "oraclelog/term.hpp"

namespace oraclelog {

namespace {

bool is_ident_tail(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_';
}

} // namespace

bool is_variable_name(std::string_view name) {
    if (name.empty())
        return false;
    char first = name.front();
    if (!((first >= 'A' && first <= 'Z') || first == '_'))
        return false;
    for (char c : name.substr(1))
        if (!is_ident_tail(c))
            return false;
    return true;
}

bool is_symbol_name(std::string_view name) {
    if (name.empty())
        return false;
    char first = name.front();
    if (!(first >= 'a' && first <= 'z'))
        return false;
    for (char c : name.substr(1))
        if (!is_ident_tail(c))
            return false;
    return true;
}

std::string render(const Term& term) {
    switch (term.kind()) {
    case Term::Kind::Integer:
        return std::to_string(term.int_value());
    case Term::Kind::String: {
        std::string out = "\"";
        for (char c : term.text()) {
            switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
            }
        }
        out += '"';
        return out;
    }
    case Term::Kind::Symbol:
    case Term::Kind::Variable:
        return term.text();
    }
    return {};
}

} // namespace oraclelog
