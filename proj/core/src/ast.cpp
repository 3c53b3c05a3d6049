#include "oraclelog/ast.hpp"

#include <algorithm>

namespace oraclelog {

std::vector<std::string> rule_variables(const Rule& rule) {
    std::vector<std::string> names;
    auto collect = [&](const Atom& atom) {
        for (const Term& t : atom.args)
            if (t.is_variable() && std::find(names.begin(), names.end(), t.text()) == names.end())
                names.push_back(t.text());
    };
    if (rule.head)
        collect(*rule.head);
    for (const Literal& lit : rule.body)
        collect(lit.atom);
    return names;
}

std::string render(const Atom& atom) {
    std::string out;
    if (atom.external)
        out += '#';
    if (!atom.package.empty())
        out += atom.package + ".";
    out += atom.predicate;
    if (!atom.args.empty()) {
        out += '(';
        for (std::size_t i = 0; i < atom.args.size(); ++i) {
            if (i > 0)
                out += ',';
            out += render(atom.args[i]);
        }
        out += ')';
    }
    return out;
}

std::string render(const Literal& literal) {
    return literal.negated ? "not " + render(literal.atom) : render(literal.atom);
}

std::string render(const Rule& rule) {
    std::string out;
    if (rule.head)
        out += render(*rule.head);
    if (!rule.body.empty() || !rule.head) {
        out += rule.head ? " :- " : ":- ";
        for (std::size_t i = 0; i < rule.body.size(); ++i) {
            if (i > 0)
                out += ", ";
            out += render(rule.body[i]);
        }
    }
    out += '.';
    return out;
}

std::string render(const ImportDirective& directive) {
    std::string out = "#import " + directive.dotted();
    if (directive.wildcard)
        out += ".*";
    return out;
}

std::string render(const Program& program) {
    std::string out;
    for (const ImportDirective& directive : program.imports)
        out += render(directive) + "\n";
    for (const Rule& rule : program.rules)
        out += render(rule) + "\n";
    return out;
}

} // namespace oraclelog
