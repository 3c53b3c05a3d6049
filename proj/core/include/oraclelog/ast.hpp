#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oraclelog/term.hpp"

namespace oraclelog {

// An atom is an applied predicate. External atoms are written `#name(...)`
// and may carry a dotted package qualifier (`#pkg.path.name(...)`); ordinary
// atoms never do. `p` and `#p` live in separate namespaces.
struct Atom {
    std::string predicate;
    std::string package; // empty unless external and explicitly qualified
    bool external = false;
    std::vector<Term> args;

    std::size_t arity() const { return args.size(); }
    bool ground() const {
        for (const Term& t : args)
            if (t.is_variable())
                return false;
        return true;
    }
    // `pkg.path.name` for qualified atoms, plain name otherwise.
    std::string qualified_name() const {
        return package.empty() ? predicate : package + "." + predicate;
    }

    bool operator==(const Atom& other) const {
        return predicate == other.predicate && package == other.package &&
               external == other.external && args == other.args;
    }
    bool operator!=(const Atom& other) const { return !(*this == other); }
};

struct Literal {
    Atom atom;
    bool negated = false; // default negation (`not ...`)

    bool operator==(const Literal& other) const {
        return negated == other.negated && atom == other.atom;
    }
    bool operator!=(const Literal& other) const { return !(*this == other); }
};

// A rule without a head is an integrity constraint. A fact is a rule with a
// ground head and an empty body. Heads are always ordinary atoms.
struct Rule {
    std::optional<Atom> head;
    std::vector<Literal> body;
    int line = 0; // source line, 0 for synthesized rules

    bool is_constraint() const { return !head.has_value(); }
    bool is_fact() const { return head.has_value() && body.empty(); }

    // Structural equality; source locations are not part of rule identity.
    bool operator==(const Rule& other) const {
        return head == other.head && body == other.body;
    }
    bool operator!=(const Rule& other) const { return !(*this == other); }
};

struct ImportDirective {
    std::vector<std::string> path; // dotted segments, non-empty
    bool wildcard = false;         // trailing `.*`
    int line = 0;

    std::string dotted() const {
        std::string out;
        for (const std::string& seg : path) {
            if (!out.empty())
                out += '.';
            out += seg;
        }
        return out;
    }

    bool operator==(const ImportDirective& other) const {
        return path == other.path && wildcard == other.wildcard;
    }
    bool operator!=(const ImportDirective& other) const { return !(*this == other); }
};

struct Program {
    std::vector<ImportDirective> imports;
    std::vector<Rule> rules;

    bool operator==(const Program& other) const {
        return imports == other.imports && rules == other.rules;
    }
    bool operator!=(const Program& other) const { return !(*this == other); }
};

// Distinct variable names of a rule (head and body), first occurrence order.
std::vector<std::string> rule_variables(const Rule& rule);

std::string render(const Atom& atom);
std::string render(const Literal& literal);
std::string render(const Rule& rule);
std::string render(const ImportDirective& directive);
std::string render(const Program& program);

} // namespace oraclelog
