#include "oraclelog/safety.hpp"

#include <algorithm>

#include "scc.hpp"

namespace oraclelog {

namespace {

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (const std::string& name : names) {
        if (!out.empty())
            out += ", ";
        out += name;
    }
    return out;
}

std::vector<std::string> atom_variables(const Atom& atom) {
    std::vector<std::string> out;
    for (const Term& t : atom.args)
        if (t.is_variable() && std::find(out.begin(), out.end(), t.text()) == out.end())
            out.push_back(t.text());
    return out;
}

} // namespace

RuleDependencyGraph build_dependency_graph(const Program& program) {
    RuleDependencyGraph graph;
    graph.node_count = program.rules.size();
    graph.successors.assign(graph.node_count, {});
    for (std::size_t from = 0; from < program.rules.size(); ++from) {
        const Rule& definer = program.rules[from];
        if (!definer.head)
            continue;
        const std::string& defined = definer.head->predicate;
        for (std::size_t to = 0; to < program.rules.size(); ++to) {
            for (const Literal& literal : program.rules[to].body) {
                if (!literal.atom.external && literal.atom.predicate == defined) {
                    graph.successors[from].push_back(to);
                    break;
                }
            }
        }
    }
    graph.on_cycle.assign(graph.node_count, false);
    auto components = detail::strongly_connected_components(graph.successors);
    for (const auto& component : components) {
        if (component.size() > 1) {
            for (std::size_t node : component)
                graph.on_cycle[node] = true;
        } else {
            std::size_t node = component.front();
            for (std::size_t succ : graph.successors[node])
                if (succ == node)
                    graph.on_cycle[node] = true;
        }
    }
    return graph;
}

bool requires_strong_safety(std::size_t rule_index, const RuleDependencyGraph& graph) {
    return rule_index < graph.on_cycle.size() && graph.on_cycle[rule_index];
}

std::set<std::string> usually_safe_variables(const Rule& rule) {
    std::set<std::string> safe;
    for (const Literal& literal : rule.body) {
        if (literal.negated || literal.atom.external)
            continue;
        for (const Term& t : literal.atom.args)
            if (t.is_variable())
                safe.insert(t.text());
    }
    return safe;
}

bool check_usual_safety(const Rule& rule) {
    std::set<std::string> safe = usually_safe_variables(rule);
    for (const std::string& name : rule_variables(rule))
        if (!safe.count(name))
            return false;
    return true;
}

namespace {

struct Admissible {
    std::size_t oracle_index;
    const Oracle* oracle;
};

// Oracles whose input-slot variables are all bound. Constants satisfy any
// slot.
std::vector<Admissible> admissible_oracles(const ExternalPredicate& predicate,
                                           const std::vector<Term>& args,
                                           const std::set<std::string>& bound) {
    std::vector<Admissible> out;
    for (std::size_t i = 0; i < predicate.oracles().size(); ++i) {
        const Oracle& oracle = predicate.oracles()[i];
        const Pattern& pattern = oracle.signature.pattern;
        bool ok = true;
        for (std::size_t pos = 0; pos < args.size() && ok; ++pos)
            if (pattern.is_input(pos) && args[pos].is_variable() && !bound.count(args[pos].text()))
                ok = false;
        if (ok)
            out.push_back({i, &oracle});
    }
    return out;
}

const Admissible* best_oracle(const std::vector<Admissible>& candidates) {
    const Admissible* best = nullptr;
    for (const Admissible& candidate : candidates) {
        if (!best) {
            best = &candidate;
            continue;
        }
        std::size_t a = candidate.oracle->output_count();
        std::size_t b = best->oracle->output_count();
        if (a < b || (a == b && candidate.oracle->signature.pattern.to_string() <
                                    best->oracle->signature.pattern.to_string()))
            best = &candidate;
    }
    return best;
}

} // namespace

CompletedRule complete_rule(const Rule& rule, const ActiveBindings& bindings,
                            bool strong_required) {
    CompletedRule completed;
    completed.source = rule;
    completed.recursive = strong_required;
    completed.oracle_choice.assign(rule.body.size(), std::nullopt);

    // Resolve every external occurrence up front.
    std::vector<ExternalPredicateRef> resolved(rule.body.size());
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
        const Atom& atom = rule.body[i].atom;
        if (!atom.external)
            continue;
        const ActiveBindings::Binding* binding = bindings.resolve(atom);
        if (!binding)
            throw SafetyError(SafetyError::Kind::UnknownExternalPredicate,
                              "unknown external predicate '#" + atom.qualified_name() + "'");
        if (binding->predicate->arity() != atom.arity())
            throw SafetyError(SafetyError::Kind::UnknownExternalPredicate,
                              "'#" + atom.qualified_name() + "' used with arity " +
                                  std::to_string(atom.arity()) + " but registered with arity " +
                                  std::to_string(binding->predicate->arity()));
        resolved[i] = binding->predicate;
    }

    std::set<std::string> bound;
    std::vector<bool> placed(rule.body.size(), false);
    std::size_t remaining = rule.body.size();

    auto bind_atom_variables = [&](const Atom& atom) {
        for (const Term& t : atom.args)
            if (t.is_variable())
                bound.insert(t.text());
    };
    auto all_bound = [&](const Atom& atom) {
        for (const Term& t : atom.args)
            if (t.is_variable() && !bound.count(t.text()))
                return false;
        return true;
    };

    while (remaining > 0) {
        bool progressed = false;

        // Positive external atoms go first, as soon as one is admissible.
        for (std::size_t i = 0; i < rule.body.size() && !progressed; ++i) {
            if (placed[i] || rule.body[i].negated || !rule.body[i].atom.external)
                continue;
            auto candidates = admissible_oracles(*resolved[i], rule.body[i].atom.args, bound);
            if (candidates.empty())
                continue;
            const Admissible* chosen = best_oracle(candidates);
            completed.oracle_choice[i] = OracleChoice{resolved[i], chosen->oracle_index};
            completed.body_order.push_back(i);
            placed[i] = true;
            --remaining;
            // Output positions now bind their variables; inputs were bound.
            bind_atom_variables(rule.body[i].atom);
            progressed = true;
        }
        if (progressed)
            continue;

        // Then negated literals whose variables are all bound. Negated
        // external atoms always check the base oracle.
        for (std::size_t i = 0; i < rule.body.size() && !progressed; ++i) {
            if (placed[i] || !rule.body[i].negated)
                continue;
            if (!all_bound(rule.body[i].atom))
                continue;
            if (rule.body[i].atom.external) {
                const ExternalPredicate& predicate = *resolved[i];
                std::size_t base_index = 0;
                for (std::size_t j = 0; j < predicate.oracles().size(); ++j)
                    if (predicate.oracles()[j].is_base())
                        base_index = j;
                completed.oracle_choice[i] = OracleChoice{resolved[i], base_index};
            }
            completed.body_order.push_back(i);
            placed[i] = true;
            --remaining;
            progressed = true;
        }
        if (progressed)
            continue;

        // Then the textually first positive ordinary literal.
        for (std::size_t i = 0; i < rule.body.size() && !progressed; ++i) {
            if (placed[i] || rule.body[i].negated || rule.body[i].atom.external)
                continue;
            completed.body_order.push_back(i);
            placed[i] = true;
            --remaining;
            bind_atom_variables(rule.body[i].atom);
            progressed = true;
        }
        if (progressed)
            continue;

        // Stuck: the remaining literals can never be placed.
        std::vector<std::string> offending;
        for (std::size_t i = 0; i < rule.body.size(); ++i) {
            if (placed[i])
                continue;
            for (const std::string& name : atom_variables(rule.body[i].atom))
                if (!bound.count(name) &&
                    std::find(offending.begin(), offending.end(), name) == offending.end())
                    offending.push_back(name);
        }
        throw SafetyError(SafetyError::Kind::WeaklyUnsafe,
                          "weakly unsafe: no admissible order binds " +
                              join_names(offending),
                          offending);
    }

    // Head variables must be bound by the body.
    if (rule.head) {
        std::vector<std::string> unbound;
        for (const std::string& name : atom_variables(*rule.head))
            if (!bound.count(name))
                unbound.push_back(name);
        if (!unbound.empty())
            throw SafetyError(SafetyError::Kind::WeaklyUnsafe,
                              "weakly unsafe: head variables " + join_names(unbound) +
                                  " do not occur in the body",
                              unbound);
    }

    if (strong_required && rule.head) {
        std::set<std::string> usual = usually_safe_variables(rule);
        std::vector<std::string> offending;
        for (const std::string& name : atom_variables(*rule.head))
            if (!usual.count(name))
                offending.push_back(name);
        if (!offending.empty())
            throw SafetyError(SafetyError::Kind::StronglyUnsafe,
                              "strongly unsafe: recursive rule invents values for head "
                              "variables " +
                                  join_names(offending),
                              offending);
    }

    return completed;
}

std::string to_string(SafetyVerdict verdict) {
    switch (verdict) {
    case SafetyVerdict::UsuallySafe: return "UsuallySafe";
    case SafetyVerdict::WeaklySafe: return "WeaklySafe";
    case SafetyVerdict::StronglySafe: return "StronglySafe";
    case SafetyVerdict::Unsafe: return "Unsafe";
    }
    return "Unsafe";
}

bool SafetyReport::all_safe() const {
    for (const Entry& entry : entries)
        if (entry.verdict == SafetyVerdict::Unsafe)
            return false;
    return true;
}

std::string SafetyReport::to_string() const {
    std::string out;
    for (const Entry& entry : entries) {
        out += "rule " + std::to_string(entry.rule_index + 1) + ": " +
               oraclelog::to_string(entry.verdict);
        if (entry.recursive)
            out += " [recursive]";
        if (!entry.reason.empty()) {
            out += " (" + entry.reason;
            if (!entry.variables.empty())
                out += "; offending variables: " + join_names(entry.variables);
            out += ")";
        }
        out += "\n";
    }
    return out;
}

AnalysisResult analyze_program(const Program& program, const ActiveBindings& bindings,
                               const AnalyzeOptions& options) {
    AnalysisResult result;
    RuleDependencyGraph graph = build_dependency_graph(program);

    bool any_unsafe = false;
    std::string first_error;
    SafetyError::Kind first_kind = SafetyError::Kind::WeaklyUnsafe;

    for (std::size_t i = 0; i < program.rules.size(); ++i) {
        const Rule& rule = program.rules[i];
        bool recursive = requires_strong_safety(i, graph);
        SafetyReport::Entry entry;
        entry.rule_index = i;
        entry.recursive = recursive;
        entry.line = rule.line;
        try {
            CompletedRule completed = complete_rule(rule, bindings, recursive);
            completed.rule_index = i;
            entry.verdict = recursive ? SafetyVerdict::StronglySafe
                            : check_usual_safety(rule) ? SafetyVerdict::UsuallySafe
                                                       : SafetyVerdict::WeaklySafe;
            result.rules.push_back(std::move(completed));
        } catch (const SafetyError& error) {
            if (error.kind() == SafetyError::Kind::StronglyUnsafe &&
                options.allow_unsafe_recursion) {
                CompletedRule completed = complete_rule(rule, bindings, false);
                completed.rule_index = i;
                completed.recursive = true;
                entry.verdict = SafetyVerdict::WeaklySafe;
                result.warnings.push_back(
                    {Warning::Kind::UnsafeRecursionAllowed,
                     std::string("rule accepted despite strong-safety violation: ") +
                         error.what(),
                     "", rule.line});
                result.rules.push_back(std::move(completed));
            } else {
                entry.verdict = SafetyVerdict::Unsafe;
                entry.reason = error.what();
                entry.variables = error.variables();
                if (!any_unsafe) {
                    first_error = error.what();
                    first_kind = error.kind();
                    any_unsafe = true;
                }
            }
        }
        result.report.entries.push_back(std::move(entry));
    }

    if (any_unsafe)
        throw SafetyError(first_kind, first_error, {}, result.report);
    return result;
}

} // namespace oraclelog
