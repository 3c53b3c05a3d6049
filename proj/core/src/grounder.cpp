#include "oraclelog/grounder.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

#include "scc.hpp"

namespace oraclelog {

ConstantId ConstantRegistry::intern(const Term& constant) {
    assert(constant.is_constant());
    auto it = ids_.find(constant);
    if (it != ids_.end())
        return it->second;
    ConstantId id = static_cast<ConstantId>(terms_.size());
    terms_.push_back(constant);
    ids_.emplace(constant, id);
    return id;
}

std::optional<ConstantId> ConstantRegistry::find(const Term& constant) const {
    auto it = ids_.find(constant);
    if (it == ids_.end())
        return std::nullopt;
    return it->second;
}

bool Interpretation::insert(const std::string& predicate, const GroundTuple& tuple) {
    Relation& relation = relations_[predicate];
    if (relation.index.count(tuple))
        return false;
    relation.index.insert(tuple);
    relation.rows.push_back(tuple);
    return true;
}

bool Interpretation::contains(const std::string& predicate, const GroundTuple& tuple) const {
    auto it = relations_.find(predicate);
    return it != relations_.end() && it->second.index.count(tuple) > 0;
}

const std::vector<GroundTuple>& Interpretation::rows(const std::string& predicate) const {
    static const std::vector<GroundTuple> empty;
    auto it = relations_.find(predicate);
    return it == relations_.end() ? empty : it->second.rows;
}

std::size_t Interpretation::row_count(const std::string& predicate) const {
    return rows(predicate).size();
}

std::size_t Interpretation::atom_count() const {
    std::size_t total = 0;
    for (const auto& [name, relation] : relations_)
        total += relation.rows.size();
    return total;
}

std::vector<std::string> Interpretation::predicates() const {
    std::vector<std::string> out;
    out.reserve(relations_.size());
    for (const auto& [name, relation] : relations_)
        out.push_back(name);
    return out;
}

std::string render(const GroundAtom& atom) {
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

std::string render(const GroundRule& rule) {
    std::string out;
    if (rule.head)
        out += render(*rule.head);
    if (!rule.body.empty() || !rule.head) {
        out += rule.head ? " :- " : ":- ";
        for (std::size_t i = 0; i < rule.body.size(); ++i) {
            if (i > 0)
                out += ", ";
            if (rule.body[i].negated)
                out += "not ";
            out += render(rule.body[i].atom);
        }
    }
    out += '.';
    return out;
}

Stratification stratify(const Program& program) {
    // Ordinary predicates only; externals have no defining rules and belong
    // to no stratum.
    std::vector<std::string> predicates;
    std::map<std::string, std::size_t> node_of;
    auto node = [&](const std::string& name) {
        auto it = node_of.find(name);
        if (it != node_of.end())
            return it->second;
        std::size_t id = predicates.size();
        predicates.push_back(name);
        node_of.emplace(name, id);
        return id;
    };
    for (const Rule& rule : program.rules) {
        if (rule.head)
            node(rule.head->predicate);
        for (const Literal& literal : rule.body)
            if (!literal.atom.external)
                node(literal.atom.predicate);
    }

    struct Edge {
        std::size_t from; // body predicate
        std::size_t to;   // head predicate
        bool negative;
    };
    std::vector<Edge> edges;
    std::vector<std::vector<std::size_t>> successors(predicates.size());
    for (const Rule& rule : program.rules) {
        if (!rule.head)
            continue;
        std::size_t head = node_of.at(rule.head->predicate);
        for (const Literal& literal : rule.body) {
            if (literal.atom.external)
                continue;
            std::size_t body = node_of.at(literal.atom.predicate);
            edges.push_back({body, head, literal.negated});
            successors[body].push_back(head);
        }
    }

    // A negative edge inside a strongly connected component means negation
    // through recursion.
    auto components = detail::strongly_connected_components(successors);
    std::vector<std::size_t> component_of(predicates.size(), 0);
    for (std::size_t c = 0; c < components.size(); ++c)
        for (std::size_t member : components[c])
            component_of[member] = c;
    for (const Edge& edge : edges) {
        if (edge.negative && component_of[edge.from] == component_of[edge.to]) {
            std::vector<std::string> cycle;
            for (std::size_t member : components[component_of[edge.from]])
                cycle.push_back(predicates[member]);
            std::sort(cycle.begin(), cycle.end());
            std::string names;
            for (const std::string& name : cycle)
                names += (names.empty() ? "" : ", ") + name;
            throw NotStratifiableError(
                "program is not stratifiable: negation through recursion over {" + names + "}",
                cycle);
        }
    }

    // Level assignment: positive edges keep the head at or above the body,
    // negative edges strictly above. Converges because negative cycles were
    // excluded.
    std::vector<std::size_t> level(predicates.size(), 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Edge& edge : edges) {
            std::size_t need = level[edge.from] + (edge.negative ? 1 : 0);
            if (level[edge.to] < need) {
                level[edge.to] = need;
                changed = true;
            }
        }
    }

    Stratification out;
    std::size_t max_level = 0;
    for (std::size_t l : level)
        max_level = std::max(max_level, l);
    out.strata.assign(max_level + 1, {});
    for (std::size_t i = 0; i < predicates.size(); ++i) {
        out.strata[level[i]].push_back(predicates[i]);
        out.level_of.emplace(predicates[i], level[i]);
    }
    for (auto& stratum : out.strata)
        std::sort(stratum.begin(), stratum.end());
    return out;
}

namespace {

constexpr ConstantId kUnbound = std::numeric_limits<ConstantId>::max();

// Row visibility during a fixpoint round: rows at or past the snapshot are
// invisible, so a round works on the interpretation as it stood when the
// round began.
using RowLimits = std::map<std::string, std::size_t>;

struct CompiledArg {
    int var_slot = -1; // -1: constant
    ConstantId constant = kUnbound;
    Term term; // constant term or variable (for diagnostics)
};

struct CompiledLiteral {
    const Literal* literal = nullptr;
    const OracleChoice* choice = nullptr;
    // Fast path for repeated identical calls; disabled while the cache
    // traces requests so the trace stays complete.
    const ExternalPredicateCache::AnswerMap* memo = nullptr;
    std::vector<CompiledArg> args;
};

class RuleRunner {
public:
    RuleRunner(const CompletedRule& rule, const Interpretation& interp,
               ConstantRegistry& constants)
        : rule_(rule), interp_(interp), constants_(constants) {
        var_names_ = rule_variables(rule.source);
        bindings_.assign(var_names_.size(), kUnbound);
        auto slot_of = [&](const std::string& name) {
            return static_cast<int>(std::find(var_names_.begin(), var_names_.end(), name) -
                                    var_names_.begin());
        };
        auto compile_atom = [&](const Atom& atom) {
            std::vector<CompiledArg> out;
            out.reserve(atom.args.size());
            for (const Term& term : atom.args) {
                CompiledArg arg;
                arg.term = term;
                if (term.is_variable())
                    arg.var_slot = slot_of(term.text());
                else
                    arg.constant = constants_.intern(term);
                out.push_back(std::move(arg));
            }
            return out;
        };
        if (rule.source.head)
            head_args_ = compile_atom(*rule.source.head);
        literals_.reserve(rule.source.body.size());
        for (std::size_t i = 0; i < rule.source.body.size(); ++i) {
            CompiledLiteral cl;
            cl.literal = &rule.source.body[i];
            if (rule.oracle_choice[i]) {
                cl.choice = &*rule.oracle_choice[i];
                ExternalPredicate& predicate = *cl.choice->predicate;
                if (!predicate.cache().tracing())
                    cl.memo = &predicate.memo_map(cl.choice->oracle());
            }
            cl.args = compile_atom(rule.source.body[i].atom);
            literals_.push_back(std::move(cl));
        }
    }

    // Runs the join; `on_match` fires once per satisfied full binding.
    template <typename OnMatch>
    void run(const RowLimits* limits, OnMatch&& on_match) {
        limits_ = limits;
        walk(0, on_match);
    }

    GroundAtom ground_head() const {
        assert(rule_.source.head);
        return materialize_atom(*rule_.source.head, head_args_);
    }

    // Interned head tuple of the current binding, built into a reused
    // buffer. Valid until the next match.
    const GroundTuple& ground_head_ids() {
        head_scratch_.clear();
        for (const CompiledArg& arg : head_args_) {
            ConstantId id = arg.var_slot >= 0 ? bindings_[arg.var_slot] : arg.constant;
            assert(id != kUnbound);
            head_scratch_.push_back(id);
        }
        return head_scratch_;
    }

    const std::string& head_predicate() const { return rule_.source.head->predicate; }

    GroundRule ground_rule(bool keep_external) const {
        GroundRule out;
        if (rule_.source.head)
            out.head = ground_head();
        for (const CompiledLiteral& cl : literals_) {
            if (cl.literal->atom.external && !keep_external)
                continue;
            GroundLiteral lit;
            lit.negated = cl.literal->negated;
            lit.atom = materialize_atom(cl.literal->atom, cl.args);
            out.body.push_back(std::move(lit));
        }
        return out;
    }

private:
    GroundAtom materialize_atom(const Atom& atom, const std::vector<CompiledArg>& args) const {
        GroundAtom out;
        out.predicate = atom.predicate;
        out.package = atom.package;
        out.external = atom.external;
        out.args.reserve(args.size());
        for (const CompiledArg& arg : args) {
            ConstantId id = arg.var_slot >= 0 ? bindings_[arg.var_slot] : arg.constant;
            assert(id != kUnbound);
            out.args.push_back(constants_.term(id));
        }
        return out;
    }

    std::size_t visible_rows(const std::string& predicate) const {
        std::size_t all = interp_.row_count(predicate);
        if (!limits_)
            return all;
        auto it = limits_->find(predicate);
        return it == limits_->end() ? 0 : std::min(all, it->second);
    }

    const Term& term_of_arg(const CompiledArg& arg) const {
        if (arg.var_slot < 0)
            return arg.term;
        assert(bindings_[arg.var_slot] != kUnbound);
        return constants_.term(bindings_[arg.var_slot]);
    }

    [[noreturn]] void rethrow_oracle_failure(const CompiledLiteral& cl,
                                             const ConstantTuple& inputs,
                                             const OracleError& error) const {
        std::string in;
        for (const Term& t : inputs)
            in += (in.empty() ? "" : ",") + oraclelog::render(t);
        throw OracleFailureError(std::string(error.what()) + " [while instantiating rule at line " +
                                 std::to_string(rule_.source.line) + ", call '#" +
                                 cl.literal->atom.qualified_name() + "' on (" + in + ")]");
    }

    template <typename OnMatch>
    void walk(std::size_t depth, OnMatch& on_match) {
        if (depth == rule_.body_order.size()) {
            on_match(*this);
            return;
        }
        const CompiledLiteral& cl = literals_[rule_.body_order[depth]];
        const Literal& literal = *cl.literal;

        if (!literal.atom.external) {
            if (!literal.negated) {
                const auto& rows = interp_.rows(literal.atom.predicate);
                std::size_t visible = visible_rows(literal.atom.predicate);
                for (std::size_t r = 0; r < visible; ++r) {
                    const GroundTuple& row = rows[r];
                    std::size_t trail_mark = trail_.size();
                    if (match_tuple(cl, row))
                        walk(depth + 1, on_match);
                    unwind(trail_mark);
                }
            } else {
                check_scratch_.clear();
                for (const CompiledArg& arg : cl.args)
                    check_scratch_.push_back(arg.var_slot >= 0 ? bindings_[arg.var_slot]
                                                               : arg.constant);
                if (!interp_.contains(literal.atom.predicate, check_scratch_))
                    walk(depth + 1, on_match);
            }
            return;
        }

        const OracleChoice& choice = *cl.choice;
        const Oracle& oracle = choice.oracle();
        const Pattern& pattern = oracle.signature.pattern;
        // Input buffer is reused; nothing below keeps a reference to it
        // after answer_call returns.
        input_scratch_.clear();
        for (std::size_t pos = 0; pos < cl.args.size(); ++pos)
            if (pattern.is_input(pos))
                input_scratch_.push_back(term_of_arg(cl.args[pos]));

        const AnswerSet* answers = nullptr;
        if (cl.memo) {
            auto hit = cl.memo->find(input_scratch_);
            if (hit != cl.memo->end()) {
                choice.predicate->cache().count_request();
                answers = &hit->second;
            }
        }
        if (!answers) {
            try {
                answers = &choice.predicate->answer_call(oracle, input_scratch_);
            } catch (const OracleError& error) {
                rethrow_oracle_failure(cl, input_scratch_, error);
            }
        }

        if (literal.negated) {
            // All variables bound; the base oracle decided the atom.
            if (answers->empty())
                walk(depth + 1, on_match);
            return;
        }

        for (const ConstantTuple& answer : *answers) {
            std::size_t trail_mark = trail_.size();
            bool ok = true;
            std::size_t out_index = 0;
            for (std::size_t pos = 0; pos < cl.args.size() && ok; ++pos) {
                if (pattern.is_input(pos))
                    continue;
                const Term& value = answer[out_index++];
                const CompiledArg& arg = cl.args[pos];
                if (arg.var_slot < 0) {
                    // Output position over a constant: the atom filters.
                    ok = constants_.term(arg.constant) == value;
                } else if (bindings_[arg.var_slot] != kUnbound) {
                    ok = constants_.term(bindings_[arg.var_slot]) == value;
                } else {
                    bind(arg.var_slot, constants_.intern(value));
                }
            }
            if (ok)
                walk(depth + 1, on_match);
            unwind(trail_mark);
        }
    }

    bool match_tuple(const CompiledLiteral& cl, const GroundTuple& row) {
        for (std::size_t i = 0; i < cl.args.size(); ++i) {
            const CompiledArg& arg = cl.args[i];
            if (arg.var_slot < 0) {
                if (arg.constant != row[i])
                    return false;
            } else if (bindings_[arg.var_slot] != kUnbound) {
                if (bindings_[arg.var_slot] != row[i])
                    return false;
            } else {
                bind(arg.var_slot, row[i]);
            }
        }
        return true;
    }

    void bind(int slot, ConstantId id) {
        bindings_[slot] = id;
        trail_.push_back(slot);
    }

    void unwind(std::size_t mark) {
        while (trail_.size() > mark) {
            bindings_[trail_.back()] = kUnbound;
            trail_.pop_back();
        }
    }

    const CompletedRule& rule_;
    const Interpretation& interp_;
    ConstantRegistry& constants_;
    std::vector<std::string> var_names_;
    std::vector<ConstantId> bindings_;
    std::vector<int> trail_;
    std::vector<CompiledArg> head_args_;
    std::vector<CompiledLiteral> literals_;
    const RowLimits* limits_ = nullptr;
    ConstantTuple input_scratch_;
    GroundTuple head_scratch_;
    GroundTuple check_scratch_;
};

} // namespace

std::vector<GroundRule> instantiate_rule(const CompletedRule& rule, const Interpretation& interp,
                                         const ActiveBindings&, ConstantRegistry& constants) {
    RuleRunner runner(rule, interp, constants);
    std::vector<GroundRule> out;
    runner.run(nullptr, [&](const RuleRunner& r) { out.push_back(r.ground_rule(false)); });
    return out;
}

namespace {

void intern_program_constants(const Program& program, ConstantRegistry& constants) {
    auto intern_atom = [&](const Atom& atom) {
        for (const Term& t : atom.args)
            if (t.is_constant())
                constants.intern(t);
    };
    for (const Rule& rule : program.rules) {
        if (rule.head)
            intern_atom(*rule.head);
        for (const Literal& literal : rule.body)
            intern_atom(literal.atom);
    }
}

} // namespace

std::vector<std::string> EvalResult::sorted_model_lines() const {
    std::vector<std::string> lines;
    for (const std::string& predicate : model.predicates()) {
        std::vector<std::vector<Term>> tuples;
        for (const GroundTuple& row : model.rows(predicate)) {
            std::vector<Term> terms;
            terms.reserve(row.size());
            for (ConstantId id : row)
                terms.push_back(constants.term(id));
            tuples.push_back(std::move(terms));
        }
        std::sort(tuples.begin(), tuples.end());
        for (const std::vector<Term>& tuple : tuples) {
            GroundAtom atom;
            atom.predicate = predicate;
            atom.args = tuple;
            lines.push_back(render(atom));
        }
    }
    return lines;
}

EvalResult evaluate(const Program& program, const ActiveBindings& bindings,
                    const EvalOptions& options) {
    if (options.limits.max_iterations == 0 || options.limits.max_new_constants == 0)
        throw EvalError("grounding limits must be positive");
    AnalyzeOptions analyze_options;
    analyze_options.allow_unsafe_recursion = options.allow_unsafe_recursion;
    AnalysisResult analysis = analyze_program(program, bindings, analyze_options);
    Stratification strata = stratify(program);

    EvalResult result;
    result.warnings = std::move(analysis.warnings);
    intern_program_constants(program, result.constants);
    const std::size_t baseline_constants = result.constants.size();
    const std::uint64_t baseline_invocations = bindings.total_invocations();

    // Stratum of a rule: the level of its head predicate; constraints run
    // once every predicate they mention is final.
    std::size_t stratum_count = strata.strata.empty() ? 1 : strata.strata.size();
    std::vector<std::vector<const CompletedRule*>> rules_by_stratum(stratum_count);
    std::vector<std::vector<const CompletedRule*>> constraints_by_stratum(stratum_count);
    for (const CompletedRule& rule : analysis.rules) {
        if (rule.source.head) {
            rules_by_stratum[strata.level(rule.source.head->predicate)].push_back(&rule);
        } else {
            std::size_t level = 0;
            for (const Literal& literal : rule.source.body)
                if (!literal.atom.external)
                    level = std::max(level, strata.level(literal.atom.predicate));
            constraints_by_stratum[level].push_back(&rule);
        }
    }

    std::set<GroundRule> ground_rules;
    std::uint64_t rounds = 0;

    auto check_constant_budget = [&]() {
        std::uint64_t invented = result.constants.size() - baseline_constants;
        if (invented > options.limits.max_new_constants)
            throw LimitExceededError(
                LimitExceededError::Which::Constants,
                "grounding invented more than " +
                    std::to_string(options.limits.max_new_constants) +
                    " new constants; the program may have an infinite universe");
    };

    for (std::size_t level = 0; level < stratum_count; ++level) {
        // Runners are rebuilt per stratum; bindings reset between rounds via
        // the trail, so reuse across rounds is safe.
        std::vector<RuleRunner> runners;
        runners.reserve(rules_by_stratum[level].size());
        for (const CompletedRule* rule : rules_by_stratum[level])
            runners.emplace_back(*rule, result.model, result.constants);

        bool changed = true;
        while (changed) {
            changed = false;
            if (++rounds > options.limits.max_iterations)
                throw LimitExceededError(
                    LimitExceededError::Which::Iterations,
                    "grounding exceeded " + std::to_string(options.limits.max_iterations) +
                        " fixpoint rounds; the program may not terminate");
            RowLimits snapshot;
            for (const std::string& predicate : result.model.predicates())
                snapshot[predicate] = result.model.row_count(predicate);
            for (std::size_t r = 0; r < runners.size(); ++r) {
                runners[r].run(&snapshot, [&](RuleRunner& runner) {
                    if (result.model.insert(runner.head_predicate(),
                                            runner.ground_head_ids()))
                        changed = true;
                    if (options.collect_ground_rules)
                        ground_rules.insert(runner.ground_rule(options.keep_external));
                });
            }
            check_constant_budget();
        }

        for (const CompletedRule* constraint : constraints_by_stratum[level]) {
            RuleRunner runner(*constraint, result.model, result.constants);
            runner.run(nullptr, [&](const RuleRunner& r) {
                GroundRule violated = r.ground_rule(options.keep_external);
                throw ConstraintViolationError(
                    "constraint violated: " + render(violated), std::move(violated));
            });
        }
    }

    result.stats.rounds = rounds;
    result.stats.oracle_invocations = bindings.total_invocations() - baseline_invocations;
    result.stats.invented_constants = result.constants.size() - baseline_constants;

    if (rounds * 10 >= options.limits.max_iterations * 9)
        result.warnings.push_back({Warning::Kind::LimitNearlyReached,
                                   "fixpoint used " + std::to_string(rounds) + " of " +
                                       std::to_string(options.limits.max_iterations) +
                                       " allowed rounds",
                                   "", 0});
    if (result.stats.invented_constants * 10 >= options.limits.max_new_constants * 9)
        result.warnings.push_back({Warning::Kind::LimitNearlyReached,
                                   "grounding invented " +
                                       std::to_string(result.stats.invented_constants) + " of " +
                                       std::to_string(options.limits.max_new_constants) +
                                       " allowed new constants",
                                   "", 0});

    result.ground_rules.assign(ground_rules.begin(), ground_rules.end());
    return result;
}

} // namespace oraclelog
