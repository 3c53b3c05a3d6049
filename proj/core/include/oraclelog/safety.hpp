#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "oraclelog/ast.hpp"
#include "oraclelog/diagnostics.hpp"
#include "oraclelog/registry.hpp"

namespace oraclelog {

// Rules as nodes; edge r1 -> r2 when the head predicate of r1 occurs
// (positively or negated) in the body of r2. External atoms never induce
// edges: they have no defining rules.
struct RuleDependencyGraph {
    std::size_t node_count = 0;
    std::vector<std::vector<std::size_t>> successors;
    // True for nodes lying on some directed cycle (self-loops included).
    std::vector<bool> on_cycle;
};

RuleDependencyGraph build_dependency_graph(const Program& program);

bool requires_strong_safety(std::size_t rule_index, const RuleDependencyGraph& graph);

// A variable is usually safe when it occurs in a positive ordinary body
// atom. Returns the usually-safe variable set; the rule is usually safe when
// every variable of the rule (head included) is in it.
std::set<std::string> usually_safe_variables(const Rule& rule);
bool check_usual_safety(const Rule& rule);

// Chosen oracle for one external body occurrence.
struct OracleChoice {
    ExternalPredicateRef predicate;
    std::size_t oracle_index = 0;

    const Oracle& oracle() const { return predicate->oracles()[oracle_index]; }
};

// A rule whose instantiation order is fixed left to right and where every
// external occurrence carries exactly one chosen oracle. Walking body_order,
// an external atom is only reached once the input-slot variables of its
// oracle are bound, and a negated literal only once all its variables are.
struct CompletedRule {
    Rule source;
    std::size_t rule_index = 0;
    bool recursive = false;
    std::vector<std::size_t> body_order; // permutation of body indices
    // Indexed by body position; engaged exactly for positive external atoms
    // and negated external atoms (which always check the base oracle).
    std::vector<std::optional<OracleChoice>> oracle_choice;
};

enum class SafetyVerdict { UsuallySafe, WeaklySafe, StronglySafe, Unsafe };

std::string to_string(SafetyVerdict verdict);

struct SafetyReport {
    struct Entry {
        std::size_t rule_index = 0;
        SafetyVerdict verdict = SafetyVerdict::UsuallySafe;
        bool recursive = false;
        std::string reason;                 // set for Unsafe verdicts
        std::vector<std::string> variables; // offending variables
        int line = 0;
    };

    std::vector<Entry> entries;

    bool all_safe() const;
    // One line per rule: `rule <n>: <verdict> [recursive]`.
    std::string to_string() const;
};

class SafetyError : public std::runtime_error {
public:
    enum class Kind { WeaklyUnsafe, StronglyUnsafe, UnknownExternalPredicate };

    SafetyError(Kind kind, std::string message, std::vector<std::string> variables = {},
                SafetyReport report = {})
        : std::runtime_error(std::move(message)),
          kind_(kind),
          variables_(std::move(variables)),
          report_(std::move(report)) {}

    Kind kind() const { return kind_; }
    const std::vector<std::string>& variables() const { return variables_; }
    const SafetyReport& report() const { return report_; }

private:
    Kind kind_;
    std::vector<std::string> variables_;
    SafetyReport report_;
};

// Greedy completion. Maintains the bound-variable set and repeatedly places,
// in this priority: (1) the textually first positive external atom with an
// admissible oracle, picking among its admissible oracles the one with the
// fewest output slots (pattern-string order breaks ties); (2) the textually
// first negated literal with all variables bound (negated externals use the
// base oracle); (3) the textually first remaining positive ordinary literal.
// Output-slot variables become bound on placement. With `strong_required`,
// every head variable must additionally be usually safe.
CompletedRule complete_rule(const Rule& rule, const ActiveBindings& bindings,
                            bool strong_required);

struct AnalyzeOptions {
    // Downgrade strong-safety violations to warnings and complete the rule
    // anyway; the evaluation limits then catch runaway recursion.
    bool allow_unsafe_recursion = false;
};

struct AnalysisResult {
    std::vector<CompletedRule> rules;
    SafetyReport report;
    Warnings warnings;
};

// Builds the dependency graph, decides per rule whether strong safety is
// required, and completes every rule. All rules are examined before failing,
// so the report attached to a SafetyError covers every unsafe rule.
AnalysisResult analyze_program(const Program& program, const ActiveBindings& bindings,
                               const AnalyzeOptions& options = {});

} // namespace oraclelog
