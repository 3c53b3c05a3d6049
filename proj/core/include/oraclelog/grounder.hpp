#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "oraclelog/ast.hpp"
#include "oraclelog/diagnostics.hpp"
#include "oraclelog/safety.hpp"

namespace oraclelog {

using ConstantId = std::uint32_t;

// Interning table for the constants met during evaluation (the growing
// Herbrand universe). Identifiers are dense, stable, and never reused;
// insertion order is preserved.
class ConstantRegistry {
public:
    ConstantId intern(const Term& constant);
    std::optional<ConstantId> find(const Term& constant) const;
    const Term& term(ConstantId id) const { return terms_[id]; }
    std::size_t size() const { return terms_.size(); }

private:
    std::vector<Term> terms_;
    std::unordered_map<Term, ConstantId> ids_;
};

using GroundTuple = std::vector<ConstantId>;

// Per-predicate sets of ground ordinary atoms. Rows keep insertion order so
// a fixpoint round can iterate the snapshot taken at its start while new
// rows land behind it.
class Interpretation {
public:
    // True when the tuple is new; the tuple is copied only in that case.
    bool insert(const std::string& predicate, const GroundTuple& tuple);
    bool contains(const std::string& predicate, const GroundTuple& tuple) const;

    const std::vector<GroundTuple>& rows(const std::string& predicate) const;
    std::size_t row_count(const std::string& predicate) const;
    std::size_t atom_count() const;

    // Predicate names in sorted order.
    std::vector<std::string> predicates() const;

private:
    struct TupleHash {
        std::size_t operator()(const GroundTuple& tuple) const {
            std::size_t h = 0x811c9dc5;
            for (ConstantId id : tuple)
                h = (h ^ id) * 0x01000193;
            return h;
        }
    };
    struct Relation {
        std::vector<GroundTuple> rows;
        std::unordered_set<GroundTuple, TupleHash> index;
    };

    std::map<std::string, Relation> relations_;
};

struct GroundAtom {
    std::string predicate;
    std::string package;
    bool external = false;
    std::vector<Term> args;

    auto tie() const { return std::tie(predicate, package, external, args); }
    bool operator==(const GroundAtom& other) const { return tie() == other.tie(); }
    bool operator<(const GroundAtom& other) const { return tie() < other.tie(); }
};

struct GroundLiteral {
    GroundAtom atom;
    bool negated = false;

    auto tie() const { return std::tie(negated, atom); }
    bool operator==(const GroundLiteral& other) const { return tie() == other.tie(); }
    bool operator<(const GroundLiteral& other) const { return tie() < other.tie(); }
};

// A fully instantiated rule. External atoms were discharged during
// instantiation and deleted (they are true by construction); the
// keep-external debug option retains them as explicit check literals.
struct GroundRule {
    std::optional<GroundAtom> head;
    std::vector<GroundLiteral> body;

    bool is_constraint() const { return !head.has_value(); }

    auto tie() const { return std::tie(head, body); }
    bool operator==(const GroundRule& other) const { return tie() == other.tie(); }
    bool operator<(const GroundRule& other) const { return tie() < other.tie(); }
};

std::string render(const GroundAtom& atom);
std::string render(const GroundRule& rule);

// Ordered partition of the ordinary predicates: positive dependencies stay
// within or below a stratum, negative dependencies point strictly below.
struct Stratification {
    std::vector<std::vector<std::string>> strata;
    std::map<std::string, std::size_t> level_of;

    std::size_t level(const std::string& predicate) const {
        auto it = level_of.find(predicate);
        return it == level_of.end() ? 0 : it->second;
    }
};

class NotStratifiableError : public std::runtime_error {
public:
    NotStratifiableError(std::string message, std::vector<std::string> cycle)
        : std::runtime_error(std::move(message)), cycle_(std::move(cycle)) {}
    const std::vector<std::string>& cycle() const { return cycle_; }

private:
    std::vector<std::string> cycle_;
};

Stratification stratify(const Program& program);

struct GroundingLimits {
    std::uint64_t max_iterations = 10000;
    std::uint64_t max_new_constants = 1000000;
};

class EvalError : public std::runtime_error {
public:
    explicit EvalError(std::string message) : std::runtime_error(std::move(message)) {}
};

class ConstraintViolationError : public EvalError {
public:
    ConstraintViolationError(std::string message, GroundRule violated)
        : EvalError(std::move(message)), violated_(std::move(violated)) {}
    const GroundRule& violated() const { return violated_; }

private:
    GroundRule violated_;
};

class LimitExceededError : public EvalError {
public:
    enum class Which { Iterations, Constants };
    LimitExceededError(Which which, std::string message)
        : EvalError(std::move(message)), which_(which) {}
    Which which() const { return which_; }

private:
    Which which_;
};

class OracleFailureError : public EvalError {
public:
    explicit OracleFailureError(std::string message) : EvalError(std::move(message)) {}
};

// One instantiation pass for a completed rule: nested-loop join along
// body_order. Positive ordinary literals enumerate matching rows, external
// atoms call their chosen oracle on demand (binding output variables and
// interning constants the universe has not seen yet), negated ordinary
// literals check absence, negated externals check the base oracle. Returns
// every resulting ground rule with external atoms removed.
std::vector<GroundRule> instantiate_rule(const CompletedRule& rule, const Interpretation& interp,
                                         const ActiveBindings& bindings,
                                         ConstantRegistry& constants);

struct EvalOptions {
    GroundingLimits limits;
    bool keep_external = false;
    bool allow_unsafe_recursion = false;
    // Ground-rule accumulation can be switched off when only the model is
    // wanted; long recursive runs then skip a per-round rebuild.
    bool collect_ground_rules = true;
};

struct EvalStats {
    std::uint64_t rounds = 0;
    std::uint64_t oracle_invocations = 0;
    std::uint64_t invented_constants = 0;
};

struct EvalResult {
    Interpretation model;
    ConstantRegistry constants;
    std::vector<GroundRule> ground_rules;
    Warnings warnings;
    EvalStats stats;

    // Ground atoms sorted by predicate then arguments, one rendered line per
    // atom.
    std::vector<std::string> sorted_model_lines() const;
};

// Stratified naive fixpoint evaluation: per stratum, instantiate_rule runs
// over the stratum's rules until a round adds nothing. A ground constraint
// instance with a fully satisfied body aborts with ConstraintViolationError;
// runaway recursion trips the grounding limits.
EvalResult evaluate(const Program& program, const ActiveBindings& bindings,
                    const EvalOptions& options = {});

} // namespace oraclelog
