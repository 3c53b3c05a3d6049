#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "oraclelog/pattern.hpp"

namespace oraclelog {

// A call is a term tuple submitted to an oracle: constants at the input
// positions, fresh placeholder variables at the output positions.
struct Call {
    std::vector<Term> terms;

    static Call make(const Pattern& pattern, const ConstantTuple& inputs);
    std::size_t arity() const { return terms.size(); }
};

class ArityMismatchError : public std::runtime_error {
public:
    explicit ArityMismatchError(std::string message) : std::runtime_error(std::move(message)) {}
};

// Generality order on calls of equal arity: `general` subsumes `specific`
// when instantiating its placeholders (or renaming them) yields `specific`.
// (a,b,X) subsumes (a,b,c); (c,d,X) and (a,d,X) are incomparable.
// Throws ArityMismatchError on arity disagreement.
bool call_subsumes(const Call& general, const Call& specific);

// Per-predicate memo of oracle traffic. Holds the known extension (every
// full tuple returned so far) and the set of performed calls, ordered by
// subsumption: a new call covered by a performed one is answered from the
// extension without touching the oracle. One cache serves all oracles of a
// predicate, so a call made under one pattern can discharge later calls made
// under another. Answered input tuples are additionally memoized per
// pattern; grounding revisits the same calls every fixpoint round and must
// not pay for more than a lookup.
class ExternalPredicateCache {
public:
    struct TupleHash {
        std::size_t operator()(const ConstantTuple& tuple) const {
            std::size_t h = 0x811c9dc5;
            for (const Term& t : tuple)
                h = (h ^ t.hash()) * 0x01000193;
            return h;
        }
    };
    using AnswerMap = std::unordered_map<ConstantTuple, AnswerSet, TupleHash>;

    // True when some performed call subsumes `call` (including exact repeats).
    bool covered(const Call& call) const;

    // Answer for `pattern`/`inputs` computed from the known extension: the
    // output projection of every stored tuple matching the inputs.
    AnswerSet answer_from_extension(const Pattern& pattern, const ConstantTuple& inputs) const;

    void record_invocation(const Call& call, const Pattern& pattern,
                           const ConstantTuple& inputs, const AnswerSet& outputs);

    // Memoized answer for an input tuple previously answered under the same
    // pattern key; nullptr when absent.
    const AnswerSet* lookup_memo(const std::string& pattern_key,
                                 const ConstantTuple& inputs) const;
    const AnswerSet& memoize(const std::string& pattern_key, const ConstantTuple& inputs,
                             AnswerSet answer);

    // The per-pattern memo itself; the reference stays valid for the cache's
    // lifetime. Grounding holds on to it to answer repeated calls with a
    // single hash lookup.
    const AnswerMap& memo_map(const std::string& pattern_key) {
        return answers_[pattern_key];
    }

    void count_request() { ++request_count_; }
    bool tracing() const { return trace_requests_; }
    void trace_request(Call call) { requests_.push_back(std::move(call)); }
    // Request tracing is off by default; tests switch it on to replay the
    // exact call sequence.
    void enable_request_trace() { trace_requests_ = true; }

    const std::vector<Call>& performed_calls() const { return performed_; }
    const std::vector<Call>& traced_requests() const { return requests_; }
    std::uint64_t invocation_count() const { return invocations_; }
    std::uint64_t request_count() const { return request_count_; }

    bool contains_tuple(const ConstantTuple& tuple) const;
    std::size_t extension_size() const { return extension_.size(); }

private:
    std::unordered_set<ConstantTuple, TupleHash> extension_;
    std::vector<Call> performed_;
    std::unordered_map<std::string, AnswerMap> answers_;
    std::vector<Call> requests_;
    bool trace_requests_ = false;
    std::uint64_t invocations_ = 0;
    std::uint64_t request_count_ = 0;
};

} // namespace oraclelog
