#include "oraclelog/call_cache.hpp"

namespace oraclelog {

Call Call::make(const Pattern& pattern, const ConstantTuple& inputs) {
    // Placeholders are anonymous; subsumption never looks at their names.
    static const Term placeholder = Term::variable("_");
    Call call;
    call.terms.reserve(pattern.size());
    std::size_t next_input = 0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern.is_input(i))
            call.terms.push_back(inputs[next_input++]);
        else
            call.terms.push_back(placeholder);
    }
    return call;
}

bool call_subsumes(const Call& general, const Call& specific) {
    if (general.arity() != specific.arity())
        throw ArityMismatchError("cannot compare calls of arity " +
                                 std::to_string(general.arity()) + " and " +
                                 std::to_string(specific.arity()));
    for (std::size_t i = 0; i < general.terms.size(); ++i) {
        if (general.terms[i].is_variable())
            continue; // placeholder instantiates to whatever stands here
        if (general.terms[i] != specific.terms[i])
            return false;
    }
    return true;
}

bool ExternalPredicateCache::covered(const Call& call) const {
    for (const Call& performed : performed_)
        if (call_subsumes(performed, call))
            return true;
    return false;
}

AnswerSet ExternalPredicateCache::answer_from_extension(const Pattern& pattern,
                                                        const ConstantTuple& inputs) const {
    AnswerSet out;
    for (const ConstantTuple& tuple : extension_) {
        bool matches = true;
        std::size_t next_input = 0;
        for (std::size_t i = 0; i < pattern.size() && matches; ++i)
            if (pattern.is_input(i) && tuple[i] != inputs[next_input++])
                matches = false;
        if (!matches)
            continue;
        ConstantTuple projection;
        projection.reserve(pattern.output_count());
        for (std::size_t i = 0; i < pattern.size(); ++i)
            if (pattern.is_output(i))
                projection.push_back(tuple[i]);
        out.insert(std::move(projection));
    }
    return out;
}

void ExternalPredicateCache::record_invocation(const Call& call, const Pattern& pattern,
                                               const ConstantTuple& inputs,
                                               const AnswerSet& outputs) {
    ++invocations_;
    for (const ConstantTuple& output : outputs) {
        ConstantTuple full;
        full.reserve(pattern.size());
        std::size_t next_input = 0;
        std::size_t next_output = 0;
        for (std::size_t i = 0; i < pattern.size(); ++i)
            full.push_back(pattern.is_input(i) ? inputs[next_input++] : output[next_output++]);
        extension_.insert(std::move(full));
    }
    performed_.push_back(call);
}

const AnswerSet* ExternalPredicateCache::lookup_memo(const std::string& pattern_key,
                                                     const ConstantTuple& inputs) const {
    auto by_pattern = answers_.find(pattern_key);
    if (by_pattern == answers_.end())
        return nullptr;
    auto it = by_pattern->second.find(inputs);
    return it == by_pattern->second.end() ? nullptr : &it->second;
}

const AnswerSet& ExternalPredicateCache::memoize(const std::string& pattern_key,
                                                 const ConstantTuple& inputs,
                                                 AnswerSet answer) {
    return answers_[pattern_key].emplace(inputs, std::move(answer)).first->second;
}

bool ExternalPredicateCache::contains_tuple(const ConstantTuple& tuple) const {
    return extension_.count(tuple) > 0;
}

} // namespace oraclelog
