// Acceptance suite: one pass/fail line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "test_support.hpp"

using namespace oraclelog;
using namespace oraclelog::testsupport;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string check(bool condition, const std::string& label) {
    return condition ? "" : label + "; ";
}

// ---------------------------------------------------------------------------
// 1. The reordering examples classify as two safe, two unsafe, and the
//    recursive successor rule is rejected under strong safety. Runtime < 1s.
std::string criterion_safety_examples() {
    auto start = Clock::now();
    std::string failures;

    Registry registry = registry_with_restricted();
    TempDir lib;
    lib.write("test.math.pkg", "package test.math\noracle sqr/2 iO\noracle fatt/2 iO\n");
    Program importer = parse_program("#import test.math.*\np(a).\n");
    ActiveBindings bindings = registry.resolve_imports(importer.imports, {lib.path()});

    auto is_safe = [&](const std::string& text) {
        try {
            complete_rule(parse_rule(text), bindings, false);
            return true;
        } catch (const SafetyError&) {
            return false;
        }
    };
    failures += check(is_safe("h(S) :- number(N), #sqr(N,S)."), "rule 1 should be safe");
    failures += check(is_safe("h(S1) :- number(N), #fatt(N,S), #sqr(S,S1)."),
                      "rule 2 should be safe");
    failures += check(!is_safe("h(S) :- number(S), #sqr(N,S)."), "rule 3 should be unsafe");
    failures += check(!is_safe("h(S1) :- number(S), #fatt(N,S), #sqr(S,S1)."),
                      "rule 4 should be unsafe");

    Registry stdlib = Registry::with_stdlib();
    ActiveBindings std_bindings = stdlib.resolve_imports({}, {});
    bool strongly_rejected = false;
    try {
        analyze_program(parse_program("int(0).\nint(X) :- int(Y), #succ(X,Y).\n"),
                        std_bindings);
    } catch (const SafetyError& e) {
        strongly_rejected =
            e.kind() == SafetyError::Kind::StronglyUnsafe && e.report().entries[1].recursive;
    }
    failures += check(strongly_rejected, "recursive successor rule should be StronglyUnsafe");
    failures += check(seconds_since(start) < 1.0, "runtime exceeded 1s");
    return failures;
}

// ---------------------------------------------------------------------------
// 2. Every stdlib oracle agrees with its base oracle exhaustively on inputs
//    in -20..20, including the factorial identities. Runtime < 5s.
std::string criterion_oracle_consistency() {
    auto start = Clock::now();
    std::string failures;
    Registry registry = Registry::with_stdlib();
    ActiveBindings bindings = registry.resolve_imports({}, {});
    std::vector<int64_t> domain = int_range(-20, 20);

    std::size_t mismatches = 0;
    for (const char* name : {"succ", "sqr", "fatt", "add", "div", "gt", "contains"}) {
        const ExternalPredicate& predicate = *bindings.find(name)->predicate;
        const Oracle& base = predicate.base_oracle();
        if (std::string(name) == "contains")
            continue; // string predicate: base-only, nothing to cross-check
        std::set<ConstantTuple> extension = materialize_base(base, domain);
        for (const Oracle& oracle : predicate.oracles()) {
            const Pattern& pattern = oracle.signature.pattern;
            std::vector<std::size_t> index(pattern.input_count(), 0);
            while (true) {
                ConstantTuple inputs;
                for (std::size_t i : index)
                    inputs.push_back(Term::integer(domain[i]));
                AnswerSet answers = invoke_uncached(oracle, inputs);
                // Everything answered must satisfy the base oracle.
                for (const ConstantTuple& output : answers) {
                    ConstantTuple full;
                    std::size_t ii = 0, oi = 0;
                    for (std::size_t k = 0; k < pattern.size(); ++k)
                        full.push_back(pattern.is_input(k) ? inputs[ii++] : output[oi++]);
                    if (invoke_uncached(base, full).empty())
                        ++mismatches;
                }
                // Everything the base accepts inside the window must be
                // answered.
                for (const ConstantTuple& full : extension) {
                    bool matches = true;
                    std::size_t ii = 0;
                    for (std::size_t k = 0; k < pattern.size() && matches; ++k)
                        if (pattern.is_input(k) && full[k] != inputs[ii++])
                            matches = false;
                    if (!matches)
                        continue;
                    ConstantTuple output;
                    for (std::size_t k = 0; k < pattern.size(); ++k)
                        if (pattern.is_output(k))
                            output.push_back(full[k]);
                    if (!answers.count(output))
                        ++mismatches;
                }
                std::size_t pos = 0;
                while (pos < index.size()) {
                    if (++index[pos] < domain.size())
                        break;
                    index[pos] = 0;
                    ++pos;
                }
                if (pos == index.size() || index.empty())
                    break;
            }
        }
    }
    failures += check(mismatches == 0,
                      "consistency mismatches: " + std::to_string(mismatches));

    const ExternalPredicate& fatt = *bindings.find("fatt")->predicate;
    AnswerSet forward =
        invoke_uncached(*fatt.find_oracle(Pattern::parse("iO")), {Term::integer(3)});
    AnswerSet backward =
        invoke_uncached(*fatt.find_oracle(Pattern::parse("Oi")), {Term::integer(6)});
    failures += check(forward == AnswerSet{{Term::integer(6)}}, "fatt iO(3) != {(6)}");
    failures += check(backward == AnswerSet{{Term::integer(3)}}, "fatt Oi(6) != {(3)}");
    failures += check(seconds_since(start) < 5.0, "runtime exceeded 5s");
    return failures;
}

// ---------------------------------------------------------------------------
// 3. On >= 100 generated programs, evaluation with oracles equals pure
//    Datalog evaluation over materialized base-oracle fact tables.
std::string criterion_materialization_equivalence() {
    std::string failures;
    std::mt19937 rng(20260809);
    Registry registry = Registry::with_stdlib();
    EvalOptions options;
    options.collect_ground_rules = false;

    const int programs = 120;
    int mismatched = 0;
    for (int trial = 0; trial < programs; ++trial) {
        GeneratedProgram generated = generate_program(rng);
        ActiveBindings bindings = registry.resolve_imports({}, {});
        EvalResult with_oracles = evaluate(generated.program, bindings, options);
        EvalResult with_tables =
            evaluate(materialized_rewrite(generated), registry.resolve_imports({}, {}), options);
        if (model_lines_excluding_prefix(with_oracles, "tbl_") !=
            model_lines_excluding_prefix(with_tables, "tbl_"))
            ++mismatched;
    }
    failures += check(mismatched == 0, std::to_string(mismatched) + " of " +
                                           std::to_string(programs) +
                                           " generated programs disagreed");
    return failures;
}

// ---------------------------------------------------------------------------
// 4. Cache behavior: zero additional invocations on re-evaluation, first-run
//    invocations bounded by non-subsumed requests, and a ground check is
//    answered from a prior output-producing call without invocation.
std::string criterion_cache_behavior() {
    std::string failures;

    Registry registry = Registry::with_stdlib();
    ActiveBindings bindings = registry.resolve_imports({}, {});
    for (const ExternalPredicateRef& predicate : bindings.distinct_predicates())
        predicate->cache().enable_request_trace();

    std::string benchmark = "number(2). number(3). number(4).\n"
                            "squares(S) :- number(N), #sqr(N,S).\n"
                            "chained(S1) :- number(N), #fatt(N,S), #sqr(S,S1).\n"
                            "small(X) :- number(X), not #gt(X,3).\n";
    Program program = parse_program(benchmark);
    EvalResult first = evaluate(program, bindings);
    std::uint64_t first_invocations = first.stats.oracle_invocations;
    failures += check(first_invocations > 0, "benchmark program should invoke oracles");

    EvalResult second = evaluate(program, bindings);
    failures += check(second.stats.oracle_invocations == 0,
                      "re-evaluation invoked " +
                          std::to_string(second.stats.oracle_invocations) + " oracles");
    failures += check(first.sorted_model_lines() == second.sorted_model_lines(),
                      "models differ between runs");

    std::uint64_t invocations = 0;
    std::size_t non_subsumed = 0;
    for (const ExternalPredicateRef& predicate : bindings.distinct_predicates()) {
        invocations += predicate->cache().invocation_count();
        const auto& requests = predicate->cache().traced_requests();
        for (std::size_t i = 0; i < requests.size(); ++i) {
            bool covered = false;
            for (std::size_t j = 0; j < i && !covered; ++j)
                covered = call_subsumes(requests[j], requests[i]);
            if (!covered)
                ++non_subsumed;
        }
    }
    failures += check(invocations <= non_subsumed,
                      "invocations " + std::to_string(invocations) +
                          " exceed non-subsumed requests " + std::to_string(non_subsumed));

    // The generality order itself, on the worked example.
    Call general{{Term::symbol("a"), Term::symbol("b"), Term::variable("X")}};
    Call specific{{Term::symbol("a"), Term::symbol("b"), Term::symbol("c")}};
    failures += check(call_subsumes(general, specific) && !call_subsumes(specific, general),
                      "(a,b,X) must subsume (a,b,c) and not conversely");

    // Base-pattern check served from a prior iO call.
    Registry fresh_registry = Registry::with_stdlib();
    ActiveBindings fresh = fresh_registry.resolve_imports({}, {});
    ExternalPredicate& fatt = *fresh.find("fatt")->predicate;
    fatt.answer_call(*fatt.find_oracle(Pattern::parse("iO")), {Term::integer(3)});
    std::uint64_t before = fatt.cache().invocation_count();
    AnswerSet truth =
        fatt.answer_call(fatt.base_oracle(), {Term::integer(3), Term::integer(6)});
    failures += check(truth == AnswerSet{ConstantTuple{}},
                      "ground check (3,6) should be true");
    failures += check(fatt.cache().invocation_count() == before,
                      "ground check (3,6) should not invoke the oracle");
    return failures;
}

// ---------------------------------------------------------------------------
// 5. Reordering is deterministic, places #r only after {Y,Z} are bound, and
//    replay of every completed rule in the generated corpus never reaches an
//    oracle input unbound.
std::string criterion_reordering() {
    std::string failures;

    Registry registry = registry_with_restricted();
    TempDir lib;
    lib.write("test.math.pkg", "package test.math\noracle r/3 iiO\n");
    Program importer = parse_program("#import test.math.*\np(a).\n");
    ActiveBindings bindings = registry.resolve_imports(importer.imports, {lib.path()});

    Rule rule = parse_rule("p(X) :- q(X,Y), s(Y,T), m(Z), n(Z,T), #r(Y,Z,T).");
    CompletedRule first = complete_rule(rule, bindings, false);
    CompletedRule again = complete_rule(rule, bindings, false);
    failures += check(first.body_order == again.body_order, "order not deterministic");
    std::vector<std::size_t> expected = {0, 1, 2, 4, 3};
    failures += check(first.body_order == expected, "unexpected order for the #r rule");

    std::set<std::string> bound;
    bool external_after_bindings = false;
    for (std::size_t position : first.body_order) {
        const Atom& atom = rule.body[position].atom;
        if (atom.external)
            external_after_bindings = bound.count("Y") && bound.count("Z");
        for (const Term& t : atom.args)
            if (t.is_variable())
                bound.insert(t.text());
    }
    failures += check(external_after_bindings, "#r placed before Y and Z were bound");

    std::mt19937 rng(20260809);
    Registry stdlib = Registry::with_stdlib();
    ActiveBindings std_bindings = stdlib.resolve_imports({}, {});
    int violations = 0;
    for (int trial = 0; trial < 120; ++trial) {
        GeneratedProgram generated = generate_program(rng);
        AnalysisResult analysis = analyze_program(generated.program, std_bindings);
        for (const CompletedRule& completed : analysis.rules)
            if (!replay_is_sound(completed))
                ++violations;
    }
    failures += check(violations == 0,
                      std::to_string(violations) + " replay violations in the corpus");
    return failures;
}

// ---------------------------------------------------------------------------
// 6. With unsafe recursion allowed, the successor program exits with status 3
//    under the default limits in < 10s.
std::string criterion_guard() {
    auto start = Clock::now();
    std::string failures;

    TempDir dir;
    auto file = dir.write("runaway.dl", "int(0).\nint(X) :- int(Y), #succ(X,Y).\n");
    CliConfig config;
    config.input_files = {file.string()};
    config.allow_unsafe_recursion = true;
    std::ostringstream out, err;
    int status = run(config, out, err);
    failures += check(status == kExitResourceError,
                      "exit status " + std::to_string(status) + ", expected 3");
    failures += check(err.str().find("10000") != std::string::npos,
                      "diagnostic should mention the default round limit");
    failures += check(seconds_since(start) < 10.0, "runtime exceeded 10s");
    return failures;
}

// ---------------------------------------------------------------------------
// 7. Import semantics: exactly one shadowing warning binding the later
//    package, and reserved names cannot be registered.
std::string criterion_imports() {
    std::string failures;

    Registry registry = Registry::with_stdlib();
    auto make_pkg = [](const std::string& path, int64_t value) {
        auto base = [value](const ConstantTuple& in) {
            AnswerSet out;
            if (in[0] == Term::integer(value))
                out.insert(ConstantTuple{});
            return out;
        };
        return Package{path,
                       {{"pick",
                         1,
                         {Oracle{OracleSignature{"pick", 1, Pattern::parse("i")}, base}}}}};
    };
    registry.register_package(make_pkg("alpha", 1));
    registry.register_package(make_pkg("beta", 2));

    TempDir lib;
    lib.write("alpha.pkg", "package alpha\noracle pick/1 i\n");
    lib.write("beta.pkg", "package beta\noracle pick/1 i\n");

    Warnings warnings;
    ActiveBindings bindings = registry.resolve_imports(
        {ImportDirective{{"alpha"}, true, 1}, ImportDirective{{"beta"}, true, 2}},
        {lib.path()}, &warnings);

    std::size_t shadow_warnings = 0;
    for (const Warning& warning : warnings)
        if (warning.kind == Warning::Kind::PredicateShadowed)
            ++shadow_warnings;
    failures += check(shadow_warnings == 1,
                      std::to_string(shadow_warnings) + " shadow warnings, expected 1");
    const auto* binding = bindings.find("pick");
    failures += check(binding && binding->package == "beta", "later package should win");

    bool reserved_rejected = false;
    try {
        Package bad{"res",
                    {{"sum",
                      1,
                      {Oracle{OracleSignature{"sum", 1, Pattern::parse("i")},
                              [](const ConstantTuple&) { return AnswerSet{}; }}}}}};
        registry.register_package(bad);
    } catch (const RegistryError& e) {
        reserved_rejected = e.kind() == RegistryError::Kind::ReservedName;
    }
    failures += check(reserved_rejected, "reserved name registration must be rejected");
    return failures;
}

// ---------------------------------------------------------------------------
// 8. Grounding the squares rule over 10,000 facts finishes in < 2s with
//    exactly 10,000 #sqr invocations.
std::string criterion_performance() {
    std::string failures;

    std::string text;
    for (int i = 0; i < 10000; ++i)
        text += "number(" + std::to_string(i) + ").\n";
    text += "squares(S) :- number(N), #sqr(N,S).\n";
    Program program = parse_program(text);

    Registry registry = Registry::with_stdlib();
    ActiveBindings bindings = registry.resolve_imports({}, {});

    auto start = Clock::now();
    EvalResult result = evaluate(program, bindings);
    double elapsed = seconds_since(start);

    failures += check(result.model.row_count("squares") == 10000, "expected 10000 squares");
    std::uint64_t invocations = bindings.find("sqr")->predicate->cache().invocation_count();
    failures += check(invocations == 10000,
                      "sqr invoked " + std::to_string(invocations) + " times, expected 10000");
    failures += check(elapsed < 2.0,
                      "grounding took " + std::to_string(elapsed) + "s, budget 2s");
    return failures;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* label;
        std::function<std::string()> run;
    };
    const Criterion criteria[] = {
        {1, "safety classification of the reordering examples", criterion_safety_examples},
        {2, "stdlib oracle consistency on -20..20", criterion_oracle_consistency},
        {3, "materialization equivalence on generated programs",
         criterion_materialization_equivalence},
        {4, "call cache subsumption and replay", criterion_cache_behavior},
        {5, "deterministic sound reordering", criterion_reordering},
        {6, "non-termination guard", criterion_guard},
        {7, "import shadowing and reserved names", criterion_imports},
        {8, "desk-scale grounding performance", criterion_performance},
    };

    int failed = 0;
    for (const Criterion& criterion : criteria) {
        auto start = Clock::now();
        std::string failure;
        try {
            failure = criterion.run();
        } catch (const std::exception& e) {
            failure = std::string("exception: ") + e.what();
        }
        double elapsed = seconds_since(start);
        std::ostringstream line;
        line << "criterion " << criterion.id << ": "
             << (failure.empty() ? "PASS" : "FAIL") << " - " << criterion.label << " ("
             << std::fixed << std::setprecision(2) << elapsed << "s)";
        if (!failure.empty()) {
            line << " [" << failure << "]";
            ++failed;
        }
        std::cout << line.str() << std::endl;
    }
    return failed;
}
