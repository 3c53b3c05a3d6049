#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "test_support.hpp"

using namespace oraclelog;
using namespace oraclelog::testsupport;

TEST_CASE("constant interning is idempotent and kind-aware") {
    ConstantRegistry constants;
    ConstantId nine = constants.intern(Term::integer(9));
    CHECK(constants.intern(Term::integer(9)) == nine);
    CHECK(constants.intern(Term::string("9")) != nine);
    CHECK(constants.intern(Term::symbol("nine")) != nine);
    CHECK(constants.size() == 3);
    CHECK(constants.term(nine) == Term::integer(9));
    CHECK(constants.find(Term::integer(9)).has_value());
    CHECK_FALSE(constants.find(Term::integer(10)).has_value());
}

TEST_CASE("instantiate_rule grounds the squares rule against an interpretation") {
    Registry registry = Registry::with_stdlib();
    ActiveBindings bindings = registry.resolve_imports({}, {});
    Rule rule = parse_rule("squares(S) :- number(N), #sqr(N,S).");
    CompletedRule completed = complete_rule(rule, bindings, false);

    ConstantRegistry constants;
    Interpretation interp;
    SUBCASE("empty interpretation grounds to nothing") {
        CHECK(instantiate_rule(completed, interp, bindings, constants).empty());
    }
    SUBCASE("each matching row produces one ground rule") {
        interp.insert("number", {constants.intern(Term::integer(2))});
        interp.insert("number", {constants.intern(Term::integer(3))});
        std::vector<GroundRule> ground = instantiate_rule(completed, interp, bindings, constants);
        REQUIRE(ground.size() == 2);
        std::vector<std::string> lines;
        for (const GroundRule& g : ground) {
            CHECK(g.body.size() == 1); // external atom removed
            lines.push_back(render(g));
        }
        std::sort(lines.begin(), lines.end());
        CHECK(lines[0] == "squares(4) :- number(2).");
        CHECK(lines[1] == "squares(9) :- number(3).");
        // Outputs were interned on demand.
        CHECK(constants.find(Term::integer(4)).has_value());
        CHECK(constants.find(Term::integer(9)).has_value());
    }
}

TEST_CASE("oracle composition chains through invented constants") {
    // Independent route: compose materialized fact tables of the two base
    // oracles over 0..10 and check the engine agrees.
    Registry registry = Registry::with_stdlib();
    ActiveBindings bindings = registry.resolve_imports({}, {});
    const Oracle& fatt_base = bindings.find("fatt")->predicate->base_oracle();
    const Oracle& sqr_base = bindings.find("sqr")->predicate->base_oracle();
    std::vector<int64_t> window = int_range(0, 10);

    std::set<int64_t> expected;
    for (int64_t n : {3}) {
        for (int64_t f : int_range(0, 10)) {
            if (invoke_uncached(fatt_base, {Term::integer(n), Term::integer(f)}).empty())
                continue;
            // f = 6; square must come from the full row set, not the window.
            for (int64_t s : int_range(0, 100))
                if (!invoke_uncached(sqr_base, {Term::integer(f), Term::integer(s)}).empty())
                    expected.insert(s);
        }
    }
    REQUIRE(expected == std::set<int64_t>{36});

    EvalResult result =
        eval_text(registry, "number(3).\nh(S1) :- number(N), #fatt(N,S), #sqr(S,S1).\n");
    std::vector<std::string> lines = result.sorted_model_lines();
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "h(36)");
    CHECK(lines[1] == "number(3)");
}

TEST_CASE("stratification layers negation strictly below") {
    Stratification strata = stratify(parse_program("p(X) :- d(X), not q(X).\nq(a).\nd(a).\n"));
    CHECK(strata.level("d") == 0);
    CHECK(strata.level("q") == 0);
    CHECK(strata.level("p") == 1);
    REQUIRE(strata.strata.size() == 2);
    CHECK(strata.strata[0] == std::vector<std::string>{"d", "q"});
    CHECK(strata.strata[1] == std::vector<std::string>{"p"});

    Stratification positive = stratify(parse_program("p(X) :- q(X).\nq(a).\n"));
    CHECK(positive.strata.size() == 1);

    try {
        stratify(parse_program("p(X) :- d(X), not p(X).\nd(a).\n"));
        FAIL("expected NotStratifiableError");
    } catch (const NotStratifiableError& e) {
        CHECK(e.cycle() == std::vector<std::string>{"p"});
    }
}

TEST_CASE("evaluation computes the perfect model stratum by stratum") {
    Registry registry = Registry::with_stdlib();
    EvalResult result = eval_text(registry, "number(2). number(3).\n"
                                            "squares(S) :- number(N), #sqr(N,S).\n");
    std::vector<std::string> lines = result.sorted_model_lines();
    std::vector<std::string> expected = {"number(2)", "number(3)", "squares(4)", "squares(9)"};
    CHECK(lines == expected);

    // The invented squares live in the constant registry even though the
    // program text never mentions them.
    CHECK(result.constants.find(Term::integer(4)).has_value());
    CHECK(result.constants.find(Term::integer(9)).has_value());
    CHECK(result.stats.invented_constants == 2);
}

TEST_CASE("negation evaluates against completed lower strata") {
    Registry registry = Registry::with_stdlib();
    EvalResult result = eval_text(registry, "d(1). d(2). d(3). d(4).\n"
                                            "q(X) :- d(X), #gt(X,2).\n"
                                            "p(X) :- d(X), not q(X).\n");
    std::vector<std::string> lines = result.sorted_model_lines();
    CHECK(std::count(lines.begin(), lines.end(), "p(1)") == 1);
    CHECK(std::count(lines.begin(), lines.end(), "p(2)") == 1);
    CHECK(std::count(lines.begin(), lines.end(), "q(3)") == 1);
    CHECK(std::count(lines.begin(), lines.end(), "q(4)") == 1);
    CHECK(std::count(lines.begin(), lines.end(), "p(3)") == 0);
}

TEST_CASE("negated external atoms filter through the base oracle") {
    Registry registry = Registry::with_stdlib();
    EvalResult result = eval_text(registry, "d(2). d(3). d(4). d(5).\n"
                                            "small(X) :- d(X), not #gt(X,3).\n");
    std::vector<std::string> lines = result.sorted_model_lines();
    CHECK(std::count(lines.begin(), lines.end(), "small(2)") == 1);
    CHECK(std::count(lines.begin(), lines.end(), "small(3)") == 1);
    CHECK(std::count(lines.begin(), lines.end(), "small(4)") == 0);
    CHECK(std::count(lines.begin(), lines.end(), "small(5)") == 0);
}

TEST_CASE("constraints abort evaluation when their body is satisfied") {
    Registry registry = Registry::with_stdlib();
    try {
        eval_text(registry, "p(a).\n:- p(a).\n");
        FAIL("expected ConstraintViolationError");
    } catch (const ConstraintViolationError& e) {
        CHECK(render(e.violated()) == ":- p(a).");
    }
    // An unsatisfied constraint is fine.
    CHECK_NOTHROW(eval_text(registry, "p(a).\n:- p(b).\n"));
}

TEST_CASE("value-inventing recursion trips the grounding limits") {
    Registry registry = Registry::with_stdlib();
    EvalOptions options;
    options.allow_unsafe_recursion = true;
    options.limits.max_iterations = 100;
    options.limits.max_new_constants = 1000000;
    try {
        eval_text(registry, "int(0).\nint(X) :- int(Y), #succ(X,Y).\n", options);
        FAIL("expected LimitExceededError");
    } catch (const LimitExceededError& e) {
        CHECK(e.which() == LimitExceededError::Which::Iterations);
    }

    options.limits.max_iterations = 10000;
    options.limits.max_new_constants = 50;
    try {
        eval_text(registry, "int(0).\nint(X) :- int(Y), #succ(X,Y).\n", options);
        FAIL("expected LimitExceededError");
    } catch (const LimitExceededError& e) {
        CHECK(e.which() == LimitExceededError::Which::Constants);
    }
}

TEST_CASE("re-evaluation against one registry performs no further invocations") {
    Registry registry = Registry::with_stdlib();
    std::string text = "number(2). number(3). number(4).\n"
                       "squares(S) :- number(N), #sqr(N,S).\n"
                       "big(S) :- squares(S), #gt(S,5).\n";
    EvalResult first = eval_text(registry, text);
    CHECK(first.stats.oracle_invocations > 0);
    EvalResult second = eval_text(registry, text);
    CHECK(second.stats.oracle_invocations == 0);
    CHECK(first.sorted_model_lines() == second.sorted_model_lines());
}

TEST_CASE("ground rules never contain external atoms unless asked to keep them") {
    Registry registry = Registry::with_stdlib();
    std::string text = "number(2).\nsquares(S) :- number(N), #sqr(N,S).\n";
    EvalResult plain = eval_text(registry, text);
    for (const GroundRule& rule : plain.ground_rules)
        for (const GroundLiteral& literal : rule.body)
            CHECK_FALSE(literal.atom.external);

    EvalOptions keep;
    keep.keep_external = true;
    EvalResult kept = eval_text(registry, text, keep);
    bool saw_external = false;
    for (const GroundRule& rule : kept.ground_rules)
        for (const GroundLiteral& literal : rule.body)
            saw_external |= literal.atom.external;
    CHECK(saw_external);
}

TEST_CASE("transitive closure reaches its fixpoint") {
    Registry registry = Registry::with_stdlib();
    EvalResult result = eval_text(registry, "edge(a,b). edge(b,c). edge(c,d).\n"
                                            "path(X,Y) :- edge(X,Y).\n"
                                            "path(X,Z) :- path(X,Y), edge(Y,Z).\n");
    std::vector<std::string> lines = result.sorted_model_lines();
    CHECK(std::count(lines.begin(), lines.end(), "path(a,d)") == 1);
    CHECK(std::count(lines.begin(), lines.end(), "path(a,c)") == 1);
    CHECK(std::count(lines.begin(), lines.end(), "path(d,a)") == 0);
    // 3 edges + 6 paths + 3 edges-as-path... edge(3) + path pairs (a,b),(b,c),(c,d),(a,c),(b,d),(a,d).
    CHECK(std::count_if(lines.begin(), lines.end(), [](const std::string& l) {
              return l.rfind("path(", 0) == 0;
          }) == 6);
}

TEST_CASE("produced values are checked against later literals") {
    Registry registry = Registry::with_stdlib();
    // iO binds S right after d; the e(S) literal then verifies it.
    EvalResult result = eval_text(registry, "d(2). d(3). e(4). e(10).\n"
                                            "match(X,S) :- d(X), e(S), #sqr(X,S).\n");
    std::vector<std::string> lines = result.sorted_model_lines();
    CHECK(std::count(lines.begin(), lines.end(), "match(2,4)") == 1);
    CHECK(std::count_if(lines.begin(), lines.end(), [](const std::string& l) {
              return l.rfind("match(", 0) == 0;
          }) == 1);
}

TEST_CASE("bound variables at output slots intersect the oracle's answers") {
    // A predicate whose only non-base oracle outputs both positions: with X
    // bound beforehand, the first output slot acts as a filter on the
    // enumerated pairs.
    std::set<std::pair<int64_t, int64_t>> pairs = {{1, 1}, {1, 2}, {2, 3}};
    auto base = [pairs](const ConstantTuple& in) {
        AnswerSet out;
        if (pairs.count({in[0].int_value(), in[1].int_value()}))
            out.insert(ConstantTuple{});
        return out;
    };
    auto enumerate = [pairs](const ConstantTuple&) {
        AnswerSet out;
        for (auto [a, b] : pairs)
            out.insert(ConstantTuple{Term::integer(a), Term::integer(b)});
        return out;
    };
    Registry registry = Registry::with_stdlib();
    registry.register_package(
        Package{"pairs",
                {{"q",
                  2,
                  {Oracle{OracleSignature{"q", 2, Pattern::parse("ii")}, base},
                   Oracle{OracleSignature{"q", 2, Pattern::parse("OO")}, enumerate}}}}});

    Program program = parse_program("d(1).\nm(Y) :- d(X), #pairs.q(X,Y).\n");
    ActiveBindings bindings = registry.resolve_imports({}, {});
    EvalResult result = evaluate(program, bindings);
    std::vector<std::string> lines = result.sorted_model_lines();
    CHECK(std::count(lines.begin(), lines.end(), "m(1)") == 1);
    CHECK(std::count(lines.begin(), lines.end(), "m(2)") == 1);
    CHECK(std::count(lines.begin(), lines.end(), "m(3)") == 0);
}

TEST_CASE("anonymous variables ground independently") {
    Registry registry = Registry::with_stdlib();
    EvalResult result = eval_text(registry, "q(1,a). q(2,b).\np(X) :- q(_,X).\n");
    std::vector<std::string> lines = result.sorted_model_lines();
    CHECK(std::count(lines.begin(), lines.end(), "p(a)") == 1);
    CHECK(std::count(lines.begin(), lines.end(), "p(b)") == 1);
}

TEST_CASE("oracle failures carry rule context") {
    Registry registry = Registry::with_stdlib();
    try {
        eval_text(registry, "d(25).\nbig(F) :- d(N), #fatt(N,F).\n");
        FAIL("expected OracleFailureError");
    } catch (const OracleFailureError& e) {
        std::string what = e.what();
        CHECK(what.find("#fatt") != std::string::npos);
        CHECK(what.find("25") != std::string::npos);
    }
}

TEST_CASE("generated programs agree with brute-force materialization") {
    std::mt19937 rng(1234);
    Registry registry = Registry::with_stdlib();
    EvalOptions options;
    options.collect_ground_rules = false;
    for (int trial = 0; trial < 25; ++trial) {
        GeneratedProgram generated = generate_program(rng);
        CAPTURE(generated.text);

        ActiveBindings bindings = registry.resolve_imports({}, {});
        EvalResult with_oracles = evaluate(generated.program, bindings, options);

        Program rewritten = materialized_rewrite(generated);
        ActiveBindings pure = registry.resolve_imports({}, {});
        EvalResult with_tables = evaluate(rewritten, pure, options);

        CHECK(model_lines_excluding_prefix(with_oracles, "tbl_") ==
              model_lines_excluding_prefix(with_tables, "tbl_"));
    }
}

TEST_CASE("interpretation growth is monotone across rounds") {
    // Indirect check: the final model contains the one-step model.
    Registry registry = Registry::with_stdlib();
    std::string base_text = "edge(a,b). edge(b,c).\npath(X,Y) :- edge(X,Y).\n";
    EvalResult one_step = eval_text(registry, base_text);
    EvalResult closure = eval_text(registry, base_text +
                                                 "path(X,Z) :- path(X,Y), edge(Y,Z).\n");
    for (const std::string& line : one_step.sorted_model_lines()) {
        auto lines = closure.sorted_model_lines();
        CHECK(std::find(lines.begin(), lines.end(), line) != lines.end());
    }
}

TEST_CASE("every returned ground rule has its head in the model") {
    Registry registry = Registry::with_stdlib();
    EvalResult result = eval_text(registry, "d(1). d(2). d(3).\n"
                                            "q(X) :- d(X), #gt(X,1).\n"
                                            "p(S) :- q(X), #sqr(X,S).\n"
                                            "r(X) :- d(X), not q(X).\n");
    std::vector<std::string> model = result.sorted_model_lines();
    CHECK_FALSE(result.ground_rules.empty());
    for (const GroundRule& rule : result.ground_rules) {
        REQUIRE(rule.head.has_value());
        std::string head = render(*rule.head);
        CHECK(std::find(model.begin(), model.end(), head) != model.end());
        // Positive ordinary body literals hold in the model too.
        for (const GroundLiteral& literal : rule.body)
            if (!literal.negated && !literal.atom.external)
                CHECK(std::find(model.begin(), model.end(), render(literal.atom)) !=
                      model.end());
    }
}

TEST_CASE("evaluation warns when a limit is nearly reached") {
    Registry registry = Registry::with_stdlib();
    EvalOptions options;
    // Facts land in round one, the rule fires in round two, round three
    // confirms the fixpoint.
    options.limits.max_iterations = 3;
    EvalResult result = eval_text(registry, "number(2).\n"
                                            "squares(S) :- number(N), #sqr(N,S).\n",
                                  options);
    bool warned = false;
    for (const Warning& warning : result.warnings)
        warned |= warning.kind == Warning::Kind::LimitNearlyReached;
    CHECK(warned);
}

TEST_CASE("grounding limits must be positive") {
    Registry registry = Registry::with_stdlib();
    EvalOptions options;
    options.limits.max_iterations = 0;
    CHECK_THROWS_AS(eval_text(registry, "p(a).\n", options), EvalError);
}

TEST_CASE("model output is sorted by predicate then arguments") {
    Registry registry = Registry::with_stdlib();
    EvalResult result = eval_text(registry, "z(2). z(10). z(-3). a(b). a(1).\n");
    std::vector<std::string> lines = result.sorted_model_lines();
    std::vector<std::string> expected = {"a(1)", "a(b)", "z(-3)", "z(2)", "z(10)"};
    CHECK(lines == expected);
}
