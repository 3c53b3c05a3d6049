#include "oraclelog/stdlib.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace oraclelog {

namespace {

using Int = std::int64_t;

Int require_int(const Term& term, const char* predicate) {
    if (!term.is_integer())
        throw OracleError(std::string("'#") + predicate + "' expects integer constants, got " +
                          render(term));
    return term.int_value();
}

const std::string& require_string(const Term& term, const char* predicate) {
    if (!term.is_string())
        throw OracleError(std::string("'#") + predicate + "' expects string constants, got " +
                          render(term));
    return term.text();
}

AnswerSet truth(bool holds) {
    AnswerSet out;
    if (holds)
        out.insert(ConstantTuple{});
    return out;
}

AnswerSet one(Int value) {
    return AnswerSet{ConstantTuple{Term::integer(value)}};
}

Int checked_add(Int a, Int b, const char* predicate) {
    Int result = 0;
    if (__builtin_add_overflow(a, b, &result))
        throw OracleError(std::string("'#") + predicate + "' result overflows");
    return result;
}

Int checked_sub(Int a, Int b, const char* predicate) {
    Int result = 0;
    if (__builtin_sub_overflow(a, b, &result))
        throw OracleError(std::string("'#") + predicate + "' result overflows");
    return result;
}

Oracle make_oracle(const std::string& predicate, std::size_t arity, const std::string& pattern,
                   std::function<AnswerSet(const ConstantTuple&)> evaluate) {
    return Oracle{OracleSignature{predicate, arity, Pattern::parse(pattern)},
                  std::move(evaluate)};
}

// 20! is the last factorial representable in signed 64-bit.
constexpr int kMaxFactorialArg = 20;

std::array<Int, kMaxFactorialArg + 1> factorial_table() {
    std::array<Int, kMaxFactorialArg + 1> table{};
    table[0] = 1;
    for (int i = 1; i <= kMaxFactorialArg; ++i)
        table[i] = table[i - 1] * i;
    return table;
}

PackageEntry succ_entry() {
    auto base = [](const ConstantTuple& in) {
        Int a = require_int(in[0], "succ");
        Int b = require_int(in[1], "succ");
        return truth(a < std::numeric_limits<Int>::max() && b == a + 1);
    };
    auto forward = [](const ConstantTuple& in) {
        return one(checked_add(require_int(in[0], "succ"), 1, "succ"));
    };
    auto backward = [](const ConstantTuple& in) {
        return one(checked_sub(require_int(in[0], "succ"), 1, "succ"));
    };
    return {"succ", 2,
            {make_oracle("succ", 2, "ii", base), make_oracle("succ", 2, "iO", forward),
             make_oracle("succ", 2, "Oi", backward)}};
}

PackageEntry sqr_entry() {
    auto base = [](const ConstantTuple& in) {
        Int n = require_int(in[0], "sqr");
        Int s = require_int(in[1], "sqr");
        return truth(static_cast<__int128>(n) * n == static_cast<__int128>(s));
    };
    auto square = [](const ConstantTuple& in) {
        Int n = require_int(in[0], "sqr");
        Int s = 0;
        if (__builtin_mul_overflow(n, n, &s))
            throw OracleError("'#sqr' result overflows");
        return one(s);
    };
    auto roots = [](const ConstantTuple& in) {
        Int s = require_int(in[0], "sqr");
        AnswerSet out;
        if (s < 0)
            return out;
        Int r = static_cast<Int>(std::llround(std::sqrt(static_cast<double>(s))));
        for (Int candidate = std::max<Int>(0, r - 2); candidate <= r + 2; ++candidate)
            if (static_cast<__int128>(candidate) * candidate == static_cast<__int128>(s)) {
                out.insert(ConstantTuple{Term::integer(candidate)});
                if (candidate != 0)
                    out.insert(ConstantTuple{Term::integer(-candidate)});
            }
        return out;
    };
    return {"sqr", 2,
            {make_oracle("sqr", 2, "ii", base), make_oracle("sqr", 2, "iO", square),
             make_oracle("sqr", 2, "Oi", roots)}};
}

PackageEntry fatt_entry() {
    static const auto table = factorial_table();
    auto base = [](const ConstantTuple& in) {
        Int n = require_int(in[0], "fatt");
        Int f = require_int(in[1], "fatt");
        return truth(n >= 0 && n <= kMaxFactorialArg && table[n] == f);
    };
    auto forward = [](const ConstantTuple& in) {
        Int n = require_int(in[0], "fatt");
        if (n < 0)
            return AnswerSet{};
        if (n > kMaxFactorialArg)
            throw OracleError("'#fatt' result overflows for argument " + std::to_string(n));
        return one(table[n]);
    };
    auto backward = [](const ConstantTuple& in) {
        Int f = require_int(in[0], "fatt");
        AnswerSet out;
        for (Int n = 0; n <= kMaxFactorialArg; ++n)
            if (table[n] == f)
                out.insert(ConstantTuple{Term::integer(n)});
        return out;
    };
    return {"fatt", 2,
            {make_oracle("fatt", 2, "ii", base), make_oracle("fatt", 2, "iO", forward),
             make_oracle("fatt", 2, "Oi", backward)}};
}

PackageEntry add_entry() {
    auto base = [](const ConstantTuple& in) {
        Int x = require_int(in[0], "add");
        Int y = require_int(in[1], "add");
        Int z = require_int(in[2], "add");
        return truth(static_cast<__int128>(x) + y == static_cast<__int128>(z));
    };
    auto sum = [](const ConstantTuple& in) {
        return one(checked_add(require_int(in[0], "add"), require_int(in[1], "add"), "add"));
    };
    auto right = [](const ConstantTuple& in) {
        // inputs are (x, z), output y with x + y = z
        return one(checked_sub(require_int(in[1], "add"), require_int(in[0], "add"), "add"));
    };
    auto left = [](const ConstantTuple& in) {
        // inputs are (y, z), output x with x + y = z
        return one(checked_sub(require_int(in[1], "add"), require_int(in[0], "add"), "add"));
    };
    return {"add", 3,
            {make_oracle("add", 3, "iii", base), make_oracle("add", 3, "iiO", sum),
             make_oracle("add", 3, "iOi", right), make_oracle("add", 3, "Oii", left)}};
}

PackageEntry div_entry() {
    auto representable = [](Int x, Int y) {
        return !(x == std::numeric_limits<Int>::min() && y == -1);
    };
    auto base = [representable](const ConstantTuple& in) {
        Int x = require_int(in[0], "div");
        Int y = require_int(in[1], "div");
        Int z = require_int(in[2], "div");
        return truth(y != 0 && representable(x, y) && x / y == z);
    };
    auto quotient = [representable](const ConstantTuple& in) {
        Int x = require_int(in[0], "div");
        Int y = require_int(in[1], "div");
        if (y == 0)
            return AnswerSet{};
        if (!representable(x, y))
            throw OracleError("'#div' result overflows");
        return one(x / y);
    };
    return {"div", 3, {make_oracle("div", 3, "iii", base), make_oracle("div", 3, "iiO", quotient)}};
}

PackageEntry gt_entry() {
    auto base = [](const ConstantTuple& in) {
        return truth(require_int(in[0], "gt") > require_int(in[1], "gt"));
    };
    return {"gt", 2, {make_oracle("gt", 2, "ii", base)}};
}

PackageEntry contains_entry() {
    auto base = [](const ConstantTuple& in) {
        const std::string& text = require_string(in[0], "contains");
        const std::string& needle = require_string(in[1], "contains");
        return truth(text.find(needle) != std::string::npos);
    };
    return {"contains", 2, {make_oracle("contains", 2, "ii", base)}};
}

} // namespace

std::vector<Package> standard_packages() {
    Package math;
    math.path = "std.math";
    math.entries = {succ_entry(), sqr_entry(), fatt_entry(), add_entry(), div_entry(),
                    gt_entry()};
    Package strings;
    strings.path = "std.strings";
    strings.entries = {contains_entry()};
    return {std::move(math), std::move(strings)};
}

} // namespace oraclelog
