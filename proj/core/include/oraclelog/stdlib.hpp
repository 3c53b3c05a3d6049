#pragma once

#include <vector>

#include "oraclelog/registry.hpp"

namespace oraclelog {

// Built-in packages `std.math` and `std.strings`.
//
//   #succ/2      ii, iO, Oi        succ(a,b) iff b = a+1
//   #sqr/2       ii, iO, Oi        sqr(n,s) iff s = n*n
//   #fatt/2      ii, iO, Oi        fatt(n,f) iff f = n!  (n >= 0)
//   #add/3       iii, iiO, iOi, Oii    add(x,y,z) iff z = x+y
//   #div/3       iii, iiO          div(x,y,z) iff z = x/y, empty for y = 0
//   #gt/2        ii                gt(x,y) iff x > y
//   #contains/2  ii                contains(s,sub) iff sub occurs in s
//
// Integer oracles reject non-integer constants with OracleError, as they do
// results that overflow signed 64-bit.
std::vector<Package> standard_packages();

} // namespace oraclelog
