#pragma once

// Text grammar for polynomial entries in problem and certificate files:
// signed decimal or rational coefficients, named variables, operators
// + - * and ^ with non-negative integer exponents, and parentheses.
//   e.g.  "0.5*s^2 - 1/3*s + 2"
//
// Problem files admit the variable `s` plus any declared scalar parameters;
// certificate kernels additionally use `eta`.

#include "pistab/poly.hpp"

#include <map>
#include <set>
#include <string>

namespace pistab {

struct PolyGrammar {
    // variable name -> variable; defaults to {"s", "eta"}.
    std::map<std::string, Var> variables{{"s", Var::s}, {"eta", Var::eta}};
    // named scalar parameters substituted at parse time.
    std::map<std::string, Rational> parameters;
};

PolyQ parse_poly(const std::string& text, const PolyGrammar& grammar = PolyGrammar{});

}  // namespace pistab
