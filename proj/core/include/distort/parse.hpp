#pragma once

#include <string>

#include "distort/copula.hpp"
#include "distort/distortion.hpp"
#include "distort/distribution.hpp"

namespace distort {

// Distortion spec grammar:
//   spec  := atom | "compose(" spec "," spec ")" | "mix(" wterm ("," wterm)* ")"
//          | "tail(" spec "," num ")" | "dual(" spec ")"
//          | "esssup(" num "," spec ")"
//   atom  := ("var"|"tvar"|"power"|"dualpower"|"wang"|"lookback") ":" num
//          | "beta:" num "," num | "glue:" num "," num "," num "," num
//          | "identity" | "copula(" family [":" num ("," num)*] ",v=" num
//                          ["," "side=" ("first"|"second")] ")"
//   wterm := num "*" spec
// Copula families: independence, comonotone, countermonotone, clayton:a,
// frank:a, pareto:a, amh:a, gumbel:a, fgm:a, mo:a,b, gaussian:r.
// Malformed input raises parse_error with a 1-based column; parameter-range
// violations are rethrown as parse_error anchored at the offending atom.
DistortionFn parse_distortion(const std::string& spec);

// Distribution descriptors: discrete:v1:p1,v2:p2,...  uniform:a,b
// pareto:alpha,scale  bernoulli:q  exponential:lambda  lognormal:mu,sigma
// normal:mu,sigma  csv:<path>  example:<id><X|Y> (e.g. example:3.1X).
Distribution parse_distribution(const std::string& descriptor);

// A bare copula family with parameters, same syntax as inside the
// distortion grammar's copula atom: "clayton:2", "mo:0.3,0.7",
// "independence".
Copula parse_copula(const std::string& spec);

}  // namespace distort
