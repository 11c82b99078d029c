#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ttrace/funcalc.hpp"
#include "ttrace/quadrature.hpp"
#include "ttrace/symbol.hpp"

namespace ttrace {

using json = nlohmann::ordered_json;

// One invocation's worth of input, in canonical form.  Parsed once from the
// command line (or from a JSON object), then echoed verbatim into every JSON
// artifact so a result file carries everything needed to regenerate itself.
// Identical JobSpecs must serialize to identical bytes.
struct JobSpec {
    std::string command;
    json symbol;                     // expression string or structured object; null if unused
    std::string phi;                 // scalar-function spec text; "" if unused
    std::string example;             // reproduce target id
    std::string which = "toeplitz";  // dump-matrix: toeplitz | hankel | commutator
    std::string route = "boundary";  // ssf: boundary | principal | pushforward
    std::string format = "table";    // table | json | csv
    std::string out;                 // output path; "" = stdout
    int degree = 256;                // symbol truncation degree for families
    int size = 256;                  // matrix section dimension
    int grid = 0;                    // ssf grid point count; 0 = library default
    long seed = 0;                   // randomized-suite seed (recorded for provenance)
    std::vector<double> s_list;      // heat parameters
    std::optional<double> p;
    std::optional<int> n;
    std::optional<int> m;
    std::optional<double> a;
    std::string h;  // auxiliary symbol spec (helton_howe_monomials)
    QuadratureSettings settings;
};

json jobspec_to_json(const JobSpec& job);
// Strict inverse of jobspec_to_json: unknown keys are rejected.
JobSpec jobspec_from_json(const json& j);

// Quadrature settings as a flat JSON object with exactly the struct's field
// names; unknown keys are rejected so typos cannot silently fall back to
// defaults.
json settings_to_json(const QuadratureSettings& s);
QuadratureSettings settings_from_json(const json& j);

// Symbol expression grammar:
//   expr   := factor (("*" | "/") factor)*
//   factor := "z" ["^" int]
//           | "(" poly ")" ["^" number]
//           | "coeffs{" int ":" complex ("," int ":" complex)* "}"
//           | number
//   poly   := signed sum of coeff*z^k terms, e.g. "1 + z" or "z - 0.5"
// A string that is not in product form is retried as a bare poly, so "1+z"
// works without parentheses.  Integer-power products become rational
// families through their roots; a fractional exponent is accepted only on
// the factor (1+z), giving the twisted binomial family.  coeffs{...} builds
// an explicit coefficient symbol and must stand alone.  Parse errors report
// the position and the expected token.
FourierSymbol parse_symbol_expression(const std::string& text, int degree = 256);

// Structured symbol form: {"coeffs": {"n": c, ...}} with c a number or
// [re, im], or {"family": {"kind": ..., ...params}, "degree": d} covering
// rational / twisted_power / log_power / shift_sum / shift_plus.
FourierSymbol symbol_from_json(const json& j, int degree = 256);
json symbol_to_json(const FourierSymbol& f);

// Dispatcher: JSON object -> symbol_from_json; "@path" -> JSON file;
// anything else -> expression grammar.
FourierSymbol symbol_from_spec(const json& spec, int degree = 256);

// Scalar functions: "x", "x^k", "x^q" (fractional q), "power(q)",
// "exp_heat(s)", "resolvent(lambda)", "poly{c0,c1,...}".
ScalarFunction parse_scalar_function(const std::string& text);

// One CSV cell: 12 significant digits, shortest form %g gives.
std::string csv_number(double v);

}  // namespace ttrace
