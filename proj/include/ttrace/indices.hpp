#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "ttrace/funcalc.hpp"
#include "ttrace/quadrature.hpp"
#include "ttrace/symbol.hpp"

namespace ttrace {

// Sign conventions.  Every function in this module converts through this
// table; no route re-derives a sign locally.
//
//   winding_number(f, w)       winding of the curve t -> f(e^{it}) around w
//   fredholm_index(f)        = -winding_number(f, 0)
//   witten_index(f)          = -(1/2 pi i) p.v. oint f'/f dt
//                              (equals fredholm_index when f is zero-free)
//   principal_function(f, w) = winding_number(f, w) = -index(T_f - w)
//   spectral shift xi(x)       defined for the pair A = T_f^* T_f,
//                              B = T_f T_f^*;  xi >= 0 for analytic f, and
//                              Tr(phi(A) - phi(B)) = int phi'(x) xi(x) dx
//   heat trace Tr(e^{-sB} - e^{-sA}) -> -witten_index  as s -> infinity
//   trace_phi_difference     = Tr(phi(A) - phi(B))

struct IndexRoute {
    std::string name;  // pv_integral | heat_limit | closed_form
    double value = 0.0;
    double error = 0.0;
};

struct IndexReport {
    std::optional<int> fredholm;  // present iff f has no circle zeros
    double witten = 0.0;          // consensus value (closed form when known)
    double error = 0.0;
    std::vector<IndexRoute> routes;
    std::vector<ZeroProfile> zeros_used;
    bool routes_agree = false;
};

struct SpectralShiftFunction {
    std::vector<double> grid;  // increasing x values in (0, sup|f|^2]
    std::vector<double> xi;
    std::string route;      // boundary | principal_function | pushforward
    double residual = 0.0;  // worst imaginary remainder / consistency leftover
};

struct KreinReport {
    TraceResult matrix_trace;       // Tr(phi(A_N) - phi(B_N)), finite sections
    TraceResult ssf_integral;       // int phi'(x) xi(x) dx, boundary-route xi
    TraceResult boundary_integral;  // circle formula
    TraceResult disk_integral;      // area formula
    bool agree = false;             // pairwise within summed error bars
};

// Winding of t -> f(e^{it}) around w by adaptive argument accumulation; the
// sample count doubles until every step turns by < 2 radians and the total is
// within 0.1 of an integer.  Throws when the curve passes too close to w.
int winding_number(const FourierSymbol& f, cd w = cd(0.0, 0.0));

// -winding_number(f, 0), cross-checked against the commutator trace
// Tr([T_f, T_{1/f}]) with 1/f expanded to a truncated symbol.  Throws when f
// vanishes on the circle (use witten_index) or the cross-check disagrees.
int fredholm_index(const FourierSymbol& f);

// Witten index by independent routes: the principal-value contour integral
// (always), the s -> infinity heat-trace limit extrapolated from the integral
// side at s in {25, 50, 100, 200} under the c0 + c1 s^{-1/order} model, and
// the closed form when the symbol family carries one (rational, twisted
// power).  Throws when a circle zero has no usable local profile.
IndexReport witten_index(const FourierSymbol& f, const QuadratureSettings& settings = {});

// Principal function g(w): integer winding off the curve, principal-value
// winding of f - w when w lies on the curve.
double principal_function(const FourierSymbol& f, cd w, const QuadratureSettings& settings = {});

// Spectral shift function on the grid (64 interior points of (0, sup|f|^2]
// when empty), three independent routes:
//   spectral_shift     xi(x) = (1/2 pi i) int_{|f|^2 >= x} f'/f dt; the level
//                      set is resolved by a dense scan plus bisection
//   ssf_from_principal angular average of principal_function over the circle
//                      |w| = sqrt(x), split at the curve-crossing angles
//   ssf_pushforward    analytic symbols: derivative of the cumulative area
//                      integral of the multiplicity function m(w)
SpectralShiftFunction spectral_shift(const FourierSymbol& f, std::vector<double> grid = {},
                                     const QuadratureSettings& settings = {});
SpectralShiftFunction ssf_from_principal(const FourierSymbol& f, std::vector<double> grid = {},
                                         const QuadratureSettings& settings = {});
SpectralShiftFunction ssf_pushforward(const FourierSymbol& f, std::vector<double> grid = {},
                                      const QuadratureSettings& settings = {});

// Tr(phi(A) - phi(B)) four ways: finite sections, int phi' xi, the circle
// formula, the disk formula.
KreinReport krein_check(const FourierSymbol& f, const ScalarFunction& phi, int truncation = 256,
                        const QuadratureSettings& settings = {});

// Reference values evaluated directly from their defining formulas.
namespace closed_forms {

// Tr(|S+1|^p - |S*+1|^p) = Gamma(1+p) / (2 Gamma(1+p/2)^2)
double gamma_ratio(double p);

// index of z^n (1+z)^alpha: -(n + alpha/2)
double twisted_index(int n, double alpha);

// index of c prod(z - a_k)^{n_k} / prod(z - b_j)^{m_j}:
//   (poles inside) - (zeros inside) - (zeros on the circle)/2
double rational_index(const std::vector<std::pair<cd, int>>& zeros,
                      const std::vector<std::pair<cd, int>>& poles, double on_tol = 1e-10);

// Tr(|S+a| - |S*+a|), a > 0: complete elliptic integrals (second kind below
// a = 1, a combination of both kinds above)
double elliptic_trace(double a);

// Tr(|sum_{k<n} S^k| - |sum_{k<n} S*^k|): the closed tangent sums
double shift_sum_trace(int n);

// Tr(T_h [T_{e^{-imt}}, T_{e^{int}}]) = min(m, n) h_hat(m - n)
cd monomial_commutator_trace(const FourierSymbol& h, int m, int n);

}  // namespace closed_forms

}  // namespace ttrace
