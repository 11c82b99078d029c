#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ttrace/operators.hpp"
#include "ttrace/symbol.hpp"

namespace ttrace {

// A scalar function applied to positive self-adjoint operators through the
// spectral theorem.  Carries the metadata the trace machinery needs to pick
// an extrapolation model and to evaluate phi(x) - phi(0) without
// cancellation.
class ScalarFunction {
  public:
    enum class Kind { Power, ExpHeat, Polynomial, Resolvent, Custom };

    // x^q on [0, inf); q > 0.
    static ScalarFunction power(double q);
    // e^{-s x}; s > 0.
    static ScalarFunction exp_heat(double s);
    // sum_k coeffs[k] x^k.
    static ScalarFunction polynomial(std::vector<double> coeffs);
    // x / (lambda + x); lambda > 0.
    static ScalarFunction resolvent(double lambda);
    static ScalarFunction custom(std::function<double(double)> value,
                                 std::function<double(double)> deriv, std::string name,
                                 bool smooth_at_zero = true);

    double operator()(double x) const;
    double derivative(double x) const;
    // phi(x) - phi(0), stable for small arguments (expm1 for the heat kernel).
    double difference_from_zero(double x) const;

    Kind kind() const { return kind_; }
    // q for Power, s for ExpHeat, lambda for Resolvent; 0 otherwise.
    double parameter() const { return param_; }
    const std::vector<double>& coefficients() const { return coeffs_; }
    const std::string& name() const { return name_; }
    // False exactly when the derivative is unbounded at 0 (x^q with q < 1);
    // such functions need the slower eigenvalue-convergence model.
    bool smooth_at_zero() const { return smooth_at_zero_; }

  private:
    ScalarFunction() = default;

    Kind kind_ = Kind::Custom;
    double param_ = 0.0;
    std::vector<double> coeffs_;
    std::string name_;
    bool smooth_at_zero_ = true;
    std::function<double(double)> value_;
    std::function<double(double)> deriv_;
};

struct TraceResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int n_used = 0;
    std::string method;
};

// Eigenvalues of a Hermitian PSD matrix, ascending, with tiny negative
// rounding noise clipped to zero.  Throws if an eigenvalue is more negative
// than -1e-10 * ||H||.
Eigen::VectorXd psd_eigenvalues(const Matrix& H);

// phi(H) for Hermitian PSD H via full eigendecomposition.
Matrix matrix_function(const Matrix& H, const ScalarFunction& phi);

// Tr(phi(A_N) - phi(B_N)) for the pair A = T_f^* T_f, B = T_f T_f^*,
// assembled through exact N-sections of the infinite products.  The result
// is checked against a half-size section; for x^q with fractional q the pair
// is Richardson-extrapolated under the N^{-2q} eigenvalue-tail model, with a
// quarter-size section supplying the error estimate.
TraceResult trace_phi_difference(const FourierSymbol& f, const ScalarFunction& phi, int N);

// Tr(e^{-s B_N} - e^{-s A_N}) for each s in s_list, from one spectral
// decomposition of the pair (plus the half-size control).
std::vector<TraceResult> heat_trace(const FourierSymbol& f, const std::vector<double>& s_list,
                                    int N);

// Tr(A_N^q - B_N^q), 0 < q < 1, through the integral representation
//   x^q = (sin(pi q)/pi) * int_0^inf x/(lambda+x) lambda^{q-1} dlambda,
// i.e. (sin(pi q)/pi) int_0^inf Tr((lambda+B)^{-1} - (lambda+A)^{-1})
// lambda^q dlambda, with analytic tails at both ends.  Same data as the
// direct spectral route but through the operator-monotone machinery; serves
// as an independent-formula consistency check.
TraceResult power_trace_via_resolvent(const FourierSymbol& f, double q, int N);

// Scalar version of the same representation: should reproduce x^q.
double power_via_resolvent_scalar(double x, double q);

// Tr log(1 + D^{1/2} (lambda + B)^{-1} D^{1/2}) for PSD B and PSD
// perturbation D; equals int xi(x)/(lambda+x) dx for the shift pair.
double perturbation_log_trace(const Matrix& B, const Matrix& D, double lambda);

struct QTraceCheck {
    double lhs = 0.0;  // Tr(A^q - B^q)
    double rhs = 0.0;  // Tr((A - B)^q)
    bool holds = false;
};

// For PSD A >= B >= 0 and 0 < q < 1, Tr(A^q - B^q) <= Tr((A-B)^q).
QTraceCheck check_qtrace(const Matrix& A, const Matrix& B, double q, double slack = 1e-10);

}  // namespace ttrace
