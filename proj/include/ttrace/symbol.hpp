#pragma once

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ttrace {

using cd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// A point on the circle where |f| vanishes, together with the local model
//   |f(t)|^2 ~ |t - t0|^order * h_value,   (t - t0) f'(t)/f(t) -> g_value.
// `window` is the half-width on which the model was validated; profiles of
// distinct zeros never overlap.  `profiled` is false when no clean power law
// fits (e.g. logarithmic vanishing), in which case only `location` is valid.
struct ZeroProfile {
    double location = 0.0;
    double order = 0.0;       // exponent beta in |f|^2 ~ h |u|^beta
    cd g_value{0.0, 0.0};     // limit of (t - t0) f'/f
    double h_value = 0.0;
    double window = 0.0;
    double fit_residual = 0.0;  // rms log-residual of the fit (0 = exact)
    bool profiled = true;
};

enum class TruncationMode { Raw, Fejer };

class Family;

// Fourier symbol on the unit circle: finitely many coefficients
// f_hat(n), n in [-degree, degree], optionally backed by a closed-form
// family that supplies exact evaluation, derivatives and zero profiles.
// Value-semantic and safe to share across threads.
class FourierSymbol {
  public:
    FourierSymbol();

    static FourierSymbol from_coefficients(const std::map<int, cd>& coeffs);
    static FourierSymbol from_family(std::shared_ptr<const Family> fam, int degree,
                                     TruncationMode mode = TruncationMode::Raw);

    int degree() const { return degree_; }
    cd coeff(int n) const;
    const std::vector<cd>& raw_coeffs() const { return coeffs_; }  // index n + degree

    bool has_family() const { return family_ != nullptr; }
    const Family* family() const { return family_.get(); }
    std::shared_ptr<const Family> family_ptr() const { return family_; }
    TruncationMode truncation_mode() const { return mode_; }

    // Estimated sup-norm of (f - truncated series): sum of |f_hat| over the
    // dropped tail, from the family's coefficient decay. 0 for exact symbols.
    double truncation_residual() const { return trunc_residual_; }
    // Same tail measured in the W^{1/2} norm.
    double truncation_residual_w12() const { return trunc_residual_w12_; }

    // f(t): family evaluator when present, truncated series otherwise.
    cd evaluate(double t) const;
    cd evaluate_series(double t) const;
    cd derivative_value(double t) const;  // f'(t)
    // f'(t)/f(t) and |f(t)|^2, computed in forms that stay accurate inside
    // zero windows (closed forms for families, root factorization for
    // coefficient symbols).
    cd log_derivative(double t) const;
    double abs2(double t) const;
    // Same quantities at angle zp.location + u, with the offset u kept exact
    // (never folded into an absolute angle); accurate for u down to the
    // denormal range, far below the resolution of doubles near zp.location.
    double abs2_near(const ZeroProfile& zp, double u) const;
    cd log_derivative_near(const ZeroProfile& zp, double u) const;

    bool analytic() const;  // no negative-frequency coefficients

    FourierSymbol derivative() const;
    FourierSymbol multiply(const FourierSymbol& g) const;
    FourierSymbol conjugate() const;     // complex conjugate symbol
    FourierSymbol shift_by(cd w) const;  // f - w

    double sup_norm_estimate() const;  // upper bound for max_t |f(t)|
    double l2_norm() const;
    double sobolev_half_norm() const;  // sqrt(sum (1+|n|) |f_hat|^2)
    double sobolev_half_norm_double_integral(int grid_size = 256) const;

    cd harmonic_extension(cd z) const;
    cd analytic_extension(cd z) const;             // requires analytic()
    cd analytic_derivative(cd z, int order) const; // F^(order)(z)
    // Taylor coefficients of F at z, out[k] = F^(k)(z)/k!; order = out.size()-1.
    void analytic_jet(cd z, std::span<cd> out) const;
    // Same, with w = z - e^{i*angle} supplied in a cancellation-free form for
    // evaluation near a boundary singularity of the family.
    void analytic_jet_near(cd z, cd w, double singular_angle, std::span<cd> out) const;

    // Zeros of |f| on the circle with local profiles; cached after first call.
    const std::vector<ZeroProfile>& circle_zeros() const;
    // Zeros of the analytic extension inside the open disk (with multiplicity).
    std::vector<std::pair<cd, int>> interior_zeros() const;
    // Angles where the family is singular/vanishing on the boundary.
    std::vector<double> boundary_singular_angles() const;

  private:
    struct Cache;
    std::vector<cd> coeffs_;  // [-degree .. degree], index n + degree
    int degree_ = 0;
    std::shared_ptr<const Family> family_;
    TruncationMode mode_ = TruncationMode::Raw;
    double trunc_residual_ = 0.0;
    double trunc_residual_w12_ = 0.0;
    std::shared_ptr<Cache> cache_;

    void normalize_();
    const std::vector<std::pair<cd, int>>& poly_roots_() const;
    double abs2_series_stable_(double t) const;
    cd log_derivative_series_(double t) const;
};

// Closed-form symbol family.
class Family {
  public:
    virtual ~Family() = default;
    virtual std::string variant() const = 0;
    virtual cd eval(double t) const = 0;
    virtual cd deriv(double t) const = 0;
    virtual cd log_deriv(double t) const;  // default deriv/eval
    virtual double abs2(double t) const;   // default |eval|^2
    // Evaluation at singular_angle + u with the offset kept exact; overridden
    // by families whose closed forms are written in terms of the offset.
    virtual double abs2_near(double singular_angle, double u) const;
    virtual cd log_deriv_near(double singular_angle, double u) const;
    virtual bool analytic() const = 0;
    virtual cd disk_eval(cd z) const;  // F(z) on |z| < 1 for analytic families
    // Taylor coefficients of F at z; w = z - e^{i*singular_angle} when the
    // caller evaluates near the boundary singularity (ignored otherwise).
    virtual void disk_jet(cd z, std::optional<cd> stable_w, std::span<cd> out) const;
    virtual std::vector<ZeroProfile> circle_zero_profiles() const = 0;
    virtual std::vector<std::pair<cd, int>> interior_zeros() const { return {}; }
    virtual std::vector<double> boundary_singular_angles() const { return {}; }
    // Fourier coefficients n in [-d, d]; default: FFT of circle samples.
    virtual std::vector<cd> coefficients(int d) const;
    // Estimated sum of |f_hat(n)| over |n| > d and the matching W^{1/2} tail.
    virtual std::pair<double, double> tail_estimates(int d) const;
};

// f(t) = c * prod (e^{it} - a_k)^{n_k} / prod (e^{it} - b_j)^{m_j}
class RationalFamily : public Family {
  public:
    RationalFamily(cd scale, std::vector<std::pair<cd, int>> zeros,
                   std::vector<std::pair<cd, int>> poles);
    std::string variant() const override { return "rational"; }
    cd eval(double t) const override;
    cd deriv(double t) const override;
    cd log_deriv(double t) const override;
    double abs2(double t) const override;
    double abs2_near(double singular_angle, double u) const override;
    cd log_deriv_near(double singular_angle, double u) const override;
    bool analytic() const override;
    cd disk_eval(cd z) const override;
    void disk_jet(cd z, std::optional<cd> w, std::span<cd> out) const override;
    std::vector<ZeroProfile> circle_zero_profiles() const override;
    std::vector<std::pair<cd, int>> interior_zeros() const override;
    std::vector<double> boundary_singular_angles() const override;
    std::vector<cd> coefficients(int d) const override;
    std::pair<double, double> tail_estimates(int d) const override;

    cd scale() const { return scale_; }
    const std::vector<std::pair<cd, int>>& zeros() const { return zeros_; }
    const std::vector<std::pair<cd, int>>& poles() const { return poles_; }

  private:
    cd scale_;
    std::vector<std::pair<cd, int>> zeros_, poles_;
};

// f(t) = e^{int} (1 + e^{it})^alpha, alpha > 0
class TwistedPowerFamily : public Family {
  public:
    TwistedPowerFamily(int n, double alpha);
    std::string variant() const override { return "twisted_power"; }
    cd eval(double t) const override;
    cd deriv(double t) const override;
    cd log_deriv(double t) const override;
    double abs2(double t) const override;
    double abs2_near(double singular_angle, double u) const override;
    cd log_deriv_near(double singular_angle, double u) const override;
    bool analytic() const override { return n_ >= 0; }
    cd disk_eval(cd z) const override;
    void disk_jet(cd z, std::optional<cd> w, std::span<cd> out) const override;
    std::vector<ZeroProfile> circle_zero_profiles() const override;
    std::vector<std::pair<cd, int>> interior_zeros() const override;
    std::vector<double> boundary_singular_angles() const override { return {kPi}; }
    std::vector<cd> coefficients(int d) const override;
    std::pair<double, double> tail_estimates(int d) const override;

    int twist() const { return n_; }
    double alpha() const { return alpha_; }

  private:
    int n_;
    double alpha_;
};

// psi(z) = z / log(1+z).  reciprocal=false: F = psi^alpha;
// reciprocal=true:  F = 1 / (C - log psi).
class LogPowerFamily : public Family {
  public:
    LogPowerFamily(double alpha, double C, bool reciprocal);
    std::string variant() const override { return "log_power"; }
    cd eval(double t) const override;
    cd deriv(double t) const override;
    double abs2_near(double singular_angle, double u) const override;
    cd log_deriv_near(double singular_angle, double u) const override;
    bool analytic() const override { return true; }
    cd disk_eval(cd z) const override;
    void disk_jet(cd z, std::optional<cd> w, std::span<cd> out) const override;
    std::vector<ZeroProfile> circle_zero_profiles() const override;
    std::vector<double> boundary_singular_angles() const override { return {kPi}; }

    double alpha() const { return alpha_; }
    double C() const { return C_; }
    bool reciprocal() const { return reciprocal_; }

  private:
    double alpha_, C_;
    bool reciprocal_;
};

// f(t) = sum_{k=0}^{n-1} e^{ikt}
class ShiftSumFamily : public Family {
  public:
    explicit ShiftSumFamily(int n);
    std::string variant() const override { return "shift_sum"; }
    cd eval(double t) const override;
    cd deriv(double t) const override;
    cd log_deriv(double t) const override;
    double abs2(double t) const override;
    double abs2_near(double singular_angle, double u) const override;
    cd log_deriv_near(double singular_angle, double u) const override;
    bool analytic() const override { return true; }
    cd disk_eval(cd z) const override;
    std::vector<ZeroProfile> circle_zero_profiles() const override;
    std::vector<std::pair<cd, int>> interior_zeros() const override;
    std::vector<double> boundary_singular_angles() const override;
    std::vector<cd> coefficients(int d) const override;
    std::pair<double, double> tail_estimates(int d) const override;

    int n() const { return n_; }

  private:
    int n_;
};

// f(t) = e^{it} + a, a real >= 0
class ShiftPlusFamily : public Family {
  public:
    explicit ShiftPlusFamily(double a);
    std::string variant() const override { return "shift_plus"; }
    cd eval(double t) const override;
    cd deriv(double t) const override;
    cd log_deriv(double t) const override;
    double abs2(double t) const override;
    double abs2_near(double singular_angle, double u) const override;
    cd log_deriv_near(double singular_angle, double u) const override;
    bool analytic() const override { return true; }
    cd disk_eval(cd z) const override;
    std::vector<ZeroProfile> circle_zero_profiles() const override;
    std::vector<std::pair<cd, int>> interior_zeros() const override;
    std::vector<double> boundary_singular_angles() const override;
    std::vector<cd> coefficients(int d) const override;
    std::pair<double, double> tail_estimates(int d) const override;

    double a() const { return a_; }

  private:
    double a_;
};

// Bilinear form omega(f, g) = sum_n n f_hat(-n) g_hat(n).
cd omega_form(const FourierSymbol& f, const FourierSymbol& g);

// Fourier coefficients of samples[j] = f(2*pi*j/M): returns n in [-d, d].
std::vector<cd> coefficients_from_samples(const std::vector<cd>& samples, int d);

// Free-function aliases for the symbol operations.
inline FourierSymbol from_coefficients(const std::map<int, cd>& c) {
    return FourierSymbol::from_coefficients(c);
}
inline FourierSymbol from_family(std::shared_ptr<const Family> fam, int degree,
                                 TruncationMode mode = TruncationMode::Raw) {
    return FourierSymbol::from_family(std::move(fam), degree, mode);
}

}  // namespace ttrace
