#include "ttrace/funcalc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ttrace/parallel.hpp"

namespace ttrace {

namespace {

std::string fmt_param(const char* base, double p) {
    std::ostringstream os;
    os << base << "(" << p << ")";
    return os.str();
}

bool is_integer(double q) {
    return q == std::floor(q);
}

}  // namespace

ScalarFunction ScalarFunction::power(double q) {
    if (!(q > 0.0)) throw std::invalid_argument("ScalarFunction::power: exponent must be > 0");
    ScalarFunction f;
    f.kind_ = Kind::Power;
    f.param_ = q;
    f.name_ = fmt_param("power", q);
    f.smooth_at_zero_ = q >= 1.0;
    return f;
}

ScalarFunction ScalarFunction::exp_heat(double s) {
    if (!(s > 0.0)) throw std::invalid_argument("ScalarFunction::exp_heat: s must be > 0");
    ScalarFunction f;
    f.kind_ = Kind::ExpHeat;
    f.param_ = s;
    f.name_ = fmt_param("exp_heat", s);
    return f;
}

ScalarFunction ScalarFunction::polynomial(std::vector<double> coeffs) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    ScalarFunction f;
    f.kind_ = Kind::Polynomial;
    f.coeffs_ = std::move(coeffs);
    std::ostringstream os;
    os << "polynomial(deg " << f.coeffs_.size() - 1 << ")";
    f.name_ = os.str();
    return f;
}

ScalarFunction ScalarFunction::resolvent(double lambda) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("ScalarFunction::resolvent: lambda must be > 0");
    ScalarFunction f;
    f.kind_ = Kind::Resolvent;
    f.param_ = lambda;
    f.name_ = fmt_param("resolvent", lambda);
    return f;
}

ScalarFunction ScalarFunction::custom(std::function<double(double)> value,
                                      std::function<double(double)> deriv, std::string name,
                                      bool smooth_at_zero) {
    ScalarFunction f;
    f.kind_ = Kind::Custom;
    f.value_ = std::move(value);
    f.deriv_ = std::move(deriv);
    f.name_ = std::move(name);
    f.smooth_at_zero_ = smooth_at_zero;
    return f;
}

double ScalarFunction::operator()(double x) const {
    switch (kind_) {
        case Kind::Power:
            if (x < 0.0) throw std::domain_error("ScalarFunction: power of negative argument");
            return std::pow(x, param_);
        case Kind::ExpHeat:
            return std::exp(-param_ * x);
        case Kind::Polynomial: {
            double v = 0.0;
            for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * x + *it;
            return v;
        }
        case Kind::Resolvent:
            return x / (param_ + x);
        case Kind::Custom:
            return value_(x);
    }
    return 0.0;
}

double ScalarFunction::derivative(double x) const {
    switch (kind_) {
        case Kind::Power:
            if (x < 0.0) throw std::domain_error("ScalarFunction: power of negative argument");
            if (x == 0.0) {
                if (param_ > 1.0) return 0.0;
                if (param_ == 1.0) return 1.0;
                return std::numeric_limits<double>::infinity();
            }
            return param_ * std::pow(x, param_ - 1.0);
        case Kind::ExpHeat:
            return -param_ * std::exp(-param_ * x);
        case Kind::Polynomial: {
            double v = 0.0;
            for (std::size_t k = coeffs_.size(); k-- > 1;)
                v = v * x + static_cast<double>(k) * coeffs_[k];
            return v;
        }
        case Kind::Resolvent: {
            double d = param_ + x;
            return param_ / (d * d);
        }
        case Kind::Custom:
            if (!deriv_) throw std::logic_error("ScalarFunction: no derivative supplied");
            return deriv_(x);
    }
    return 0.0;
}

double ScalarFunction::difference_from_zero(double x) const {
    switch (kind_) {
        case Kind::Power:
            if (x < 0.0) throw std::domain_error("ScalarFunction: power of negative argument");
            return std::pow(x, param_);
        case Kind::ExpHeat:
            return std::expm1(-param_ * x);
        case Kind::Polynomial: {
            double v = 0.0;
            for (std::size_t k = coeffs_.size(); k-- > 1;) v = v * x + coeffs_[k];
            return v * x;
        }
        case Kind::Resolvent:
            return x / (param_ + x);
        case Kind::Custom:
            return value_(x) - value_(0.0);
    }
    return 0.0;
}

Eigen::VectorXd psd_eigenvalues(const Matrix& H) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("psd_eigenvalues: eigensolver failed");
    Eigen::VectorXd ev = es.eigenvalues();
    double scale = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
    double tol = 1e-10 * std::max(scale, 1e-300);
    for (int i = 0; i < ev.size(); ++i) {
        if (ev[i] < -tol)
            throw std::runtime_error("psd_eigenvalues: matrix is not positive semidefinite");
        if (ev[i] < 0.0) ev[i] = 0.0;
    }
    return ev;
}

Matrix matrix_function(const Matrix& H, const ScalarFunction& phi) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("matrix_function: eigensolver failed");
    Eigen::VectorXd ev = es.eigenvalues();
    double scale = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
    double tol = 1e-10 * std::max(scale, 1e-300);
    Eigen::VectorXd fe(ev.size());
    for (int i = 0; i < ev.size(); ++i) {
        double x = ev[i];
        if (x < -tol)
            throw std::runtime_error("matrix_function: matrix is not positive semidefinite");
        if (x < 0.0) x = 0.0;
        fe[i] = phi(x);
    }
    return es.eigenvectors() * fe.asDiagonal() * es.eigenvectors().adjoint();
}

namespace {

struct SpectralPair {
    Eigen::VectorXd a;  // eigenvalues of the A-section, ascending
    Eigen::VectorXd b;  // eigenvalues of the B-section, ascending
    int N = 0;
};

SpectralPair spectral_pair(const FourierSymbol& f, int N) {
    auto sp = product_sections(f, N);
    SpectralPair out;
    out.a = psd_eigenvalues(sp.A);
    out.b = psd_eigenvalues(sp.B);
    out.N = N;
    return out;
}

// Tr(phi(A) - phi(B)) from the two eigenvalue lists.  Summing
// phi(x) - phi(0) keeps the terms small when phi is nearly constant.
double phi_trace_from_pair(const SpectralPair& p, const ScalarFunction& phi) {
    std::vector<double> ta(p.a.size()), tb(p.b.size());
    for (int i = 0; i < p.a.size(); ++i) ta[i] = phi.difference_from_zero(p.a[i]);
    for (int i = 0; i < p.b.size(); ++i) tb[i] = phi.difference_from_zero(p.b[i]);
    return pairwise_sum(ta) - pairwise_sum(tb);
}

// Two-point extrapolation under the model V(M) = V + c M^{-2q}.
double richardson(double v_big, int n_big, double v_small, int n_small, double q) {
    if (n_big <= n_small) return v_big;
    double r = std::pow(static_cast<double>(n_big) / n_small, 2.0 * q);
    return (r * v_big - v_small) / (r - 1.0);
}

}  // namespace

TraceResult trace_phi_difference(const FourierSymbol& f, const ScalarFunction& phi, int N) {
    int d = std::max(1, f.degree());
    if (N < d)
        throw std::invalid_argument(
            "trace_phi_difference: section size below symbol degree gives corner-contaminated "
            "products");
    int m2 = std::max(d, N / 2);
    SpectralPair pN = spectral_pair(f, N);
    SpectralPair p2 = m2 < N ? spectral_pair(f, m2) : pN;
    double vN = phi_trace_from_pair(pN, phi);
    double v2 = m2 < N ? phi_trace_from_pair(p2, phi) : vN;

    TraceResult out;
    out.n_used = N;

    bool fractional_power =
        phi.kind() == ScalarFunction::Kind::Power && !is_integer(phi.parameter());
    if (fractional_power && m2 < N) {
        // Eigenvalues accumulating at the bottom of the spectrum converge at
        // the slow M^{-2q} rate when |f| vanishes on the circle; extrapolate
        // and use a quarter-size section to bound what remains.
        double q = phi.parameter();
        int m4 = std::max(d, m2 / 2);
        double v4 = v2;
        if (m4 < m2) v4 = phi_trace_from_pair(spectral_pair(f, m4), phi);
        double eN = richardson(vN, N, v2, m2, q);
        double e2 = m4 < m2 ? richardson(v2, m2, v4, m4, q) : eN;
        out.value = eN;
        out.error_estimate = std::abs(eN - e2) + 1e-14 * (1.0 + std::abs(eN));
        out.method = "eig-richardson";
    } else if (m2 < N) {
        out.value = vN;
        out.error_estimate = std::abs(vN - v2) + 1e-14 * (1.0 + std::abs(vN));
        out.method = "eig-pair";
    } else {
        // no smaller section fits the symbol degree, so there is nothing to
        // compare against; refuse to understate the uncertainty
        out.value = vN;
        out.error_estimate = 0.1 * std::abs(vN) + 1e-12;
        out.method = "eig-single";
    }
    return out;
}

std::vector<TraceResult> heat_trace(const FourierSymbol& f, const std::vector<double>& s_list,
                                    int N) {
    int d = std::max(1, f.degree());
    if (N < d)
        throw std::invalid_argument(
            "heat_trace: section size below symbol degree gives corner-contaminated products");
    int m2 = std::max(d, N / 2);
    SpectralPair pN = spectral_pair(f, N);
    SpectralPair p2 = m2 < N ? spectral_pair(f, m2) : pN;

    std::vector<TraceResult> out;
    out.reserve(s_list.size());
    for (double s : s_list) {
        auto phi = ScalarFunction::exp_heat(s);
        // Tr(e^{-sB} - e^{-sA}) = -Tr(phi(A) - phi(B))
        double vN = -phi_trace_from_pair(pN, phi);
        double v2 = m2 < N ? -phi_trace_from_pair(p2, phi) : vN;
        TraceResult r;
        r.value = vN;
        r.error_estimate = m2 < N ? std::abs(vN - v2) + 1e-14 * (1.0 + std::abs(vN))
                                  : 0.1 * std::abs(vN) + 1e-12;
        r.n_used = N;
        r.method = "eig-heat";
        out.push_back(r);
    }
    return out;
}

namespace {

// int_0^inf lambda^q * sum_i [1/(lambda+b_i) - 1/(lambda+a_i)] dlambda for
// one eigenvalue pair list, without the sin(pi q)/pi prefactor.
double resolvent_moment_integral(const SpectralPair& p, double q) {
    const int n = static_cast<int>(p.a.size());
    double top = std::max({p.a[n - 1], p.b[n - 1], 1e-300});
    double tau = 1e-12 * top;

    // split off exact/near-zero modes; they carry the lambda^{q-1} tail
    int za = 0, zb = 0;
    double min_nz = top;
    for (int i = 0; i < n; ++i) {
        if (p.a[i] <= tau)
            ++za;
        else
            min_nz = std::min(min_nz, p.a[i]);
        if (p.b[i] <= tau)
            ++zb;
        else
            min_nz = std::min(min_nz, p.b[i]);
    }

    double lam0 = 0.3 * min_nz;
    double lam1 = top * std::exp(25.0);

    // [0, lam0]: zero modes exactly, the rest by Taylor expansion of the
    // resolvent about lambda = 0 (ratio <= 0.3 by choice of lam0)
    double tail_lo = static_cast<double>(zb - za) * std::pow(lam0, q) / q;
    double taylor = 0.0;
    double lam0_pow = std::pow(lam0, q + 1.0);
    for (int k = 1; k <= 60; ++k) {
        double mk = 0.0;
        for (int i = 0; i < n; ++i) {
            if (p.b[i] > tau) mk += std::pow(p.b[i], -static_cast<double>(k));
            if (p.a[i] > tau) mk -= std::pow(p.a[i], -static_cast<double>(k));
        }
        double term = (k % 2 == 1 ? 1.0 : -1.0) * mk * lam0_pow / (q + k);
        taylor += term;
        lam0_pow *= lam0;
        if (std::abs(term) < 1e-18 * (std::abs(taylor) + 1e-300)) break;
    }

    // [lam1, inf): expand in 1/lambda; traces of powers give the moments
    double d1 = 0.0, d2 = 0.0, d3 = 0.0;
    for (int i = 0; i < n; ++i) {
        d1 += p.a[i] - p.b[i];
        d2 += p.a[i] * p.a[i] - p.b[i] * p.b[i];
        d3 += p.a[i] * p.a[i] * p.a[i] - p.b[i] * p.b[i] * p.b[i];
    }
    double tail_hi = d1 * std::pow(lam1, q - 1.0) / (1.0 - q) -
                     d2 * std::pow(lam1, q - 2.0) / (2.0 - q) +
                     d3 * std::pow(lam1, q - 3.0) / (3.0 - q);

    // middle section numerically in u = log lambda
    auto integrand = [&](double u) {
        double lam = std::exp(u);
        double h = 0.0;
        for (int i = 0; i < n; ++i) h += 1.0 / (lam + p.b[i]) - 1.0 / (lam + p.a[i]);
        return std::exp(u * (q + 1.0)) * h;
    };
    double gk_err = 0.0;
    double mid = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        integrand, std::log(lam0), std::log(lam1), 12, 1e-12, &gk_err);

    return tail_lo + taylor + mid + tail_hi;
}

}  // namespace

TraceResult power_trace_via_resolvent(const FourierSymbol& f, double q, int N) {
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("power_trace_via_resolvent: need 0 < q < 1");
    int d = std::max(1, f.degree());
    if (N < d)
        throw std::invalid_argument(
            "power_trace_via_resolvent: section size below symbol degree gives "
            "corner-contaminated products");
    double pref = std::sin(q * kPi) / kPi;

    int m2 = std::max(d, N / 2);
    int m4 = std::max(d, m2 / 2);
    SpectralPair pN = spectral_pair(f, N);
    double vN = pref * resolvent_moment_integral(pN, q);
    double v2 = vN, v4 = vN;
    if (m2 < N) v2 = pref * resolvent_moment_integral(spectral_pair(f, m2), q);
    if (m4 < m2) v4 = pref * resolvent_moment_integral(spectral_pair(f, m4), q);

    double eN = m2 < N ? richardson(vN, N, v2, m2, q) : vN;
    double e2 = m4 < m2 ? richardson(v2, m2, v4, m4, q) : eN;

    TraceResult out;
    out.value = eN;
    out.error_estimate = m2 < N ? std::abs(eN - e2) + 1e-13 * (1.0 + std::abs(eN))
                                : 0.1 * std::abs(eN) + 1e-12;
    out.n_used = N;
    out.method = "resolvent-richardson";
    return out;
}

double power_via_resolvent_scalar(double x, double q) {
    if (!(x > 0.0)) throw std::invalid_argument("power_via_resolvent_scalar: need x > 0");
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("power_via_resolvent_scalar: need 0 < q < 1");
    // lambda = x e^u turns the moment integral into x^q int e^{uq}/(1+e^u) du
    const double U = 60.0;
    auto integrand = [q](double u) { return std::exp(u * q) / (1.0 + std::exp(u)); };
    double mid = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        integrand, -U, U, 10, 1e-13);
    double tails = std::exp(-U * q) / q + std::exp(-U * (1.0 - q)) / (1.0 - q);
    return std::sin(q * kPi) / kPi * std::pow(x, q) * (mid + tails);
}

double perturbation_log_trace(const Matrix& B, const Matrix& D, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("perturbation_log_trace: need lambda > 0");
    if (B.rows() != D.rows()) throw std::invalid_argument("perturbation_log_trace: size mismatch");
    Eigen::SelfAdjointEigenSolver<Matrix> esD(D);
    if (esD.info() != Eigen::Success)
        throw std::runtime_error("perturbation_log_trace: eigensolver failed");
    Eigen::VectorXd dv = esD.eigenvalues();
    double scale = std::max(std::abs(dv[0]), std::abs(dv[dv.size() - 1]));
    Eigen::VectorXd root(dv.size());
    for (int i = 0; i < dv.size(); ++i) {
        if (dv[i] < -1e-10 * std::max(scale, 1e-300))
            throw std::runtime_error("perturbation_log_trace: perturbation is not PSD");
        root[i] = std::sqrt(std::max(dv[i], 0.0));
    }
    Matrix Dh = esD.eigenvectors() * root.asDiagonal() * esD.eigenvectors().adjoint();
    Matrix shifted = B + lambda * Matrix::Identity(B.rows(), B.cols());
    Matrix M = Dh * shifted.ldlt().solve(Dh);
    M = 0.5 * (M + M.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> esM(M, Eigen::EigenvaluesOnly);
    double total = 0.0;
    for (int i = 0; i < esM.eigenvalues().size(); ++i)
        total += std::log1p(std::max(esM.eigenvalues()[i], 0.0));
    return total;
}

QTraceCheck check_qtrace(const Matrix& A, const Matrix& B, double q, double slack) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("check_qtrace: need 0 < q < 1");
    Eigen::VectorXd ea = psd_eigenvalues(A);
    Eigen::VectorXd eb = psd_eigenvalues(B);
    Eigen::VectorXd ed = psd_eigenvalues(A - B);
    QTraceCheck out;
    for (int i = 0; i < ea.size(); ++i) out.lhs += std::pow(ea[i], q) - std::pow(eb[i], q);
    for (int i = 0; i < ed.size(); ++i) out.rhs += std::pow(ed[i], q);
    out.holds = out.lhs <= out.rhs + slack * std::max(1.0, std::abs(out.rhs));
    return out;
}

}  // namespace ttrace
