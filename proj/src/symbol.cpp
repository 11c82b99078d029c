#include "ttrace/symbol.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ttrace/fft.hpp"
#include "ttrace/jet.hpp"

namespace ttrace {

namespace {

double wrap_angle(double t) {
    // reduce to [0, 2*pi)
    t = std::fmod(t, kTwoPi);
    if (t < 0) t += kTwoPi;
    return t;
}

double angle_dist(double a, double b) {
    double d = std::abs(wrap_angle(a) - wrap_angle(b));
    return std::min(d, kTwoPi - d);
}

// |e^{it} - r|^2 without cancellation: with r = rho * e^{i*theta},
// |e^{it} - r|^2 = (1-rho)^2 + 4 rho sin^2((t-theta)/2).
double abs2_circle_factor(double t, cd r) {
    double rho = std::abs(r);
    if (rho == 0.0) return 1.0;
    double theta = std::arg(r);
    double s = std::sin(0.5 * (t - theta));
    double d = 1.0 - rho;
    return d * d + 4.0 * rho * s * s;
}

// e^{it} - r in a form exact near the root: e^{i*theta} * ((1-rho) - 2 sin^2(D/2) + i sin D)
cd diff_circle_factor(double t, cd r) {
    double rho = std::abs(r);
    cd eit(std::cos(t), std::sin(t));
    if (rho == 0.0) return eit;
    double theta = std::arg(r);
    double D = t - theta;
    double sh = std::sin(0.5 * D);
    // e^{it} - rho e^{i theta} = e^{i theta} (e^{iD} - rho), and
    // e^{iD} - rho = ((1 - rho) - 2 sin^2(D/2)) + i sin D.
    cd body(1.0 - rho - 2.0 * sh * sh, std::sin(D));
    return cd(std::cos(theta), std::sin(theta)) * body;
}

std::vector<cd> poly_roots_companion(const std::vector<cd>& coeffs) {
    // roots of sum coeffs[k] z^k, coeffs.back() != 0
    const int n = static_cast<int>(coeffs.size()) - 1;
    if (n < 1) return {};
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -coeffs[i] / coeffs[n];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    std::vector<cd> roots(n);
    for (int i = 0; i < n; ++i) roots[i] = es.eigenvalues()[i];
    return roots;
}

}  // namespace

// ---------------- Family defaults ----------------

cd Family::log_deriv(double t) const {
    cd v = eval(t);
    return deriv(t) / v;
}

double Family::abs2_near(double singular_angle, double u) const {
    return abs2(singular_angle + u);
}

cd Family::log_deriv_near(double singular_angle, double u) const {
    return log_deriv(singular_angle + u);
}

double Family::abs2(double t) const {
    return std::norm(eval(t));
}

cd Family::disk_eval(cd) const {
    throw std::domain_error("disk_eval: family is not analytic");
}

void Family::disk_jet(cd, std::optional<cd>, std::span<cd>) const {
    throw std::domain_error("disk_jet: not available for this family");
}

std::vector<cd> Family::coefficients(int d) const {
    std::size_t M = next_pow2(std::max<std::size_t>(4096, 8 * (d + 1)));
    std::vector<cd> samples(M);
    for (std::size_t j = 0; j < M; ++j) samples[j] = eval(kTwoPi * j / M);
    auto c = coefficients_from_samples(samples, d);
    if (analytic()) {
        for (int n = -d; n < 0; ++n) c[n + d] = cd(0.0, 0.0);
    }
    return c;
}

std::pair<double, double> Family::tail_estimates(int d) const {
    // Measure the decay on [d, 4d] and extend by the octave ratio.
    int big = 4 * (d + 1);
    auto c = coefficients(big);
    auto mag = [&](int n) { return std::abs(c[n + big]); };
    double s_mid = 0.0, s_hi = 0.0, w_mid = 0.0, w_hi = 0.0;
    for (int n = d + 1; n <= 2 * d + 1; ++n) {
        s_mid += mag(n) + mag(-n);
        w_mid += (1.0 + n) * (std::norm(c[n + big]) + std::norm(c[-n + big]));
    }
    for (int n = 2 * d + 2; n <= big; ++n) {
        s_hi += mag(n) + mag(-n);
        w_hi += (1.0 + n) * (std::norm(c[n + big]) + std::norm(c[-n + big]));
    }
    double ratio = s_mid > 0 ? std::min(0.95, s_hi / s_mid) : 0.0;
    double tail_sup = s_mid + s_hi / (1.0 - ratio);
    double wr = w_mid > 0 ? std::min(0.95, w_hi / w_mid) : 0.0;
    double tail_w12 = std::sqrt(w_mid + w_hi / (1.0 - wr));
    return {tail_sup, tail_w12};
}

// ---------------- FourierSymbol ----------------

struct FourierSymbol::Cache {
    std::mutex m;
    bool zeros_ready = false;
    std::vector<ZeroProfile> zeros;
    bool roots_ready = false;
    std::vector<std::pair<cd, int>> roots;  // roots of the Laurent numerator
    double roots_prefactor2 = 1.0;          // |leading coeff|^2
};

FourierSymbol::FourierSymbol() : coeffs_(1, cd(0.0, 0.0)), cache_(std::make_shared<Cache>()) {}

void FourierSymbol::normalize_() {
    // shrink support to the smallest symmetric window
    int d = degree_;
    int hi = -d - 1, lo = d + 1;
    for (int n = -d; n <= d; ++n) {
        if (std::abs(coeffs_[n + d]) != 0.0) {
            lo = std::min(lo, n);
            hi = std::max(hi, n);
        }
    }
    if (hi < lo) {  // all zero
        coeffs_.assign(1, cd(0.0, 0.0));
        degree_ = 0;
        return;
    }
    int nd = std::max(std::abs(lo), std::abs(hi));
    if (nd == d) return;
    std::vector<cd> nc(2 * nd + 1, cd(0.0, 0.0));
    for (int n = -nd; n <= nd; ++n) nc[n + nd] = coeffs_[n + d];
    coeffs_ = std::move(nc);
    degree_ = nd;
}

FourierSymbol FourierSymbol::from_coefficients(const std::map<int, cd>& coeffs) {
    int d = 0;
    for (const auto& [n, c] : coeffs)
        if (std::abs(c) != 0.0) d = std::max(d, std::abs(n));
    FourierSymbol f;
    f.degree_ = d;
    f.coeffs_.assign(2 * d + 1, cd(0.0, 0.0));
    for (const auto& [n, c] : coeffs)
        if (std::abs(n) <= d) f.coeffs_[n + d] = c;
    f.cache_ = std::make_shared<Cache>();
    return f;
}

FourierSymbol FourierSymbol::from_family(std::shared_ptr<const Family> fam, int degree,
                                         TruncationMode mode) {
    if (!fam) throw std::invalid_argument("from_family: null family");
    if (degree < 0) throw std::invalid_argument("from_family: negative degree");
    FourierSymbol f;
    f.family_ = std::move(fam);
    f.mode_ = mode;
    f.degree_ = degree;
    f.coeffs_ = f.family_->coefficients(degree);
    auto [tail_sup, tail_w12] = f.family_->tail_estimates(degree);
    if (mode == TruncationMode::Fejer) {
        double extra_sup = 0.0, extra_w12 = 0.0;
        for (int n = -degree; n <= degree; ++n) {
            double w = 1.0 - std::abs(n) / (degree + 1.0);
            cd dropped = f.coeffs_[n + degree] * (1.0 - w);
            extra_sup += std::abs(dropped);
            extra_w12 += (1.0 + std::abs(n)) * std::norm(dropped);
            f.coeffs_[n + degree] *= w;
        }
        tail_sup += extra_sup;
        tail_w12 = std::sqrt(tail_w12 * tail_w12 + extra_w12);
    }
    f.trunc_residual_ = tail_sup;
    f.trunc_residual_w12_ = tail_w12;
    f.cache_ = std::make_shared<Cache>();
    return f;
}

cd FourierSymbol::coeff(int n) const {
    if (std::abs(n) > degree_) return cd(0.0, 0.0);
    return coeffs_[n + degree_];
}

cd FourierSymbol::evaluate(double t) const {
    if (family_) return family_->eval(t);
    return evaluate_series(t);
}

cd FourierSymbol::evaluate_series(double t) const {
    // Horner in z = e^{it}, then multiply by z^{-degree}
    cd z(std::cos(t), std::sin(t));
    cd s(0.0, 0.0);
    for (int k = 2 * degree_; k >= 0; --k) s = s * z + coeffs_[k];
    cd zc = std::conj(z);
    cd zmd(1.0, 0.0);
    for (int k = 0; k < degree_; ++k) zmd *= zc;
    return s * zmd;
}

cd FourierSymbol::derivative_value(double t) const {
    if (family_) return family_->deriv(t);
    cd z(std::cos(t), std::sin(t));
    cd acc(0.0, 0.0);
    for (int k = 2 * degree_; k >= 0; --k) {
        acc = acc * z + cd(0.0, 1.0) * static_cast<double>(k - degree_) * coeffs_[k];
    }
    cd zmd(1.0, 0.0);
    cd zc = std::conj(z);
    for (int k = 0; k < degree_; ++k) zmd *= zc;
    return acc * zmd;
}

bool FourierSymbol::analytic() const {
    for (int n = -degree_; n < 0; ++n)
        if (std::abs(coeffs_[n + degree_]) != 0.0) return false;
    if (family_) return family_->analytic();
    return true;
}

const std::vector<std::pair<cd, int>>& FourierSymbol::poly_roots_() const {
    std::lock_guard<std::mutex> lock(cache_->m);
    if (cache_->roots_ready) return cache_->roots;
    // f(t) = e^{-i d t} P(e^{it}) with P(z) = sum coeffs_[k] z^k
    std::vector<cd> p = coeffs_;
    int hi = static_cast<int>(p.size()) - 1;
    while (hi > 0 && std::abs(p[hi]) == 0.0) --hi;
    p.resize(hi + 1);
    int lo = 0;
    while (lo < hi && std::abs(p[lo]) == 0.0) ++lo;
    std::vector<std::pair<cd, int>> roots;
    if (lo > 0) roots.push_back({cd(0.0, 0.0), lo});
    std::vector<cd> q(p.begin() + lo, p.end());
    if (q.size() >= 2) {
        for (cd r : poly_roots_companion(q)) roots.push_back({r, 1});
    }
    cache_->roots_prefactor2 = std::norm(q.back());
    cache_->roots = std::move(roots);
    cache_->roots_ready = true;
    return cache_->roots;
}

double FourierSymbol::abs2_series_stable_(double t) const {
    const auto& roots = poly_roots_();
    double v;
    {
        std::lock_guard<std::mutex> lock(cache_->m);
        v = cache_->roots_prefactor2;
    }
    for (const auto& [r, m] : roots) {
        double f = abs2_circle_factor(t, r);
        for (int k = 0; k < m; ++k) v *= f;
    }
    return v;
}

cd FourierSymbol::log_derivative_series_(double t) const {
    const auto& roots = poly_roots_();
    cd eit(std::cos(t), std::sin(t));
    cd s(0.0, -static_cast<double>(degree_));  // -i d
    for (const auto& [r, m] : roots) {
        cd den = diff_circle_factor(t, r);
        s += static_cast<double>(m) * cd(0.0, 1.0) * eit / den;
    }
    return s;
}

double FourierSymbol::abs2(double t) const {
    if (family_) return family_->abs2(t);
    const auto& zs = circle_zeros();
    for (const auto& z : zs) {
        if (angle_dist(t, z.location) < 1e-3) return abs2_series_stable_(t);
    }
    return std::norm(evaluate_series(t));
}

cd FourierSymbol::log_derivative(double t) const {
    if (family_) return family_->log_deriv(t);
    const auto& zs = circle_zeros();
    for (const auto& z : zs) {
        if (angle_dist(t, z.location) < 1e-3) return log_derivative_series_(t);
    }
    cd v = evaluate_series(t);
    return derivative_value(t) / v;
}

namespace {
// a - b wrapped to (-pi, pi]
double signed_angle_diff(double a, double b) {
    double d = std::fmod(a - b, kTwoPi);
    if (d <= -kPi) d += kTwoPi;
    if (d > kPi) d -= kTwoPi;
    return d;
}
}  // namespace

double FourierSymbol::abs2_near(const ZeroProfile& zp, double u) const {
    if (family_) return family_->abs2_near(zp.location, u);
    const auto& roots = poly_roots_();
    double v;
    {
        std::lock_guard<std::mutex> lock(cache_->m);
        v = cache_->roots_prefactor2;
    }
    double t = zp.location + u;
    for (const auto& [r, m] : roots) {
        double rho = std::abs(r);
        double f;
        if (rho > 0.0 && angle_dist(zp.location, std::arg(r)) < 1e-6) {
            // root underneath this zero: keep the offset exact
            double d = signed_angle_diff(zp.location, std::arg(r)) + u;
            double sn = std::sin(0.5 * d);
            f = (1.0 - rho) * (1.0 - rho) + 4.0 * rho * sn * sn;
        } else {
            f = abs2_circle_factor(t, r);
        }
        for (int k = 0; k < m; ++k) v *= f;
    }
    return v;
}

cd FourierSymbol::log_derivative_near(const ZeroProfile& zp, double u) const {
    if (family_) return family_->log_deriv_near(zp.location, u);
    const auto& roots = poly_roots_();
    double t = zp.location + u;
    cd eit(std::cos(t), std::sin(t));
    cd s(0.0, -static_cast<double>(degree_));  // -i d
    for (const auto& [r, m] : roots) {
        double rho = std::abs(r);
        if (rho > 0.0 && angle_dist(zp.location, std::arg(r)) < 1e-6) {
            // i e^{it}/(e^{it} - r) = i e^{id}/(e^{id} - rho), d exact
            double d = signed_angle_diff(zp.location, std::arg(r)) + u;
            double sn = std::sin(0.5 * d);
            cd den((1.0 - rho) - 2.0 * sn * sn, std::sin(d));
            cd eid(std::cos(d), std::sin(d));
            s += static_cast<double>(m) * cd(0.0, 1.0) * eid / den;
        } else {
            cd den = diff_circle_factor(t, r);
            s += static_cast<double>(m) * cd(0.0, 1.0) * eit / den;
        }
    }
    return s;
}

FourierSymbol FourierSymbol::derivative() const {
    FourierSymbol g;
    g.degree_ = degree_;
    g.coeffs_.assign(2 * degree_ + 1, cd(0.0, 0.0));
    for (int n = -degree_; n <= degree_; ++n)
        g.coeffs_[n + degree_] = cd(0.0, static_cast<double>(n)) * coeffs_[n + degree_];
    g.cache_ = std::make_shared<Cache>();
    g.normalize_();
    return g;
}

FourierSymbol FourierSymbol::multiply(const FourierSymbol& other) const {
    int d = degree_ + other.degree_;
    FourierSymbol g;
    g.degree_ = d;
    g.coeffs_.assign(2 * d + 1, cd(0.0, 0.0));
    for (int a = -degree_; a <= degree_; ++a) {
        cd ca = coeffs_[a + degree_];
        if (std::abs(ca) == 0.0) continue;
        for (int b = -other.degree_; b <= other.degree_; ++b) {
            g.coeffs_[a + b + d] += ca * other.coeffs_[b + other.degree_];
        }
    }
    g.cache_ = std::make_shared<Cache>();
    g.normalize_();
    return g;
}

FourierSymbol FourierSymbol::conjugate() const {
    FourierSymbol g;
    g.degree_ = degree_;
    g.coeffs_.assign(2 * degree_ + 1, cd(0.0, 0.0));
    for (int n = -degree_; n <= degree_; ++n)
        g.coeffs_[n + degree_] = std::conj(coeffs_[-n + degree_]);
    g.cache_ = std::make_shared<Cache>();
    g.normalize_();
    return g;
}

FourierSymbol FourierSymbol::shift_by(cd w) const {
    FourierSymbol g = *this;
    g.family_.reset();
    g.coeffs_[degree_] -= w;  // constant term
    g.cache_ = std::make_shared<Cache>();
    g.normalize_();
    return g;
}

double FourierSymbol::sup_norm_estimate() const {
    if (family_) {
        int M = 16384;
        double mx = 0.0;
        for (int j = 0; j < M; ++j) mx = std::max(mx, std::abs(family_->eval(kTwoPi * j / M)));
        return mx * 1.02;
    }
    int M = std::max(4096, 64 * std::max(1, degree_));
    double mx = 0.0;
    for (int j = 0; j < M; ++j) mx = std::max(mx, std::abs(evaluate_series(kTwoPi * j / M)));
    double slack = kPi * degree_ / M;  // Bernstein: |f'| <= d sup|f|
    return mx / (1.0 - slack);
}

double FourierSymbol::l2_norm() const {
    double s = 0.0;
    for (const auto& c : coeffs_) s += std::norm(c);
    return std::sqrt(s);
}

double FourierSymbol::sobolev_half_norm() const {
    double s = 0.0;
    for (int n = -degree_; n <= degree_; ++n)
        s += (1.0 + std::abs(n)) * std::norm(coeffs_[n + degree_]);
    return std::sqrt(s);
}

double FourierSymbol::sobolev_half_norm_double_integral(int grid_size) const {
    const int M = std::max(grid_size, 4 * degree_ + 8);
    std::vector<cd> fv(M), dv(M);
    for (int j = 0; j < M; ++j) {
        double t = kTwoPi * j / M;
        fv[j] = evaluate_series(t);
        dv[j] = derivative_value(t);
    }
    // mean square (Parseval piece) on the same grid
    double a = 0.0;
    for (int j = 0; j < M; ++j) a += std::norm(fv[j]);
    a /= M;
    // double integral with the diagonal cell replaced by the s -> t limit
    // |f'(t)|^2 of the integrand (the 0/0 diagonal).
    double b = 0.0;
    for (int i = 0; i < M; ++i) {
        double row = 0.0;
        for (int j = 0; j < M; ++j) {
            if (i == j) {
                row += std::norm(dv[i]);
            } else {
                double s = std::sin(kPi * (i - j) / M);
                row += std::norm(fv[i] - fv[j]) / (4.0 * s * s);
            }
        }
        b += row;
    }
    b /= static_cast<double>(M) * M;
    return std::sqrt(a + b);
}

cd FourierSymbol::harmonic_extension(cd z) const {
    // sum_{n>=0} f_hat(n) z^n + sum_{n>=1} f_hat(-n) conj(z)^n
    cd s(0.0, 0.0);
    for (int n = degree_; n >= 0; --n) s = s * z + coeffs_[n + degree_];
    cd zc = std::conj(z);
    cd s2(0.0, 0.0);
    for (int n = degree_; n >= 1; --n) s2 = s2 * zc + coeffs_[-n + degree_];
    return s + s2 * zc;
}

cd FourierSymbol::analytic_extension(cd z) const {
    if (!analytic()) throw std::domain_error("analytic_extension: symbol has negative frequencies");
    if (family_) return family_->disk_eval(z);
    cd s(0.0, 0.0);
    for (int n = degree_; n >= 0; --n) s = s * z + coeffs_[n + degree_];
    return s;
}

void FourierSymbol::analytic_jet(cd z, std::span<cd> out) const {
    if (!analytic()) throw std::domain_error("analytic_jet: symbol has negative frequencies");
    if (family_) {
        family_->disk_jet(z, std::nullopt, out);
        return;
    }
    const int order = static_cast<int>(out.size()) - 1;
    for (int k = 0; k <= order; ++k) {
        // c_k = sum_{n>=k} f_hat(n) C(n,k) z^{n-k}
        cd s(0.0, 0.0);
        cd zp(1.0, 0.0);
        double bin = 1.0;  // C(n,k) for the running n
        for (int n = k; n <= degree_; ++n) {
            if (n > k) bin *= static_cast<double>(n) / (n - k);
            s += bin * coeffs_[n + degree_] * zp;
            zp *= z;
        }
        out[k] = s;
    }
}

void FourierSymbol::analytic_jet_near(cd z, cd w, double singular_angle, std::span<cd> out) const {
    if (family_) {
        family_->disk_jet(z, w, out);
        return;
    }
    (void)singular_angle;
    analytic_jet(z, out);
}

cd FourierSymbol::analytic_derivative(cd z, int order) const {
    if (order < 0) throw std::invalid_argument("analytic_derivative: negative order");
    std::vector<cd> jet(order + 1);
    analytic_jet(z, jet);
    double fact = 1.0;
    for (int k = 2; k <= order; ++k) fact *= k;
    return jet[order] * fact;
}

std::vector<std::pair<cd, int>> FourierSymbol::interior_zeros() const {
    if (family_) return family_->interior_zeros();
    if (!analytic()) return {};
    std::vector<cd> p(coeffs_.begin() + degree_, coeffs_.end());
    int hi = static_cast<int>(p.size()) - 1;
    while (hi > 0 && std::abs(p[hi]) == 0.0) --hi;
    p.resize(hi + 1);
    std::vector<std::pair<cd, int>> out;
    int lo = 0;
    while (lo < hi && std::abs(p[lo]) == 0.0) ++lo;
    if (lo > 0) out.push_back({cd(0.0, 0.0), lo});
    std::vector<cd> q(p.begin() + lo, p.end());
    if (q.size() >= 2) {
        // a multiple root on the circle splits under the companion solver
        // into a cluster straddling it; keep a guard band so the fragments
        // are owned by the circle-zero detector, not counted as interior
        for (cd r : poly_roots_companion(q))
            if (std::abs(r) < 1.0 - 2e-3) out.push_back({r, 1});
    }
    return out;
}

std::vector<double> FourierSymbol::boundary_singular_angles() const {
    if (family_) return family_->boundary_singular_angles();
    std::vector<double> out;
    for (const auto& z : circle_zeros()) out.push_back(z.location);
    return out;
}

namespace {

// Log-log power-law fit of samples (u_i, q_i), q ~ h u^beta.
struct PowerFit {
    double beta = 0.0, log_h = 0.0, rms = 0.0;
};

PowerFit fit_power_law(const std::vector<double>& u, const std::vector<double>& q) {
    const std::size_t n = u.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = std::log(u[i]), y = std::log(q[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double den = n * sxx - sx * sx;
    PowerFit f;
    f.beta = (n * sxy - sx * sy) / den;
    f.log_h = (sy - f.beta * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = std::log(q[i]) - (f.beta * std::log(u[i]) + f.log_h);
        ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    return f;
}

}  // namespace

const std::vector<ZeroProfile>& FourierSymbol::circle_zeros() const {
    {
        std::lock_guard<std::mutex> lock(cache_->m);
        if (cache_->zeros_ready) return cache_->zeros;
    }
    std::vector<ZeroProfile> zeros;
    if (family_) {
        zeros = family_->circle_zero_profiles();
    } else {
        // numeric detection on |f|^2, which is an exact trig polynomial
        FourierSymbol q = multiply(conjugate());
        double sup = sup_norm_estimate();
        double sup2 = sup * sup;
        if (sup2 == 0.0) {
            std::lock_guard<std::mutex> lock(cache_->m);
            cache_->zeros = {};
            cache_->zeros_ready = true;
            return cache_->zeros;
        }
        const int M = std::max(8192, 64 * std::max(1, degree_));
        std::vector<double> qv(M);
        for (int j = 0; j < M; ++j) qv[j] = std::real(q.evaluate_series(kTwoPi * j / M));
        double coarse = 2.5e-3 * sup2 * std::max(1.0, static_cast<double>(degree_));
        std::vector<double> candidates;
        for (int j = 0; j < M; ++j) {
            double prev = qv[(j + M - 1) % M], next = qv[(j + 1) % M];
            if (qv[j] <= prev && qv[j] <= next && qv[j] < coarse) {
                // golden-section refinement of the local minimum
                double a = kTwoPi * (j - 1) / M, b = kTwoPi * (j + 1) / M;
                const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
                double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
                double f1 = std::real(q.evaluate_series(x1)), f2 = std::real(q.evaluate_series(x2));
                for (int it = 0; it < 90; ++it) {
                    if (f1 < f2) {
                        b = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = b - gr * (b - a);
                        f1 = std::real(q.evaluate_series(x1));
                    } else {
                        a = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = a + gr * (b - a);
                        f2 = std::real(q.evaluate_series(x2));
                    }
                }
                double t0 = 0.5 * (a + b);
                if (std::real(q.evaluate_series(t0)) <= 1e-12 * sup2)
                    candidates.push_back(wrap_angle(t0));
            }
        }
        std::sort(candidates.begin(), candidates.end());
        std::vector<double> locs;
        for (double t : candidates) {
            if (locs.empty() || angle_dist(t, locs.back()) > 1e-6) locs.push_back(t);
        }
        if (!locs.empty() && locs.size() > 1 && angle_dist(locs.front(), locs.back()) < 1e-6)
            locs.pop_back();
        // a zero of order m leaves a wide plateau of |f|^2 below the noise
        // floor, and the minimum search above can fragment it into several
        // candidates; merge neighbours when |f|^2 never recovers in between
        if (locs.size() > 1) {
            std::size_t n = locs.size();
            std::vector<bool> joined(n, false);
            for (std::size_t i = 0; i < n; ++i) {
                double a = locs[i];
                double b = locs[(i + 1) % n] + (i + 1 == n ? kTwoPi : 0.0);
                double peak = 0.0;
                for (int j = 1; j < 32; ++j)
                    peak = std::max(peak,
                                    std::real(q.evaluate_series(a + (b - a) * j / 32.0)));
                joined[i] = peak < 1e-10 * sup2;
            }
            bool all_joined = true;
            for (std::size_t i = 0; i < n; ++i) all_joined = all_joined && joined[i];
            std::vector<double> merged;
            if (all_joined) {
                merged.push_back(locs[0]);
            } else {
                std::size_t start = 0;
                while (joined[(start + n - 1) % n]) ++start;  // open a cluster boundary
                for (std::size_t k = 0; k < n;) {
                    std::size_t i = (start + k) % n;
                    double best = locs[i];
                    double bestq = std::real(q.evaluate_series(best));
                    std::size_t len = 1;
                    while (len < n && joined[(i + len - 1) % n]) {
                        double cand = locs[(i + len) % n];
                        double cq = std::real(q.evaluate_series(cand));
                        if (cq < bestq) { best = cand; bestq = cq; }
                        ++len;
                    }
                    merged.push_back(best);
                    k += len;
                }
            }
            std::sort(merged.begin(), merged.end());
            locs = std::move(merged);
        }
        // snap each location to the centroid of the nearby root cluster of
        // the Laurent numerator: far more accurate than the minimum of the
        // series, whose floor is the evaluation noise.  A zero of
        // multiplicity m splits under the companion solver into a cluster of
        // radius ~eps^{1/m}, so widen the capture radius until roots appear.
        for (double& t0 : locs) {
            cd e0(std::cos(t0), std::sin(t0));
            static constexpr double kRad[] = {1e-4, 1e-3, 1e-2, 3e-2};
            static constexpr double kBand[] = {1e-6, 1e-4, 3e-3, 1e-2};
            for (int lvl = 0; lvl < 4; ++lvl) {
                cd centroid(0.0, 0.0);
                int count = 0;
                for (const auto& [r, m] : poly_roots_()) {
                    if (std::abs(r - e0) < kRad[lvl] &&
                        std::abs(std::abs(r) - 1.0) < kBand[lvl]) {
                        centroid += static_cast<double>(m) * r;
                        count += m;
                    }
                }
                if (count > 0) {
                    t0 = wrap_angle(std::arg(centroid / static_cast<double>(count)));
                    break;
                }
            }
        }
        // profile each zero by a log-log power-law fit on a one-sided geometric grid
        double min_gap = kTwoPi;
        for (std::size_t i = 0; i < locs.size() && locs.size() > 1; ++i) {
            double gap = angle_dist(locs[i], locs[(i + 1) % locs.size()]);
            min_gap = std::min(min_gap, gap);
        }
        // samples below the series evaluation noise floor carry no shape
        // information (a high-order zero pushes |f|^2 under it well before
        // the grid bottoms out) and must not enter the fit
        double l1 = 0.0;
        for (const cd& c : coeffs_) l1 += std::abs(c);
        double floor_q = 30.0 * std::pow(1e-13 * std::max(1.0, l1), 2);
        for (double t0 : locs) {
            double delta = std::min(0.15, 0.45 * min_gap);
            const int K = 32;
            std::vector<double> us, qs;
            us.reserve(K);
            qs.reserve(K);
            for (int i = 0; i < K; ++i) {
                double u = delta * std::pow(2.0, -16.0 * (K - 1 - i) / (K - 1));
                double qv2 = abs2_series_stable_(t0 + u);
                if (qv2 > floor_q && std::isfinite(qv2)) {
                    us.push_back(u);
                    qs.push_back(qv2);
                }
            }
            ZeroProfile zp;
            zp.location = t0;
            zp.window = delta;
            if (us.size() >= 12) {
                PowerFit pf = fit_power_law(us, qs);
                zp.order = pf.beta;
                zp.h_value = std::exp(pf.log_h);
                zp.fit_residual = pf.rms;
                // g from the limit of u f'/f along the same grid (linear fit in u)
                double sx = 0, sxx = 0;
                cd sy(0, 0), sxy(0, 0);
                for (double u : us) {
                    cd g = u * log_derivative_series_(t0 + u);
                    sx += u;
                    sxx += u * u;
                    sy += g;
                    sxy += u * g;
                }
                double kn = static_cast<double>(us.size());
                cd slope = (kn * sxy - sx * sy) / (kn * sxx - sx * sx);
                zp.g_value = (sy - slope * sx) / kn;
                // a clean power law fits to ~1e-4; the analytic correction of
                // a high-order zero adds ~1e-3 of genuine curvature over the
                // top decade, while a spurious fit through noise leaves >0.1
                zp.profiled = pf.rms < 4e-3 && zp.order > 0.05 && zp.order < 64.0 &&
                              std::isfinite(zp.h_value) && zp.h_value > 0.0;
            } else {
                zp.profiled = false;
            }
            zeros.push_back(zp);
        }
    }
    // clamp windows so neighbouring profiles never overlap
    if (zeros.size() > 1) {
        std::sort(zeros.begin(), zeros.end(),
                  [](const ZeroProfile& a, const ZeroProfile& b) { return a.location < b.location; });
        for (std::size_t i = 0; i < zeros.size(); ++i) {
            double gap = angle_dist(zeros[i].location, zeros[(i + 1) % zeros.size()].location);
            double gap2 = angle_dist(zeros[i].location,
                                     zeros[(i + zeros.size() - 1) % zeros.size()].location);
            zeros[i].window = std::min(zeros[i].window, 0.45 * std::min(gap, gap2));
        }
    }
    std::lock_guard<std::mutex> lock(cache_->m);
    if (!cache_->zeros_ready) {
        cache_->zeros = std::move(zeros);
        cache_->zeros_ready = true;
    }
    return cache_->zeros;
}

// ---------------- RationalFamily ----------------

RationalFamily::RationalFamily(cd scale, std::vector<std::pair<cd, int>> zeros,
                               std::vector<std::pair<cd, int>> poles)
    : scale_(scale), zeros_(std::move(zeros)), poles_(std::move(poles)) {
    if (std::abs(scale_) == 0.0) throw std::invalid_argument("rational: zero scale");
    for (const auto& [b, m] : poles_) {
        (void)m;
        if (std::abs(std::abs(b) - 1.0) < 1e-12)
            throw std::invalid_argument("rational: pole on the unit circle");
    }
    for (const auto& [a, m] : zeros_)
        if (m <= 0) throw std::invalid_argument("rational: nonpositive multiplicity");
}

cd RationalFamily::eval(double t) const {
    cd z(std::cos(t), std::sin(t));
    cd v = scale_;
    for (const auto& [a, n] : zeros_)
        for (int k = 0; k < n; ++k) v *= (z - a);
    for (const auto& [b, m] : poles_)
        for (int k = 0; k < m; ++k) v /= (z - b);
    return v;
}

cd RationalFamily::log_deriv(double t) const {
    cd eit(std::cos(t), std::sin(t));
    cd s(0.0, 0.0);
    for (const auto& [a, n] : zeros_)
        s += static_cast<double>(n) * cd(0.0, 1.0) * eit / diff_circle_factor(t, a);
    for (const auto& [b, m] : poles_)
        s -= static_cast<double>(m) * cd(0.0, 1.0) * eit / diff_circle_factor(t, b);
    return s;
}

cd RationalFamily::deriv(double t) const {
    // product rule; if a factor vanishes, differentiate that factor explicitly
    cd z(std::cos(t), std::sin(t));
    for (std::size_t i = 0; i < zeros_.size(); ++i) {
        const auto& [a, n] = zeros_[i];
        if (std::abs(z - a) < 1e-9) {
            cd rest = scale_;
            for (std::size_t j = 0; j < zeros_.size(); ++j) {
                if (j == i) continue;
                for (int k = 0; k < zeros_[j].second; ++k) rest *= (z - zeros_[j].first);
            }
            for (const auto& [b, m] : poles_)
                for (int k = 0; k < m; ++k) rest /= (z - b);
            cd fac(1.0, 0.0);
            for (int k = 0; k < n - 1; ++k) fac *= (z - a);
            return static_cast<double>(n) * fac * cd(0.0, 1.0) * z * rest;
        }
    }
    return eval(t) * log_deriv(t);
}

double RationalFamily::abs2(double t) const {
    double v = std::norm(scale_);
    for (const auto& [a, n] : zeros_) {
        double f = abs2_circle_factor(t, a);
        for (int k = 0; k < n; ++k) v *= f;
    }
    for (const auto& [b, m] : poles_) {
        double f = abs2_circle_factor(t, b);
        for (int k = 0; k < m; ++k) v /= f;
    }
    return v;
}

double RationalFamily::abs2_near(double singular_angle, double u) const {
    double t = singular_angle + u;
    double v = std::norm(scale_);
    for (const auto& [a, n] : zeros_) {
        double rho = std::abs(a);
        double f;
        if (angle_dist(singular_angle, std::arg(a)) < 1e-9 && std::abs(rho - 1.0) < 1e-9) {
            double sn = std::sin(0.5 * u);
            f = (1.0 - rho) * (1.0 - rho) + 4.0 * rho * sn * sn;
        } else {
            f = abs2_circle_factor(t, a);
        }
        for (int k = 0; k < n; ++k) v *= f;
    }
    for (const auto& [b, m] : poles_) {
        double f = abs2_circle_factor(t, b);
        for (int k = 0; k < m; ++k) v /= f;
    }
    return v;
}

cd RationalFamily::log_deriv_near(double singular_angle, double u) const {
    double t = singular_angle + u;
    cd eit(std::cos(t), std::sin(t));
    cd s(0.0, 0.0);
    for (const auto& [a, n] : zeros_) {
        double rho = std::abs(a);
        if (angle_dist(singular_angle, std::arg(a)) < 1e-9 && std::abs(rho - 1.0) < 1e-9) {
            double sn = std::sin(0.5 * u);
            cd den((1.0 - rho) - 2.0 * sn * sn, std::sin(u));
            cd eiu(std::cos(u), std::sin(u));
            s += static_cast<double>(n) * cd(0.0, 1.0) * eiu / den;
        } else {
            s += static_cast<double>(n) * cd(0.0, 1.0) * eit / diff_circle_factor(t, a);
        }
    }
    for (const auto& [b, m] : poles_)
        s -= static_cast<double>(m) * cd(0.0, 1.0) * eit / diff_circle_factor(t, b);
    return s;
}

bool RationalFamily::analytic() const {
    for (const auto& [b, m] : poles_) {
        (void)m;
        if (std::abs(b) < 1.0) return false;
    }
    return true;
}

cd RationalFamily::disk_eval(cd z) const {
    cd v = scale_;
    for (const auto& [a, n] : zeros_)
        for (int k = 0; k < n; ++k) v *= (z - a);
    for (const auto& [b, m] : poles_)
        for (int k = 0; k < m; ++k) v /= (z - b);
    return v;
}

void RationalFamily::disk_jet(cd z, std::optional<cd> w, std::span<cd> out) const {
    (void)w;
    const std::size_t order = out.size() - 1;
    Jet v = Jet::constant(scale_, order);
    Jet zj = Jet::variable(z, order);
    for (const auto& [a, n] : zeros_) {
        Jet f = zj - Jet::constant(a, order);
        for (int k = 0; k < n; ++k) v = v * f;
    }
    for (const auto& [b, m] : poles_) {
        Jet f = zj - Jet::constant(b, order);
        for (int k = 0; k < m; ++k) v = jet_div(v, f);
    }
    for (std::size_t k = 0; k <= order; ++k) out[k] = v.c[k];
}

std::vector<ZeroProfile> RationalFamily::circle_zero_profiles() const {
    std::vector<ZeroProfile> out;
    std::vector<double> locs;
    for (const auto& [a, n] : zeros_) {
        (void)n;
        if (std::abs(std::abs(a) - 1.0) < 1e-12) locs.push_back(wrap_angle(std::arg(a)));
    }
    double min_gap = kTwoPi;
    if (locs.size() > 1) {
        std::sort(locs.begin(), locs.end());
        for (std::size_t i = 0; i < locs.size(); ++i)
            min_gap = std::min(min_gap, angle_dist(locs[i], locs[(i + 1) % locs.size()]));
    }
    for (const auto& [a, n] : zeros_) {
        if (std::abs(std::abs(a) - 1.0) >= 1e-12) continue;
        ZeroProfile zp;
        zp.location = wrap_angle(std::arg(a));
        zp.order = 2.0 * n;
        zp.g_value = cd(static_cast<double>(n), 0.0);
        cd rest = scale_;
        for (const auto& [a2, n2] : zeros_) {
            if (std::abs(a2 - a) < 1e-14) continue;
            for (int k = 0; k < n2; ++k) rest *= (a - a2);
        }
        for (const auto& [b, m] : poles_)
            for (int k = 0; k < m; ++k) rest /= (a - b);
        zp.h_value = std::norm(rest);
        zp.window = std::min(0.5, 0.45 * min_gap);
        zp.fit_residual = 0.0;
        zp.profiled = true;
        out.push_back(zp);
    }
    return out;
}

std::vector<std::pair<cd, int>> RationalFamily::interior_zeros() const {
    std::vector<std::pair<cd, int>> out;
    for (const auto& [a, n] : zeros_)
        if (std::abs(a) < 1.0 - 1e-12) out.push_back({a, n});
    return out;
}

std::vector<double> RationalFamily::boundary_singular_angles() const {
    std::vector<double> out;
    for (const auto& [a, n] : zeros_) {
        (void)n;
        if (std::abs(std::abs(a) - 1.0) < 1e-12) out.push_back(wrap_angle(std::arg(a)));
    }
    return out;
}

std::vector<cd> RationalFamily::coefficients(int d) const {
    if (poles_.empty()) {
        // exact polynomial expansion
        std::vector<cd> p{scale_};
        for (const auto& [a, n] : zeros_) {
            for (int k = 0; k < n; ++k) {
                std::vector<cd> q(p.size() + 1, cd(0.0, 0.0));
                for (std::size_t i = 0; i < p.size(); ++i) {
                    q[i] += p[i] * (-a);
                    q[i + 1] += p[i];
                }
                p = std::move(q);
            }
        }
        std::vector<cd> c(2 * d + 1, cd(0.0, 0.0));
        for (std::size_t k = 0; k < p.size(); ++k)
            if (static_cast<int>(k) <= d) c[k + d] = p[k];
        return c;
    }
    return Family::coefficients(d);
}

std::pair<double, double> RationalFamily::tail_estimates(int d) const {
    if (poles_.empty()) {
        int deg = 0;
        for (const auto& [a, n] : zeros_) {
            (void)a;
            deg += n;
        }
        if (d >= deg) return {0.0, 0.0};
    }
    return Family::tail_estimates(d);
}

// ---------------- TwistedPowerFamily ----------------

TwistedPowerFamily::TwistedPowerFamily(int n, double alpha) : n_(n), alpha_(alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("twisted_power: alpha must be positive");
}

cd TwistedPowerFamily::eval(double t) const {
    // 1 + e^{it} = 2 cos(t/2) e^{it/2} on t in (-pi, pi)
    double tw = wrap_angle(t);
    if (tw > kPi) tw -= kTwoPi;
    double c = std::cos(0.5 * tw);
    double mag = std::pow(2.0 * std::abs(c), alpha_);
    double phase = n_ * tw + alpha_ * 0.5 * tw;
    return mag * cd(std::cos(phase), std::sin(phase));
}

cd TwistedPowerFamily::deriv(double t) const {
    double tw = wrap_angle(t);
    if (tw > kPi) tw -= kTwoPi;
    double c = std::cos(0.5 * tw);
    cd eit(std::cos(tw), std::sin(tw));
    cd ein(std::cos(n_ * tw), std::sin(n_ * tw));
    // f' = i n e^{int}(1+e^{it})^alpha + alpha e^{int} (1+e^{it})^{alpha-1} i e^{it}
    double mag_a = std::pow(2.0 * std::abs(c), alpha_);
    double mag_am1 = std::pow(2.0 * std::abs(c), alpha_ - 1.0);
    cd pow_a = mag_a * cd(std::cos(alpha_ * 0.5 * tw), std::sin(alpha_ * 0.5 * tw));
    cd pow_am1 = mag_am1 * cd(std::cos((alpha_ - 1.0) * 0.5 * tw), std::sin((alpha_ - 1.0) * 0.5 * tw));
    if (c == 0.0) {
        pow_a = cd(0.0, 0.0);
        pow_am1 = (alpha_ > 1.0) ? cd(0.0, 0.0) : pow_am1;  // alpha<1: unbounded, report inf
    }
    return cd(0.0, 1.0) * static_cast<double>(n_) * ein * pow_a +
           alpha_ * ein * pow_am1 * cd(0.0, 1.0) * eit;
}

cd TwistedPowerFamily::log_deriv(double t) const {
    // f'/f = i(n + alpha/2) - (alpha/2) tan(t/2)
    double tw = wrap_angle(t);
    if (tw > kPi) tw -= kTwoPi;
    return cd(-0.5 * alpha_ * std::tan(0.5 * tw), n_ + 0.5 * alpha_);
}

double TwistedPowerFamily::abs2(double t) const {
    double u = wrap_angle(t) - kPi;  // distance from the zero
    double s = std::sin(0.5 * u);
    return std::pow(4.0 * s * s, alpha_);
}

double TwistedPowerFamily::abs2_near(double, double u) const {
    double s = std::sin(0.5 * u);
    return std::pow(4.0 * s * s, alpha_);
}

cd TwistedPowerFamily::log_deriv_near(double, double u) const {
    // f'/f at t = pi + u: i(n + alpha/2) + (alpha/2) cot(u/2)
    return cd(0.5 * alpha_ / std::tan(0.5 * u), n_ + 0.5 * alpha_);
}

cd TwistedPowerFamily::disk_eval(cd z) const {
    if (n_ < 0) throw std::domain_error("disk_eval: negative twist");
    cd zp(1.0, 0.0);
    for (int k = 0; k < n_; ++k) zp *= z;
    return zp * std::pow(cd(1.0, 0.0) + z, alpha_);
}

void TwistedPowerFamily::disk_jet(cd z, std::optional<cd> w, std::span<cd> out) const {
    if (n_ < 0) throw std::domain_error("disk_jet: negative twist");
    const std::size_t order = out.size() - 1;
    cd wv = w ? *w : (cd(1.0, 0.0) + z);
    Jet p;
    const double ai = std::round(alpha_);
    if (alpha_ == ai && ai >= 0.0 && ai <= 48.0) {
        // integer exponent: repeated products keep the high-order
        // coefficients exactly zero instead of exp/log rounding dust
        Jet wj = Jet::variable(wv, order);
        p = Jet::constant(cd(1.0, 0.0), order);
        for (int k = 0; k < static_cast<int>(ai); ++k) p = p * wj;
    } else {
        Jet lg = jet_log1p_from_w(wv, order);
        p = jet_exp(alpha_ * lg);
    }
    Jet zj = Jet::variable(z, order);
    Jet zp = Jet::constant(cd(1.0, 0.0), order);
    for (int k = 0; k < n_; ++k) zp = zp * zj;
    Jet v = zp * p;
    for (std::size_t k = 0; k <= order; ++k) out[k] = v.c[k];
}

std::vector<ZeroProfile> TwistedPowerFamily::circle_zero_profiles() const {
    ZeroProfile zp;
    zp.location = kPi;
    zp.order = 2.0 * alpha_;
    zp.g_value = cd(alpha_, 0.0);
    zp.h_value = 1.0;
    zp.window = 0.5;
    zp.fit_residual = 0.0;
    zp.profiled = true;
    return {zp};
}

std::vector<std::pair<cd, int>> TwistedPowerFamily::interior_zeros() const {
    if (n_ > 0) return {{cd(0.0, 0.0), n_}};
    return {};
}

std::vector<cd> TwistedPowerFamily::coefficients(int d) const {
    if (n_ < -d || n_ > d)
        throw std::invalid_argument("twisted_power: degree too small for the twist");
    std::vector<cd> c(2 * d + 1, cd(0.0, 0.0));
    double b = 1.0;
    for (int k = 0; n_ + k <= d; ++k) {
        if (k > 0) b *= (alpha_ - (k - 1)) / k;
        c[n_ + k + d] = cd(b, 0.0);
    }
    return c;
}

std::pair<double, double> TwistedPowerFamily::tail_estimates(int d) const {
    // |C(alpha,k)| ~ k^{-1-alpha}: run the recurrence past the cutoff and
    // close with the integral remainder.
    int kmax = d - n_;
    if (kmax < 0) kmax = 0;
    bool integer_alpha = std::abs(alpha_ - std::round(alpha_)) < 1e-14;
    if (integer_alpha && kmax >= static_cast<int>(std::round(alpha_))) return {0.0, 0.0};
    double b = 1.0;
    for (int k = 1; k <= kmax; ++k) b *= std::abs(alpha_ - (k - 1)) / k;
    double sup = 0.0, w12 = 0.0;
    int K = kmax + 8192;
    double bk = b;
    for (int k = kmax + 1; k <= K; ++k) {
        bk *= std::abs(alpha_ - (k - 1)) / k;
        sup += bk;
        w12 += (1.0 + std::abs(n_ + k)) * bk * bk;
    }
    sup += bk * K / std::max(0.1, alpha_);
    w12 += bk * bk * static_cast<double>(K) * K / std::max(0.1, 2.0 * alpha_);
    return {sup, std::sqrt(w12)};
}

// ---------------- LogPowerFamily ----------------

LogPowerFamily::LogPowerFamily(double alpha, double C, bool reciprocal)
    : alpha_(alpha), C_(C), reciprocal_(reciprocal) {
    if (!reciprocal_ && alpha_ <= 0.0) throw std::invalid_argument("log_power: alpha must be positive");
    if (reciprocal_ && C_ <= 0.5) throw std::invalid_argument("log_power: C too small");
}

namespace {

// Jet of Q(z) = log(1+z)/z (removable singularity at 0); psi = 1/Q.
Jet q_jet(cd z, std::optional<cd> w, std::size_t order) {
    if (std::abs(z) <= 0.5) {
        // shifted Maclaurin: Q(z+h) = sum_m q_m (z+h)^m, q_m = (-1)^m/(m+1)
        Jet r(order);
        const int M = 200;
        // c_k = sum_{m>=k} q_m C(m,k) z^{m-k}
        for (std::size_t k = 0; k <= order; ++k) {
            cd s(0.0, 0.0);
            double binom = 1.0;  // C(m,k) built incrementally from m=k
            cd zp(1.0, 0.0);
            for (int m = static_cast<int>(k); m <= M; ++m) {
                double qm = ((m % 2) ? -1.0 : 1.0) / (m + 1.0);
                s += qm * binom * zp;
                zp *= z;
                binom *= static_cast<double>(m + 1) / (m + 1 - static_cast<int>(k));
            }
            r.c[k] = s;
        }
        return r;
    }
    cd wv = w ? *w : (cd(1.0, 0.0) + z);
    Jet lg = jet_log1p_from_w(wv, order);
    Jet zj = Jet::variable(z, order);
    return jet_div(lg, zj);
}

Jet psi_jet(cd z, std::optional<cd> w, std::size_t order) { return jet_recip(q_jet(z, w, order)); }

}  // namespace

cd LogPowerFamily::eval(double t) const {
    cd z(std::cos(t), std::sin(t));
    double c = std::cos(0.5 * t);
    cd w(2.0 * c * c, std::sin(t));  // 1 + e^{it} without cancellation
    if (std::abs(w) == 0.0) return cd(0.0, 0.0);
    std::vector<cd> jet(1);
    disk_jet(z, w, jet);
    return jet[0];
}

cd LogPowerFamily::deriv(double t) const {
    cd z(std::cos(t), std::sin(t));
    double c = std::cos(0.5 * t);
    cd w(2.0 * c * c, std::sin(t));
    std::vector<cd> jet(2);
    disk_jet(z, w, jet);
    return jet[1] * cd(0.0, 1.0) * z;
}

double LogPowerFamily::abs2_near(double, double u) const {
    // t = pi + u: z = -e^{iu}, w = 1 + z = 1 - e^{iu} from the exact offset
    double sn = std::sin(0.5 * u);
    cd w(2.0 * sn * sn, -std::sin(u));
    cd z(-std::cos(u), -std::sin(u));
    if (std::abs(w) == 0.0) return 0.0;
    std::vector<cd> jet(1);
    disk_jet(z, w, jet);
    return std::norm(jet[0]);
}

cd LogPowerFamily::log_deriv_near(double, double u) const {
    double sn = std::sin(0.5 * u);
    cd w(2.0 * sn * sn, -std::sin(u));
    cd z(-std::cos(u), -std::sin(u));
    std::vector<cd> jet(2);
    disk_jet(z, w, jet);
    return cd(0.0, 1.0) * z * jet[1] / jet[0];
}

cd LogPowerFamily::disk_eval(cd z) const {
    std::vector<cd> jet(1);
    disk_jet(z, std::nullopt, jet);
    return jet[0];
}

void LogPowerFamily::disk_jet(cd z, std::optional<cd> w, std::span<cd> out) const {
    const std::size_t order = out.size() - 1;
    Jet psi = psi_jet(z, w, order);
    Jet v = reciprocal_ ? jet_recip(Jet::constant(cd(C_, 0.0), order) - jet_log(psi))
                        : jet_pow(psi, alpha_);
    for (std::size_t k = 0; k <= order; ++k) out[k] = v.c[k];
}

std::vector<ZeroProfile> LogPowerFamily::circle_zero_profiles() const {
    // |f| vanishes at t = pi but only logarithmically: no power-law profile.
    ZeroProfile zp;
    zp.location = kPi;
    zp.profiled = false;
    zp.window = 0.5;
    return {zp};
}

// ---------------- ShiftSumFamily ----------------

ShiftSumFamily::ShiftSumFamily(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("shift_sum: n must be >= 1");
}

cd ShiftSumFamily::eval(double t) const {
    cd z(std::cos(t), std::sin(t));
    cd s(0.0, 0.0);
    for (int k = n_ - 1; k >= 0; --k) s = s * z + cd(1.0, 0.0);
    return s;
}

cd ShiftSumFamily::deriv(double t) const {
    cd z(std::cos(t), std::sin(t));
    cd s(0.0, 0.0);
    for (int k = n_ - 1; k >= 1; --k) s = s * z + cd(0.0, static_cast<double>(k));
    return s * z;
}

double ShiftSumFamily::abs2(double t) const {
    double tw = wrap_angle(t);
    double s2 = std::sin(0.5 * tw);
    if (std::abs(s2) < 1e-7) {
        double r = static_cast<double>(n_);
        return r * r;
    }
    int j = static_cast<int>(std::lround(n_ * tw / kTwoPi));
    double u = tw - kTwoPi * j / n_;
    double sn = std::sin(0.5 * n_ * u);  // |sin(n t / 2)| re-centred at the nearest zero
    double r = sn / s2;
    return r * r;
}

cd ShiftSumFamily::log_deriv(double t) const {
    // away from the zeros the direct ratio is exact to rounding, while the
    // cotangent pair cancels catastrophically near t = 0 mod 2pi; switch on
    // the magnitude of f itself
    cd v = eval(t);
    if (std::norm(v) > 0.04 * n_ * n_) return deriv(t) / v;
    double tw = wrap_angle(t);
    long j = std::lround(n_ * tw / kTwoPi);
    if (j % n_ == 0) return deriv(t) / v;
    double u = tw - kTwoPi * j / n_;
    double cot_n = std::cos(0.5 * n_ * u) / std::sin(0.5 * n_ * u);
    double cot_1 = std::cos(0.5 * tw) / std::sin(0.5 * tw);
    return cd(0.5 * n_ * cot_n - 0.5 * cot_1, 0.5 * (n_ - 1));
}

double ShiftSumFamily::abs2_near(double singular_angle, double u) const {
    int j = static_cast<int>(std::lround(singular_angle * n_ / kTwoPi));
    double sn = std::sin(0.5 * n_ * u);            // sin(nt/2) = +-sin(nu/2)
    double sd = std::sin(kPi * j / n_ + 0.5 * u);  // sin(t/2), regular at the zero
    double r = sn / sd;
    return r * r;
}

cd ShiftSumFamily::log_deriv_near(double singular_angle, double u) const {
    int j = static_cast<int>(std::lround(singular_angle * n_ / kTwoPi));
    double cn = 0.5 * n_ / std::tan(0.5 * n_ * u);
    double c1 = 0.5 / std::tan(kPi * j / n_ + 0.5 * u);
    return cd(cn - c1, 0.5 * (n_ - 1));
}

cd ShiftSumFamily::disk_eval(cd z) const {
    cd s(0.0, 0.0);
    for (int k = n_ - 1; k >= 0; --k) s = s * z + cd(1.0, 0.0);
    return s;
}

std::vector<ZeroProfile> ShiftSumFamily::circle_zero_profiles() const {
    std::vector<ZeroProfile> out;
    for (int j = 1; j < n_; ++j) {
        ZeroProfile zp;
        zp.location = kTwoPi * j / n_;
        zp.order = 2.0;
        zp.g_value = cd(1.0, 0.0);
        double s = std::sin(kPi * j / n_);
        zp.h_value = n_ * n_ / (4.0 * s * s);
        zp.window = std::min(0.5, 0.45 * kTwoPi / n_);
        zp.profiled = true;
        out.push_back(zp);
    }
    return out;
}

std::vector<std::pair<cd, int>> ShiftSumFamily::interior_zeros() const { return {}; }

std::vector<double> ShiftSumFamily::boundary_singular_angles() const {
    std::vector<double> out;
    for (int j = 1; j < n_; ++j) out.push_back(kTwoPi * j / n_);
    return out;
}

std::vector<cd> ShiftSumFamily::coefficients(int d) const {
    std::vector<cd> c(2 * d + 1, cd(0.0, 0.0));
    for (int k = 0; k < n_ && k <= d; ++k) c[k + d] = cd(1.0, 0.0);
    return c;
}

std::pair<double, double> ShiftSumFamily::tail_estimates(int d) const {
    if (d >= n_ - 1) return {0.0, 0.0};
    double sup = 0.0, w12 = 0.0;
    for (int k = d + 1; k < n_; ++k) {
        sup += 1.0;
        w12 += 1.0 + k;
    }
    return {sup, std::sqrt(w12)};
}

// ---------------- ShiftPlusFamily ----------------

ShiftPlusFamily::ShiftPlusFamily(double a) : a_(a) {
    if (a < 0.0) throw std::invalid_argument("shift_plus: a must be >= 0");
}

cd ShiftPlusFamily::eval(double t) const { return cd(a_ + std::cos(t), std::sin(t)); }

cd ShiftPlusFamily::deriv(double t) const { return cd(-std::sin(t), std::cos(t)); }

double ShiftPlusFamily::abs2(double t) const {
    double c = std::cos(0.5 * t);
    return (1.0 - a_) * (1.0 - a_) + 4.0 * a_ * c * c;
}

cd ShiftPlusFamily::log_deriv(double t) const {
    // i e^{it} / (e^{it} + a); denominator via (a-1) + 2cos^2(t/2) to stay
    // stable when a = 1 near t = pi
    double c = std::cos(0.5 * t);
    cd den(a_ - 1.0 + 2.0 * c * c, std::sin(t));
    cd eit(std::cos(t), std::sin(t));
    return cd(0.0, 1.0) * eit / den;
}

double ShiftPlusFamily::abs2_near(double, double u) const {
    double sn = std::sin(0.5 * u);
    return (1.0 - a_) * (1.0 - a_) + 4.0 * a_ * sn * sn;
}

cd ShiftPlusFamily::log_deriv_near(double, double u) const {
    // t = pi + u: f = a - e^{iu}, f' = -i e^{iu}
    double sn = std::sin(0.5 * u);
    cd den((a_ - 1.0) + 2.0 * sn * sn, -std::sin(u));
    cd eiu(std::cos(u), std::sin(u));
    return cd(0.0, -1.0) * eiu / den;
}

cd ShiftPlusFamily::disk_eval(cd z) const { return z + a_; }

std::vector<ZeroProfile> ShiftPlusFamily::circle_zero_profiles() const {
    if (std::abs(a_ - 1.0) > 1e-14) return {};
    ZeroProfile zp;
    zp.location = kPi;
    zp.order = 2.0;
    zp.g_value = cd(1.0, 0.0);
    zp.h_value = 1.0;
    zp.window = 0.5;
    zp.profiled = true;
    return {zp};
}

std::vector<std::pair<cd, int>> ShiftPlusFamily::interior_zeros() const {
    if (a_ < 1.0 - 1e-14) return {{cd(-a_, 0.0), 1}};
    return {};
}

std::vector<double> ShiftPlusFamily::boundary_singular_angles() const {
    if (std::abs(a_ - 1.0) <= 1e-14) return {kPi};
    return {};
}

std::vector<cd> ShiftPlusFamily::coefficients(int d) const {
    std::vector<cd> c(2 * d + 1, cd(0.0, 0.0));
    c[d] = cd(a_, 0.0);
    if (d >= 1) c[1 + d] = cd(1.0, 0.0);
    return c;
}

std::pair<double, double> ShiftPlusFamily::tail_estimates(int d) const {
    if (d >= 1) return {0.0, 0.0};
    return {1.0, std::sqrt(2.0)};
}

// ---------------- free functions ----------------

cd omega_form(const FourierSymbol& f, const FourierSymbol& g) {
    cd s(0.0, 0.0);
    int d = std::min(f.degree(), g.degree());
    for (int n = -d; n <= d; ++n) {
        if (n == 0) continue;
        s += static_cast<double>(n) * f.coeff(-n) * g.coeff(n);
    }
    return s;
}

std::vector<cd> coefficients_from_samples(const std::vector<cd>& samples, int d) {
    std::vector<cd> a = samples;
    std::size_t M = a.size();
    if ((M & (M - 1)) != 0) throw std::invalid_argument("coefficients_from_samples: size not pow2");
    if (static_cast<std::size_t>(2 * d + 1) > M)
        throw std::invalid_argument("coefficients_from_samples: too few samples");
    fft_inplace(a, false);
    std::vector<cd> c(2 * d + 1);
    for (int n = -d; n <= d; ++n) {
        std::size_t k = n >= 0 ? static_cast<std::size_t>(n) : M + n;
        c[n + d] = a[k] / static_cast<double>(M);
    }
    return c;
}

}  // namespace ttrace
