#include "ttrace/indices.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace ttrace {

namespace {

// ---- level sets of |f|^2 --------------------------------------------------

// Sorted circle nodes (uniform samples plus the circle-zero angles, which the
// uniform grid cannot see once x drops below the sample floor) with |f|^2.
struct LevelScan {
    std::vector<double> t;
    std::vector<double> a2;
    double sup = 0.0;  // refined max of |f|^2
};

LevelScan scan_abs2(const FourierSymbol& f, int S = 8192) {
    LevelScan sc;
    sc.t.reserve(S + 8);
    sc.a2.reserve(S + 8);
    for (int j = 0; j < S; ++j) {
        double t = kTwoPi * j / S;
        sc.t.push_back(t);
        sc.a2.push_back(f.abs2(t));
    }
    for (const auto& zp : f.circle_zeros()) {
        double t0 = zp.location;
        while (t0 < 0.0) t0 += kTwoPi;
        while (t0 >= kTwoPi) t0 -= kTwoPi;
        sc.t.push_back(t0);
        sc.a2.push_back(0.0);
    }
    // keep nodes sorted after the zero injection
    std::vector<std::size_t> idx(sc.t.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return sc.t[a] < sc.t[b]; });
    std::vector<double> ts, as;
    ts.reserve(idx.size());
    as.reserve(idx.size());
    for (std::size_t i : idx) {
        if (!ts.empty() && sc.t[i] - ts.back() < 1e-14) continue;
        ts.push_back(sc.t[i]);
        as.push_back(sc.a2[i]);
    }
    sc.t = std::move(ts);
    sc.a2 = std::move(as);
    // parabolic bump of the sampled max (the true sup sits between samples)
    std::size_t jm = 0;
    for (std::size_t j = 1; j < sc.a2.size(); ++j)
        if (sc.a2[j] > sc.a2[jm]) jm = j;
    sc.sup = sc.a2[jm];
    const double dt = kTwoPi / S;
    double tl = sc.t[jm] - 0.5 * dt, tr = sc.t[jm] + 0.5 * dt;
    for (int it = 0; it < 40; ++it) {
        double t1 = tl + (tr - tl) / 3.0, t2 = tr - (tr - tl) / 3.0;
        if (f.abs2(t1) < f.abs2(t2)) tl = t1; else tr = t2;
    }
    sc.sup = std::max(sc.sup, f.abs2(0.5 * (tl + tr)));
    return sc;
}

double bisect_level(const FourierSymbol& f, double x, double lo, double hi, bool lo_below) {
    // f.abs2 - x changes sign on [lo, hi]
    for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
        double mid = 0.5 * (lo + hi);
        bool below = f.abs2(mid) < x;
        if (below == lo_below) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Intervals (possibly wrapping past 2*pi) where |f|^2 >= x.  Empty when the
// level exceeds the sup; a single full-circle interval when x is below the
// min.  Endpoints are bisection-refined level crossings.
std::vector<std::pair<double, double>> super_level_intervals(const FourierSymbol& f,
                                                             const LevelScan& sc, double x) {
    const std::size_t n = sc.t.size();
    auto above = [&](std::size_t j) { return sc.a2[j] >= x; };
    bool any_above = false, any_below = false;
    for (std::size_t j = 0; j < n; ++j) (above(j) ? any_above : any_below) = true;
    std::vector<std::pair<double, double>> out;
    if (!any_above) return out;
    if (!any_below) {
        out.emplace_back(0.0, kTwoPi);
        return out;
    }
    auto node = [&](std::size_t j) { return sc.t[j % n] + (j >= n ? kTwoPi : 0.0); };
    // maximal cyclic runs of nodes above the level
    std::size_t start = 0;
    while (above(start)) ++start;  // start on a below node
    for (std::size_t j = start; j < start + n;) {
        if (!above(j % n)) { ++j; continue; }
        std::size_t j0 = j;
        while (j < start + n && above(j % n)) ++j;
        // run is [j0, j-1]; refine the two boundary cells
        double a = bisect_level(f, x, node(j0 - 1), node(j0), true);
        double b = bisect_level(f, x, node(j - 1), node(j), false);
        out.emplace_back(a, b);
    }
    return out;
}

// xi(x) for the operator pair of f by the boundary formula: the winding of f
// over the super-level region, i.e. Delta arg(f) / 2 pi.  The log|f| part of
// the integral cancels exactly between the two endpoints (both sit on
// |f|^2 = x); its computed remainder is reported as the consistency residual.
double xi_boundary_at(const FourierSymbol& f, const LevelScan& sc, double x, double* residual) {
    auto ivs = super_level_intervals(f, sc, x);
    if (ivs.empty()) return 0.0;
    cd total(0.0, 0.0);
    double err = 0.0;
    if (ivs.size() == 1 && ivs[0].second - ivs[0].first >= kTwoPi - 1e-12) {
        auto r = circle_integral([&](double t) { return f.log_derivative(t); });
        total = r.value * kTwoPi;  // circle_integral carries 1/2pi
        err = r.abs_error_estimate * kTwoPi;
    } else {
        for (const auto& [a, b] : ivs) {
            auto r = integrate_segment([&](double t) { return f.log_derivative(t); }, a, b, 1e-10);
            total += r.value;
            err += r.abs_error_estimate;
        }
    }
    if (residual) *residual = std::max(*residual, (std::abs(total.real()) + err) / kTwoPi);
    return total.imag() / kTwoPi;
}

std::vector<double> default_grid(double sup) {
    std::vector<double> g(64);
    for (int j = 0; j < 64; ++j) g[j] = sup * (j + 0.5) / 64.0;
    return g;
}

void check_grid(const std::vector<double>& g) {
    if (g.empty()) throw std::invalid_argument("spectral shift: empty grid");
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (!(g[j] > 0.0) || !std::isfinite(g[j]))
            throw std::invalid_argument("spectral shift: grid values must be positive and finite");
        if (j > 0 && !(g[j] > g[j - 1]))
            throw std::invalid_argument("spectral shift: grid must be strictly increasing");
    }
}

// ---- heat-limit fit -------------------------------------------------------

struct HeatFit {
    double c0 = 0.0, c1 = 0.0, rms = 0.0;
};

HeatFit fit_heat_tail(const std::vector<double>& s, const std::vector<double>& y, double rate,
                      std::size_t lo) {
    std::size_t m = s.size() - lo;
    double sw = static_cast<double>(m), sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (std::size_t i = lo; i < s.size(); ++i) {
        double xi = std::pow(s[i], -rate);
        sx += xi;
        sxx += xi * xi;
        sy += y[i];
        sxy += xi * y[i];
    }
    HeatFit out;
    double det = sw * sxx - sx * sx;
    out.c1 = (sw * sxy - sx * sy) / det;
    out.c0 = (sy - out.c1 * sx) / sw;
    double r2 = 0.0;
    for (std::size_t i = lo; i < s.size(); ++i) {
        double p = out.c0 + out.c1 * std::pow(s[i], -rate);
        r2 += (y[i] - p) * (y[i] - p);
    }
    out.rms = std::sqrt(r2 / static_cast<double>(m));
    return out;
}

// ---- ray crossings for the pushforward route ------------------------------

struct RayCrossing {
    double r = 0.0;    // |f| at the crossing
    double sig = 0.0;  // inward jump of the winding across it
};

// Parameter values where the curve meets the ray arg(w) = theta, found as the
// zeros of Im(f e^{-i theta}) with positive real part.  The winding along the
// ray is the signed count of crossings beyond each radius.
std::vector<RayCrossing> ray_crossings(const FourierSymbol& f, const std::vector<cd>& fs,
                                       double theta, double scale) {
    const std::size_t S = fs.size();
    const cd rot = std::polar(1.0, -theta);
    std::vector<RayCrossing> out;
    double psi_prev = (fs[0] * rot).imag();
    for (std::size_t j = 1; j <= S; ++j) {
        double psi = (fs[j % S] * rot).imag();
        if ((psi_prev > 0.0) != (psi > 0.0)) {
            double lo = kTwoPi * (j - 1) / S, hi = kTwoPi * j / S;
            bool lo_neg = !(psi_prev > 0.0);
            for (int it = 0; it < 60 && hi - lo > 1e-14; ++it) {
                double mid = 0.5 * (lo + hi);
                bool neg = !((f.evaluate(mid) * rot).imag() > 0.0);
                if (neg == lo_neg) lo = mid; else hi = mid;
            }
            double ts = 0.5 * (lo + hi);
            cd v = f.evaluate(ts) * rot;
            if (v.real() > 1e-12 * scale) {
                double di = f.log_derivative(ts).imag();
                if (std::abs(di) > 0.0)
                    out.push_back({v.real(), di > 0.0 ? 1.0 : -1.0});
            }
        }
        psi_prev = psi;
    }
    std::sort(out.begin(), out.end(), [](const RayCrossing& a, const RayCrossing& b) { return a.r < b.r; });
    return out;
}

// int_0^R m(rho e^{i theta}) 2 rho d rho, exact for the piecewise-constant
// winding profile of one ray.
double ray_mass(const std::vector<RayCrossing>& cr, double R) {
    double mass = 0.0;
    double m_here = 0.0;
    for (const auto& c : cr) m_here += c.sig;  // winding on (0, r_1)
    double r_prev = 0.0;
    for (const auto& c : cr) {
        double hi = std::min(c.r, R);
        if (hi > r_prev) mass += m_here * (hi * hi - r_prev * r_prev);
        if (c.r >= R) return mass;
        m_here -= c.sig;
        r_prev = c.r;
    }
    return mass;  // m is zero beyond the last crossing
}

struct RaySet {
    std::vector<std::vector<RayCrossing>> rays;
};

RaySet build_ray_set(const FourierSymbol& f, int ntheta) {
    const int S = std::max(2048, 64 * std::max(1, f.degree()));
    std::vector<cd> fs(S);
    for (int j = 0; j < S; ++j) fs[j] = f.evaluate(kTwoPi * j / S);
    double scale = 1e-300;
    for (const cd& v : fs) scale = std::max(scale, std::abs(v));
    RaySet rs;
    rs.rays.resize(ntheta);
    for (int k = 0; k < ntheta; ++k) rs.rays[k] = ray_crossings(f, fs, kTwoPi * k / ntheta, scale);
    return rs;
}

// (1/pi) int over the disk |w| <= R of the winding m(w): angular mean of the
// exact per-ray radial masses.  stride 2 reuses every other ray for the
// resolution residual.
double cumulative_mass(const RaySet& rs, double R, int stride = 1) {
    double acc = 0.0;
    int cnt = 0;
    for (std::size_t k = 0; k < rs.rays.size(); k += stride) {
        acc += ray_mass(rs.rays[k], R);
        ++cnt;
    }
    return acc / cnt;
}

// ---- shared route plumbing ------------------------------------------------

double route_slack(double a, double b) { return 1e-9 * (1.0 + std::abs(a) + std::abs(b)); }

}  // namespace

int winding_number(const FourierSymbol& f, cd w) {
    const double scale = f.sup_norm_estimate() + std::abs(w) + 1e-300;
    for (int M = 1024; M <= (1 << 21); M *= 2) {
        cd first = f.evaluate(0.0) - w;
        cd prev = first;
        double minabs = std::abs(first);
        double total = 0.0;
        bool coarse = false;
        for (int j = 1; j <= M; ++j) {
            cd cur = (j == M) ? first : f.evaluate(kTwoPi * j / M) - w;
            minabs = std::min(minabs, std::abs(cur));
            if (minabs < 1e-12 * scale)
                throw std::invalid_argument("winding_number: the curve passes through the target point");
            double dphi = std::arg(cur / prev);
            if (std::abs(dphi) > 2.0) { coarse = true; break; }
            total += dphi;
            prev = cur;
        }
        if (!coarse) {
            double turns = total / kTwoPi;
            double nearest = std::round(turns);
            if (std::abs(turns - nearest) < 0.1) return static_cast<int>(nearest);
        }
    }
    throw std::runtime_error("winding_number: no stable turn count at 2^21 samples; the target point sits too close to the curve");
}

int fredholm_index(const FourierSymbol& f) {
    if (!f.circle_zeros().empty())
        throw std::domain_error(
            "fredholm_index: |f| vanishes on the circle, so the operator is not Fredholm; "
            "witten_index computes the regularized value");
    const int wind = winding_number(f, cd(0.0, 0.0));

    // cross-check through the commutator trace Tr [T_f, T_{1/f}] = omega(f, 1/f);
    // 1/f is smooth on the circle, so its sampled coefficients alias down
    // geometrically and doubling the grid until the form stabilizes is cheap
    const int d = std::max(1, f.degree());
    cd om_prev(1e9, 0.0), om(0.0, 0.0);
    bool stable = false;
    for (int M = 8192; M <= (1 << 20); M *= 2) {
        std::vector<cd> samples(M);
        for (int j = 0; j < M; ++j) samples[j] = 1.0 / f.evaluate(kTwoPi * j / M);
        auto cc = coefficients_from_samples(samples, d);
        std::map<int, cd> cm;
        for (int n = -d; n <= d; ++n) cm[n] = cc[n + d];
        om = omega_form(f, FourierSymbol::from_coefficients(cm));
        if (std::abs(om - om_prev) < 1e-8) { stable = true; break; }
        om_prev = om;
    }
    if (!stable) throw std::runtime_error("fredholm_index: commutator cross-check did not stabilize");
    const double oi = std::round(om.real());
    if (std::abs(om - cd(oi, 0.0)) > 1e-4 || static_cast<int>(oi) != -wind)
        throw std::runtime_error("fredholm_index: winding and commutator-trace routes disagree");
    return -wind;
}

IndexReport witten_index(const FourierSymbol& f, const QuadratureSettings& settings) {
    IndexReport rep;
    rep.zeros_used = f.circle_zeros();
    for (const auto& zp : rep.zeros_used)
        if (!zp.profiled)
            throw std::domain_error(
                "witten_index: a circle zero carries no power-law profile; the contour "
                "and heat routes both need the local model");

    auto pv = principal_value_log_derivative(f, settings);
    const cd wind = pv.value / cd(0.0, kTwoPi);
    rep.routes.push_back({"pv_integral", -wind.real(),
                          pv.abs_error_estimate / kTwoPi + std::abs(wind.imag())});

    // heat limit: Tr(e^{-sB} - e^{-sA}) -> -index; the approach is a power
    // s^{-1/beta} governed by the flattest circle zero, so fit that model on a
    // dyadic s ladder and extrapolate.  The spread between the full fit and
    // the late-time fit prices the neglected higher-order terms.
    double beta_max = 2.0;
    for (const auto& zp : rep.zeros_used) beta_max = std::max(beta_max, zp.order);
    const double rate = 1.0 / beta_max;
    const std::vector<double> sgrid = {25.0, 50.0, 100.0, 200.0};
    std::vector<double> hv, herr;
    for (double s : sgrid) {
        auto hr = heat_integral(f, s, settings);
        hv.push_back(hr.value);
        herr.push_back(hr.error_estimate);
    }
    auto full = fit_heat_tail(sgrid, hv, rate, 0);
    auto late = fit_heat_tail(sgrid, hv, rate, 1);
    double data_err = 0.0;
    for (double e : herr) data_err = std::max(data_err, e);
    // model uncertainty: the fit removes c1 * s^{-rate}; charge half of that
    // correction at the largest s, since nothing in the data distinguishes
    // the assumed power from its neighbours once the step is extrapolated
    const double step = std::abs(late.c1) * std::pow(sgrid.back(), -rate);
    rep.routes.push_back({"heat_limit", -late.c0,
                          2.0 * std::abs(full.c0 - late.c0) + 3.0 * late.rms + data_err + 0.5 * step});

    if (f.has_family()) {
        const Family* fam = f.family();
        const std::string v = fam->variant();
        bool have = true;
        double cf = 0.0;
        if (v == "rational") {
            const auto* rf = static_cast<const RationalFamily*>(fam);
            cf = closed_forms::rational_index(rf->zeros(), rf->poles());
        } else if (v == "twisted_power") {
            const auto* tf = static_cast<const TwistedPowerFamily*>(fam);
            cf = closed_forms::twisted_index(tf->twist(), tf->alpha());
        } else if (v == "shift_sum") {
            cf = -0.5 * (static_cast<const ShiftSumFamily*>(fam)->n() - 1);
        } else if (v == "shift_plus") {
            double a = static_cast<const ShiftPlusFamily*>(fam)->a();
            cf = std::abs(a - 1.0) < 1e-12 ? -0.5 : (a < 1.0 ? -1.0 : 0.0);
        } else {
            have = false;
        }
        if (have) rep.routes.push_back({"closed_form", cf, 0.0});
    }

    const IndexRoute& lead = rep.routes.back().name == "closed_form" ? rep.routes.back() : rep.routes.front();
    rep.witten = lead.value;
    rep.error = std::max(lead.error, 1e-12);
    rep.routes_agree = true;
    for (std::size_t i = 0; i < rep.routes.size(); ++i)
        for (std::size_t j = i + 1; j < rep.routes.size(); ++j) {
            double gap = std::abs(rep.routes[i].value - rep.routes[j].value);
            if (gap > rep.routes[i].error + rep.routes[j].error + route_slack(rep.routes[i].value, rep.routes[j].value))
                rep.routes_agree = false;
        }
    if (rep.zeros_used.empty()) rep.fredholm = fredholm_index(f);
    return rep;
}

double principal_function(const FourierSymbol& f, cd w, const QuadratureSettings& settings) {
    const double scale = f.sup_norm_estimate() + std::abs(w) + 1.0;
    double mind = std::numeric_limits<double>::infinity();
    const int S = 4096;
    for (int j = 0; j < S; ++j) mind = std::min(mind, std::abs(f.evaluate(kTwoPi * j / S) - w));
    if (mind > 1e-7 * scale) {
        try {
            return winding_number(f, w);
        } catch (const std::exception&) {
            // near-curve: fall through to the principal-value evaluation
        }
    }
    auto pv = principal_value_log_derivative(f.shift_by(w), settings);
    return (pv.value / cd(0.0, kTwoPi)).real();
}

SpectralShiftFunction spectral_shift(const FourierSymbol& f, std::vector<double> grid,
                                     const QuadratureSettings& settings) {
    (void)settings;
    auto sc = scan_abs2(f);
    if (grid.empty()) grid = default_grid(sc.sup);
    check_grid(grid);
    SpectralShiftFunction out;
    out.route = "boundary";
    out.grid = std::move(grid);
    out.xi.reserve(out.grid.size());
    for (double x : out.grid) out.xi.push_back(xi_boundary_at(f, sc, x, &out.residual));
    return out;
}

SpectralShiftFunction ssf_from_principal(const FourierSymbol& f, std::vector<double> grid,
                                         const QuadratureSettings& settings) {
    (void)settings;
    auto sc = scan_abs2(f);
    if (grid.empty()) grid = default_grid(sc.sup);
    check_grid(grid);
    SpectralShiftFunction out;
    out.route = "principal_function";
    out.grid = std::move(grid);
    out.xi.reserve(out.grid.size());
    for (double x : out.grid) {
        const double r = std::sqrt(x);
        auto ivs = super_level_intervals(f, sc, x);
        // the ring |w| = r meets the curve exactly where |f|^2 crosses x, so
        // the winding is constant on the arcs between the images of those
        // crossings and the angular average is a finite weighted sum
        std::vector<double> thetas;
        for (const auto& [a, b] : ivs) {
            if (b - a >= kTwoPi - 1e-12) continue;
            for (double te : {a, b}) {
                double th = std::arg(f.evaluate(te));
                if (th < 0.0) th += kTwoPi;
                thetas.push_back(th);
            }
        }
        std::sort(thetas.begin(), thetas.end());
        thetas.erase(std::unique(thetas.begin(), thetas.end(),
                                 [](double a, double b) { return b - a < 1e-12; }),
                     thetas.end());
        if (thetas.empty()) {
            double v = 0.0;
            bool inside = false;
            for (std::size_t j = 0; j < sc.a2.size(); ++j) inside = inside || sc.a2[j] >= x;
            if (inside) {
                // curve misses the ring entirely: one winding value everywhere
                v = winding_number(f, cd(r, 0.0));
            }
            out.xi.push_back(v);
            continue;
        }
        double acc = 0.0, failed = 0.0;
        for (std::size_t k = 0; k < thetas.size(); ++k) {
            double a = thetas[k];
            double b = (k + 1 < thetas.size()) ? thetas[k + 1] : thetas[0] + kTwoPi;
            double len = b - a;
            if (len < 1e-12) continue;
            bool got = false;
            for (double frac : {0.5, 0.25, 0.75}) {
                try {
                    acc += len * winding_number(f, std::polar(r, a + frac * len));
                    got = true;
                    break;
                } catch (const std::exception&) {
                }
            }
            if (!got) failed += len;
        }
        if (failed > 0.1 * kTwoPi)
            throw std::runtime_error("ssf_from_principal: too many on-curve angles on the ring");
        out.residual = std::max(out.residual, failed / kTwoPi);
        out.xi.push_back(acc / (kTwoPi - failed));
    }
    return out;
}

SpectralShiftFunction ssf_pushforward(const FourierSymbol& f, std::vector<double> grid,
                                      const QuadratureSettings& settings) {
    (void)settings;
    if (!f.analytic())
        throw std::domain_error("ssf_pushforward: the pushforward route needs an analytic symbol");
    auto sc = scan_abs2(f);
    if (grid.empty()) grid = default_grid(sc.sup);
    check_grid(grid);
    auto rays = build_ray_set(f, 768);

    double spacing = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < grid.size(); ++j) spacing = std::min(spacing, grid[j] - grid[j - 1]);
    double h = 0.5 * std::min(spacing, 0.01 * grid.back());
    h = std::min(h, 0.45 * grid.front());

    SpectralShiftFunction out;
    out.route = "pushforward";
    out.grid = std::move(grid);
    out.xi.reserve(out.grid.size());
    for (double x : out.grid) {
        double rp = std::sqrt(x + h), rm = std::sqrt(x - h);
        double cp = cumulative_mass(rays, rp), cm = cumulative_mass(rays, rm);
        out.xi.push_back((cp - cm) / (2.0 * h));
        double cp2 = cumulative_mass(rays, rp, 2), cm2 = cumulative_mass(rays, rm, 2);
        out.residual = std::max(out.residual,
                                (std::abs(cp - cp2) + std::abs(cm - cm2)) / (2.0 * h));
    }
    return out;
}

KreinReport krein_check(const FourierSymbol& f, const ScalarFunction& phi, int truncation,
                        const QuadratureSettings& settings) {
    KreinReport rep;
    rep.matrix_trace = trace_phi_difference(f, phi, truncation);
    rep.boundary_integral = boundary_trace_integral(f, phi, settings);
    rep.disk_integral = disk_trace_integral(f, phi, settings);

    // int phi' xi: panels split at the critical values of |f|^2 (xi folds
    // there); the adaptive segments grade into the panel corners
    auto sc = scan_abs2(f);
    const double M2 = sc.sup;
    std::vector<double> breaks = {0.0, M2};
    const std::size_t n = sc.a2.size();
    for (std::size_t j = 0; j < n; ++j) {
        double prev = sc.a2[(j + n - 1) % n], cur = sc.a2[j], next = sc.a2[(j + 1) % n];
        bool is_max = cur >= prev && cur >= next, is_min = cur <= prev && cur <= next;
        if (!is_max && !is_min) continue;
        double tl = sc.t[(j + n - 1) % n], tr = sc.t[(j + 1) % n];
        if (tr < tl) tr += kTwoPi;
        for (int it = 0; it < 50; ++it) {
            double t1 = tl + (tr - tl) / 3.0, t2 = tr - (tr - tl) / 3.0;
            bool move_left = is_max ? (f.abs2(t1) < f.abs2(t2)) : (f.abs2(t1) > f.abs2(t2));
            if (move_left) tl = t1; else tr = t2;
        }
        double v = f.abs2(0.5 * (tl + tr));
        if (v > 1e-12 * M2 && v < M2 * (1.0 - 1e-12)) breaks.push_back(v);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [&](double a, double b) { return b - a < 1e-9 * M2; }),
                 breaks.end());

    double xi_resid = 0.0;
    auto integrand = [&](double x) {
        return cd(phi.derivative(x) * xi_boundary_at(f, sc, x, &xi_resid), 0.0);
    };
    double val = 0.0, err = 0.0;
    const double scale_tol = 1e-8 * (1.0 + std::abs(phi(M2) - phi(0.0)));
    for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
        auto r = integrate_segment(integrand, breaks[j], breaks[j + 1], scale_tol, 38);
        val += r.value.real();
        err += 2.0 * r.abs_error_estimate;
    }
    TraceResult ssf;
    ssf.value = val;
    ssf.error_estimate = err + xi_resid * std::abs(phi(M2) - phi(0.0));
    ssf.n_used = static_cast<int>(breaks.size()) - 1;
    ssf.method = "ssf_integral";
    rep.ssf_integral = ssf;

    const TraceResult* rs[4] = {&rep.matrix_trace, &rep.ssf_integral, &rep.boundary_integral,
                                &rep.disk_integral};
    rep.agree = true;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            double gap = std::abs(rs[i]->value - rs[j]->value);
            if (gap > rs[i]->error_estimate + rs[j]->error_estimate +
                          1e-6 * (1.0 + std::abs(rs[i]->value)))
                rep.agree = false;
        }
    return rep;
}

namespace closed_forms {

double gamma_ratio(double p) {
    if (!(p > 0.0)) throw std::invalid_argument("gamma_ratio: p must be positive");
    double g = std::tgamma(1.0 + 0.5 * p);
    return std::tgamma(1.0 + p) / (2.0 * g * g);
}

double twisted_index(int n, double alpha) { return -(n + 0.5 * alpha); }

double rational_index(const std::vector<std::pair<cd, int>>& zeros,
                      const std::vector<std::pair<cd, int>>& poles, double on_tol) {
    double idx = 0.0;
    for (const auto& [b, m] : poles) {
        double r = std::abs(b);
        if (std::abs(r - 1.0) <= on_tol)
            throw std::invalid_argument("rational_index: pole on the unit circle");
        if (r < 1.0) idx += m;
    }
    for (const auto& [a, m] : zeros) {
        double r = std::abs(a);
        if (std::abs(r - 1.0) <= on_tol) idx -= 0.5 * m;
        else if (r < 1.0) idx -= m;
    }
    return idx;
}

double elliptic_trace(double a) {
    if (!(a > 0.0)) throw std::invalid_argument("elliptic_trace: a must be positive");
    if (a <= 1.0) return (2.0 / kPi) * std::comp_ellint_2(a);
    double k = 1.0 / a;
    return (2.0 / kPi) * (a * std::comp_ellint_2(k) - (a - k) * std::comp_ellint_1(k));
}

double shift_sum_trace(int n) {
    if (n < 2) throw std::invalid_argument("shift_sum_trace: n must be at least 2");
    double acc = 0.0;
    if (n % 2 == 0) {
        for (int j = 0; j <= (n - 2) / 2; ++j)
            acc += std::tan((j + 0.5) * kPi / n) / (j + 0.5);
        return (n - 1) * acc / kPi;
    }
    for (int j = 1; j <= (n - 1) / 2; ++j) acc += std::tan(j * kPi / n) / j;
    return (n - 1) / (2.0 * n) + (n - 1) * acc / kPi;
}

cd monomial_commutator_trace(const FourierSymbol& h, int m, int n) {
    if (m < 1 || n < 1)
        throw std::invalid_argument("monomial_commutator_trace: exponents must be positive");
    return static_cast<double>(std::min(m, n)) * h.coeff(m - n);
}

}  // namespace closed_forms

}  // namespace ttrace
