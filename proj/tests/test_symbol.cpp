#include "doctest.h"

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <vector>

#include "ttrace/symbol.hpp"

using namespace ttrace;

namespace {

FourierSymbol random_trig_poly(std::mt19937_64& rng, int degree, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::map<int, cd> c;
    for (int n = -degree; n <= degree; ++n) c[n] = scale * cd(g(rng), g(rng));
    return FourierSymbol::from_coefficients(c);
}

// trapezoid value of (1/2pi) * integral of fn over [0, 2pi)
cd circle_mean(const std::function<cd(double)>& fn, int M) {
    cd s(0.0, 0.0);
    for (int j = 0; j < M; ++j) s += fn(kTwoPi * j / M);
    return s / static_cast<double>(M);
}

}  // namespace

TEST_CASE("from_coefficients basics") {
    auto f = FourierSymbol::from_coefficients({{1, cd(1, 0)}});
    CHECK(f.degree() == 1);
    CHECK(std::abs(f.evaluate(kPi) - cd(-1, 0)) < 1e-15);

    auto g = FourierSymbol::from_coefficients({{0, cd(1, 0)}, {1, cd(1, 0)}});
    CHECK(g.degree() == 1);
    CHECK(std::abs(g.coeff(0) - cd(1, 0)) < 1e-16);

    auto h = FourierSymbol::from_coefficients({{-2, cd(0, 3)}});
    CHECK(h.degree() == 2);
    CHECK(std::abs(h.coeff(-2) - cd(0, 3)) < 1e-16);
    // degree shrinks to the support
    auto k = FourierSymbol::from_coefficients({{5, cd(0, 0)}, {1, cd(2, 0)}});
    CHECK(k.degree() == 1);
}

TEST_CASE("family truncations") {
    auto tw1 = FourierSymbol::from_family(std::make_shared<TwistedPowerFamily>(0, 1.0), 1);
    CHECK(std::abs(tw1.coeff(0) - cd(1, 0)) < 1e-15);
    CHECK(std::abs(tw1.coeff(1) - cd(1, 0)) < 1e-15);
    CHECK(tw1.truncation_residual() < 1e-12);

    auto rat = FourierSymbol::from_family(
        std::make_shared<RationalFamily>(cd(1, 0),
                                         std::vector<std::pair<cd, int>>{{cd(-1, 0), 1}},
                                         std::vector<std::pair<cd, int>>{}),
        4);
    CHECK(std::abs(rat.coeff(0) - cd(1, 0)) < 1e-12);
    CHECK(std::abs(rat.coeff(1) - cd(1, 0)) < 1e-12);
    CHECK(std::abs(rat.coeff(2)) < 1e-12);
    CHECK(std::abs(rat.coeff(-1)) < 1e-12);

    auto half = FourierSymbol::from_family(std::make_shared<TwistedPowerFamily>(0, 0.5), 64);
    CHECK(std::abs(half.coeff(1) - cd(0.5, 0)) < 1e-14);
    CHECK(std::abs(half.coeff(2) - cd(-0.125, 0)) < 1e-14);
    CHECK(half.truncation_residual() > 0.0);
    CHECK(half.truncation_residual_w12() > 0.0);
}

TEST_CASE("evaluate matches series for families") {
    auto fam = std::make_shared<TwistedPowerFamily>(1, 1.5);
    auto f = FourierSymbol::from_family(fam, 128);
    // away from the zero the truncation is decent and the evaluator is exact
    for (double t : {0.3, 1.1, 2.0, 4.5}) {
        CHECK(std::abs(f.evaluate(t) - f.evaluate_series(t)) < 1e-3);
    }
    // evaluator agrees with naive pow formula away from the branch cut
    for (double t : {0.3, 1.1, 2.0}) {
        cd naive = std::exp(cd(0, t)) * std::pow(cd(1, 0) + std::exp(cd(0, t)), 1.5);
        CHECK(std::abs(f.evaluate(t) - naive) < 1e-12);
    }
}

TEST_CASE("derivative") {
    auto g = FourierSymbol::from_coefficients({{0, cd(1, 0)}, {1, cd(1, 0)}});
    auto dg = g.derivative();
    CHECK(dg.degree() == 1);
    CHECK(std::abs(dg.coeff(1) - cd(0, 1)) < 1e-16);
    CHECK(std::abs(dg.coeff(0)) < 1e-16);

    for (double alpha : {0.5, 1.0, 2.5}) {
        auto tw = FourierSymbol::from_family(std::make_shared<TwistedPowerFamily>(0, alpha), 32);
        cd expected = cd(0, 1) * alpha * std::pow(2.0, alpha - 1.0);
        CHECK(std::abs(tw.derivative_value(0.0) - expected) < 1e-12);
    }
}

TEST_CASE("multiply") {
    auto e1 = FourierSymbol::from_coefficients({{1, cd(1, 0)}});
    auto em1 = FourierSymbol::from_coefficients({{-1, cd(1, 0)}});
    auto one = e1.multiply(em1);
    CHECK(one.degree() == 0);
    CHECK(std::abs(one.coeff(0) - cd(1, 0)) < 1e-16);

    auto g = FourierSymbol::from_coefficients({{0, cd(1, 0)}, {1, cd(1, 0)}});
    auto g2 = g.multiply(g);
    CHECK(std::abs(g2.coeff(0) - cd(1, 0)) < 1e-15);
    CHECK(std::abs(g2.coeff(1) - cd(2, 0)) < 1e-15);
    CHECK(std::abs(g2.coeff(2) - cd(1, 0)) < 1e-15);

    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 10; ++rep) {
        auto a = random_trig_poly(rng, 5);
        auto b = random_trig_poly(rng, 6);
        auto c = random_trig_poly(rng, 4);
        auto lhs = a.multiply(b).multiply(c);
        auto rhs = a.multiply(b.multiply(c));
        for (int n = -lhs.degree(); n <= lhs.degree(); ++n)
            CHECK(std::abs(lhs.coeff(n) - rhs.coeff(n)) < 1e-12);
        auto ab = a.multiply(b), ba = b.multiply(a);
        for (int n = -ab.degree(); n <= ab.degree(); ++n)
            CHECK(std::abs(ab.coeff(n) - ba.coeff(n)) < 1e-12);
    }
}

TEST_CASE("krein algebra norm inequality") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        auto f = random_trig_poly(rng, 8);
        auto g = random_trig_poly(rng, 8);
        double lhs = std::pow(f.multiply(g).sobolev_half_norm(), 2);
        double nf = f.sobolev_half_norm(), ng = g.sobolev_half_norm();
        double sf = f.sup_norm_estimate(), sg = g.sup_norm_estimate();
        double rhs = 2.0 * nf * nf * sg * sg + 2.0 * sf * sf * ng * ng;
        CHECK(lhs <= rhs + 1e-10);
    }
}

TEST_CASE("sobolev half norm") {
    auto e1 = FourierSymbol::from_coefficients({{1, cd(1, 0)}});
    CHECK(e1.sobolev_half_norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    auto c = FourierSymbol::from_coefficients({{0, cd(3, 4)}});
    CHECK(c.sobolev_half_norm() == doctest::Approx(5.0).epsilon(1e-14));

    auto f = FourierSymbol::from_coefficients({{2, cd(3, 0)}, {-1, cd(1, 0)}});
    CHECK(f.sobolev_half_norm() == doctest::Approx(std::sqrt(29.0)).epsilon(1e-14));
    CHECK(std::abs(f.sobolev_half_norm_double_integral(256) - std::sqrt(29.0)) < 1e-6);

    // Parseval cross-check on random polynomials
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        auto g = random_trig_poly(rng, 16, 0.3);
        double a = g.sobolev_half_norm();
        double b = g.sobolev_half_norm_double_integral(256);
        CHECK(std::abs(a - b) < 1e-6 * std::max(1.0, a));
    }
}

TEST_CASE("omega form") {
    auto e1 = FourierSymbol::from_coefficients({{1, cd(1, 0)}});
    auto em1 = FourierSymbol::from_coefficients({{-1, cd(1, 0)}});
    CHECK(std::abs(omega_form(em1, e1) - cd(1, 0)) < 1e-15);

    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        auto f = random_trig_poly(rng, 9);
        auto g = random_trig_poly(rng, 7);
        // skew symmetry and bilinearity
        CHECK(std::abs(omega_form(f, g) + omega_form(g, f)) < 1e-12);
        // omega = (1/2pi i) integral f g' dt
        auto dg = g.derivative();
        cd integral = circle_mean([&](double t) { return f.evaluate(t) * dg.evaluate(t); }, 128);
        cd rhs = integral / cd(0, 1);
        CHECK(std::abs(omega_form(f, g) - rhs) < 1e-10);
        // |omega| <= product of W^{1/2} norms
        CHECK(std::abs(omega_form(f, g)) <=
              f.sobolev_half_norm() * g.sobolev_half_norm() + 1e-12);
    }
}

TEST_CASE("harmonic and analytic extension") {
    auto e1 = FourierSymbol::from_coefficients({{1, cd(1, 0)}});
    CHECK(std::abs(e1.harmonic_extension(cd(0, 0))) < 1e-16);

    auto g = FourierSymbol::from_coefficients({{0, cd(1, 0)}, {1, cd(1, 0)}});
    cd z(0.3, -0.2);
    CHECK(std::abs(g.analytic_extension(z) - (cd(1, 0) + z)) < 1e-15);
    CHECK(std::abs(g.analytic_derivative(z, 1) - cd(1, 0)) < 1e-15);
    CHECK(std::abs(g.analytic_derivative(z, 2)) < 1e-15);

    // harmonic extension equals the Poisson integral
    std::mt19937_64 rng(17);
    auto f = random_trig_poly(rng, 6);
    for (cd w : {cd(0.5, 0.1), cd(-0.2, 0.6), cd(0.0, 0.0)}) {
        double r = std::abs(w), th = std::arg(w);
        cd poisson = circle_mean(
            [&](double t) {
                double pr = (1.0 - r * r) / (1.0 - 2.0 * r * std::cos(th - t) + r * r);
                return pr * f.evaluate(t);
            },
            4096);
        CHECK(std::abs(f.harmonic_extension(w) - poisson) < 1e-8);
    }

    auto neg = FourierSymbol::from_coefficients({{-1, cd(1, 0)}});
    CHECK_THROWS(neg.analytic_extension(cd(0.1, 0.1)));
}

TEST_CASE("analytic jets match derivatives") {
    auto fam = std::make_shared<TwistedPowerFamily>(2, 0.5);
    auto f = FourierSymbol::from_family(fam, 32);
    cd z(0.2, 0.3);
    std::vector<cd> jet(4);
    f.analytic_jet(z, jet);
    // compare with the direct formula F = z^2 (1+z)^{1/2}
    cd F = z * z * std::pow(cd(1, 0) + z, 0.5);
    CHECK(std::abs(jet[0] - F) < 1e-13);
    // first derivative: 2z(1+z)^{1/2} + z^2 * 0.5 (1+z)^{-1/2}
    cd dF = 2.0 * z * std::pow(cd(1, 0) + z, 0.5) + z * z * 0.5 * std::pow(cd(1, 0) + z, -0.5);
    CHECK(std::abs(jet[1] - dF) < 1e-13);

    // coefficient-symbol jets: compare against finite differences
    auto p = FourierSymbol::from_coefficients(
        {{0, cd(1, 1)}, {1, cd(-2, 0.5)}, {3, cd(0.7, -0.3)}});
    std::vector<cd> pj(3);
    p.analytic_jet(z, pj);
    double h = 1e-5;
    cd d1 = (p.analytic_extension(z + cd(h, 0)) - p.analytic_extension(z - cd(h, 0))) / (2 * h);
    CHECK(std::abs(pj[1] - d1) < 1e-8);
}

TEST_CASE("circle zeros: families") {
    auto g = FourierSymbol::from_coefficients({{0, cd(1, 0)}, {1, cd(1, 0)}});
    auto zeros = g.circle_zeros();
    REQUIRE(zeros.size() == 1);
    CHECK(std::abs(zeros[0].location - kPi) < 1e-9);
    CHECK(std::abs(zeros[0].order - 2.0) < 2e-3);
    CHECK(std::abs(zeros[0].h_value - 1.0) < 1e-2);
    CHECK(std::abs(zeros[0].g_value - cd(1, 0)) < 1e-2);
    CHECK(zeros[0].profiled);

    auto e1 = FourierSymbol::from_coefficients({{1, cd(1, 0)}});
    CHECK(e1.circle_zeros().empty());

    for (double alpha : {0.5, 1.0, 1.5}) {
        for (int n : {0, 1, 2}) {
            auto tw = FourierSymbol::from_family(std::make_shared<TwistedPowerFamily>(n, alpha), 16);
            auto zs = tw.circle_zeros();
            REQUIRE(zs.size() == 1);
            CHECK(zs[0].location == doctest::Approx(kPi));
            CHECK(zs[0].order == doctest::Approx(2.0 * alpha));
            CHECK(zs[0].h_value == doctest::Approx(1.0));
            CHECK(zs[0].profiled);
        }
    }

    auto ss = FourierSymbol::from_family(std::make_shared<ShiftSumFamily>(4), 8);
    auto sz = ss.circle_zeros();
    REQUIRE(sz.size() == 3);
    for (int j = 1; j <= 3; ++j) {
        CHECK(sz[j - 1].location == doctest::Approx(kTwoPi * j / 4.0));
        CHECK(sz[j - 1].order == doctest::Approx(2.0));
        double s = std::sin(kPi * j / 4.0);
        CHECK(sz[j - 1].h_value == doctest::Approx(16.0 / (4.0 * s * s)));
    }

    // log_power: unprofiled zero at pi
    auto lp = FourierSymbol::from_family(std::make_shared<LogPowerFamily>(1.0, 5.0, false), 16);
    auto lz = lp.circle_zeros();
    REQUIRE(lz.size() == 1);
    CHECK(!lz[0].profiled);
}

TEST_CASE("circle zeros: numeric fit on coefficient symbols") {
    // 1 + z as plain coefficients goes through the numeric scan + fit
    auto g = FourierSymbol::from_coefficients({{0, cd(1, 0)}, {1, cd(1, 0)}});
    auto zs = g.circle_zeros();
    REQUIRE(zs.size() == 1);
    CHECK(std::abs(zs[0].location - kPi) < 1e-9);
    CHECK(std::abs(zs[0].order - 2.0) < 2e-3);
    CHECK(std::abs(zs[0].h_value - 1.0) < 1e-2);
    CHECK(zs[0].fit_residual < 1e-3);

    // double zero: (1+z)^2 -> beta = 4, h = 1
    auto g2 = FourierSymbol::from_coefficients({{0, cd(1, 0)}, {1, cd(2, 0)}, {2, cd(1, 0)}});
    auto z2 = g2.circle_zeros();
    REQUIRE(z2.size() == 1);
    CHECK(std::abs(z2[0].order - 4.0) < 4e-3);
    CHECK(std::abs(z2[0].h_value - 1.0) < 2e-2);
    CHECK(std::abs(z2[0].g_value - cd(2, 0)) < 2e-2);

    // two zeros: 1 - z^2 vanishes at t = 0 and t = pi
    auto h = FourierSymbol::from_coefficients({{0, cd(1, 0)}, {2, cd(-1, 0)}});
    auto hz = h.circle_zeros();
    REQUIRE(hz.size() == 2);
    CHECK(std::abs(hz[0].location - 0.0) < 1e-9);
    CHECK(std::abs(hz[1].location - kPi) < 1e-9);
    for (const auto& zp : hz) CHECK(std::abs(zp.order - 2.0) < 2e-3);

    // zero-free symbols report no zeros
    std::mt19937_64 rng(23);
    int checked = 0;
    while (checked < 10) {
        auto f = random_trig_poly(rng, 6);
        auto fc = FourierSymbol::from_coefficients({{0, f.coeff(0) + cd(30, 0)}});
        auto shifted = FourierSymbol::from_coefficients([&] {
            std::map<int, cd> m;
            for (int n = -6; n <= 6; ++n) m[n] = f.coeff(n);
            m[0] += cd(30, 0);  // push far from zero
            return m;
        }());
        (void)fc;
        CHECK(shifted.circle_zeros().empty());
        ++checked;
    }
}

TEST_CASE("stable evaluation near zero windows") {
    // |f|^2 and f'/f of 1+e^{it} close to the zero through absolute angles
    // (resolution-limited to u >> eps*pi) ...
    auto g = FourierSymbol::from_coefficients({{0, cd(1, 0)}, {1, cd(1, 0)}});
    const auto& zp = g.circle_zeros().at(0);
    for (double u : {1e-4, 1e-6}) {
        double t = kPi + u;
        double expect = 4.0 * std::pow(std::sin(0.5 * u), 2);  // |1+e^{i(pi+u)}|^2
        CHECK(std::abs(g.abs2(t) - expect) < 1e-8 * expect);
        cd expect_ld = cd(0.5 / std::tan(0.5 * u), 0.5);
        CHECK(std::abs(g.log_derivative(t) - expect_ld) < 1e-8 * std::abs(expect_ld));
    }
    // ... and through exact offsets, far below angle resolution
    for (double u : {1e-4, 1e-8, 1e-13, 1e-30, 1e-120}) {
        double expect = (u < 1e-6) ? u * u : 4.0 * std::pow(std::sin(0.5 * u), 2);
        CHECK(std::abs(g.abs2_near(zp, u) - expect) < 1e-11 * expect);
        cd expect_ld = cd(0.5 / std::tan(0.5 * u), 0.5);
        if (u < 1e-6) expect_ld = cd(1.0 / u, 0.5);
        CHECK(std::abs(g.log_derivative_near(zp, u) - expect_ld) <
              1e-11 * std::abs(expect_ld));
        // symmetric offsets work too
        CHECK(std::abs(g.abs2_near(zp, -u) - expect) < 1e-11 * expect);
    }

    // family closed forms reach arbitrarily deep
    auto tw = FourierSymbol::from_family(std::make_shared<TwistedPowerFamily>(1, 0.5), 16);
    const auto& tzp = tw.circle_zeros().at(0);
    for (double u : {1e-8, 1e-30, 1e-100, 1e-200}) {
        double q = tw.abs2_near(tzp, u);
        double expect = std::pow(u * u, 0.5);
        CHECK(q == doctest::Approx(expect).epsilon(1e-10));
        cd ld = tw.log_derivative_near(tzp, u);
        CHECK(std::abs(u * ld - cd(0.5, 0)) < 1e-6);  // g-value limit
    }

    // shift_sum and rational offset paths agree with absolute-angle values
    auto ss = FourierSymbol::from_family(std::make_shared<ShiftSumFamily>(3), 4);
    for (const auto& z : ss.circle_zeros()) {
        for (double u : {1e-4, -1e-4}) {
            CHECK(ss.abs2_near(z, u) ==
                  doctest::Approx(ss.abs2(z.location + u)).epsilon(1e-9));
            CHECK(std::abs(ss.log_derivative_near(z, u) -
                           ss.log_derivative(z.location + u)) <
                  1e-6 * std::abs(ss.log_derivative_near(z, u)));
        }
    }
    auto rat = FourierSymbol::from_family(
        std::make_shared<RationalFamily>(cd(1, 0),
                                         std::vector<std::pair<cd, int>>{{cd(-1, 0), 1},
                                                                         {cd(0.5, 0), 1}},
                                         std::vector<std::pair<cd, int>>{}),
        8);
    const auto& rzp = rat.circle_zeros().at(0);
    for (double u : {1e-9, 1e-30}) {
        // |f|^2 ~ |e^{i(pi+u)} + 1|^2 * |e^{i(pi+u)} - 1/2|^2 ~ u^2 * 9/4
        CHECK(rat.abs2_near(rzp, u) == doctest::Approx(u * u * 2.25).epsilon(1e-6));
        cd ld = rat.log_derivative_near(rzp, u);
        CHECK(std::abs(u * ld - rzp.g_value) < 1e-6);
    }
}

TEST_CASE("fejer truncation never increases sup norm") {
    for (double alpha : {0.5, 1.5}) {
        auto raw = FourierSymbol::from_family(std::make_shared<TwistedPowerFamily>(0, alpha), 32,
                                              TruncationMode::Raw);
        auto fej = FourierSymbol::from_family(std::make_shared<TwistedPowerFamily>(0, alpha), 32,
                                              TruncationMode::Fejer);
        // compare the truncated series values, not the family evaluator
        double mr = 0.0, mf = 0.0;
        for (int j = 0; j < 4096; ++j) {
            double t = kTwoPi * j / 4096;
            mr = std::max(mr, std::abs(raw.evaluate_series(t)));
            mf = std::max(mf, std::abs(fej.evaluate_series(t)));
        }
        CHECK(mf <= mr + 1e-12);
    }
}

TEST_CASE("interior zeros and conjugate") {
    auto tw = FourierSymbol::from_family(std::make_shared<TwistedPowerFamily>(3, 0.5), 32);
    auto iz = tw.interior_zeros();
    REQUIRE(iz.size() == 1);
    CHECK(std::abs(iz[0].first) < 1e-14);
    CHECK(iz[0].second == 3);

    auto p = FourierSymbol::from_coefficients({{0, cd(-0.25, 0)}, {2, cd(1, 0)}});  // z^2 - 1/4
    auto pz = p.interior_zeros();
    REQUIRE(pz.size() == 2);

    auto f = FourierSymbol::from_coefficients({{1, cd(2, 3)}, {-2, cd(0, 1)}});
    auto fc = f.conjugate();
    CHECK(std::abs(fc.coeff(-1) - std::conj(cd(2, 3))) < 1e-16);
    CHECK(std::abs(fc.coeff(2) - std::conj(cd(0, 1))) < 1e-16);
}

TEST_CASE("log power family basics") {
    auto lp = LogPowerFamily(1.0, 5.0, false);
    // psi(1) = 1/log 2
    CHECK(std::abs(lp.eval(0.0) - cd(1.0 / std::log(2.0), 0)) < 1e-12);
    // psi(0) = 1 in the disk
    CHECK(std::abs(lp.disk_eval(cd(0, 0)) - cd(1, 0)) < 1e-12);
    // derivative consistent with finite differences on the circle
    double t = 1.0, h = 1e-6;
    cd fd = (lp.eval(t + h) - lp.eval(t - h)) / (2 * h);
    CHECK(std::abs(lp.deriv(t) - fd) < 1e-6);

    auto rec = LogPowerFamily(1.0, 5.0, true);
    cd v = rec.disk_eval(cd(0.5, 0.2));
    CHECK(std::isfinite(v.real()));
    // reciprocal family tends to 0 at z = -1 along the circle
    CHECK(std::abs(rec.eval(kPi - 1e-5)) < 0.2);
}

TEST_CASE("shift families") {
    auto ss = ShiftSumFamily(5);
    for (double t : {0.0, 0.3, 2.0, 5.1}) {
        cd direct(0, 0);
        for (int k = 0; k < 5; ++k) direct += std::exp(cd(0, k * t));
        CHECK(std::abs(ss.eval(t) - direct) < 1e-12);
        CHECK(ss.abs2(t) == doctest::Approx(std::norm(direct)).epsilon(1e-9));
    }
    // log-derivative closed form vs direct ratio
    for (double t : {0.7, 2.2, 4.0}) {
        cd direct(0, 0), ddirect(0, 0);
        for (int k = 0; k < 5; ++k) {
            direct += std::exp(cd(0, k * t));
            ddirect += cd(0, static_cast<double>(k)) * std::exp(cd(0, k * t));
        }
        CHECK(std::abs(ss.log_deriv(t) - ddirect / direct) < 1e-10);
    }

    auto sp = ShiftPlusFamily(0.5);
    CHECK(std::abs(sp.eval(0.3) - (std::exp(cd(0, 0.3)) + 0.5)) < 1e-15);
    auto spz = sp.interior_zeros();
    REQUIRE(spz.size() == 1);
    CHECK(std::abs(spz[0].first - cd(-0.5, 0)) < 1e-14);

    auto sp1 = ShiftPlusFamily(1.0);
    auto prof = sp1.circle_zero_profiles();
    REQUIRE(prof.size() == 1);
    CHECK(prof[0].order == doctest::Approx(2.0));
}

TEST_CASE("coefficients_from_samples inverts evaluation") {
    std::mt19937_64 rng(29);
    auto f = random_trig_poly(rng, 10);
    std::vector<cd> samples(128);
    for (int j = 0; j < 128; ++j) samples[j] = f.evaluate(kTwoPi * j / 128);
    auto c = coefficients_from_samples(samples, 10);
    for (int n = -10; n <= 10; ++n) CHECK(std::abs(c[n + 10] - f.coeff(n)) < 1e-12);
}
