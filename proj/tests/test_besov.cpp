#include "doctest.h"

#include <memory>

#include "ttrace/quadrature.hpp"
#include "ttrace/symbol.hpp"

using namespace ttrace;

namespace {

BesovReport run(std::shared_ptr<const Family> fam, double p, int n = 0) {
    auto f = FourierSymbol::from_family(std::move(fam), 64);
    return besov_integral(f, p, n);
}

bool finite_verdict(const BesovReport& r) {
    return r.verdict == "finite" || r.verdict == "marginal-finite";
}

bool divergent_verdict(const BesovReport& r) {
    return r.verdict == "divergent" || r.verdict == "marginal-divergent";
}

}  // namespace

TEST_CASE("binomial symbols lie in every Besov class") {
    // (1+z)^alpha: octave contributions decay geometrically at rate 2^{-alpha p}
    for (double p : {0.3, 1.0}) {
        auto r = run(std::make_shared<TwistedPowerFamily>(0, 0.5), p);
        INFO("p=", p, " verdict=", r.verdict, " beta=", r.beta_hat, " sum=", r.partial_sum);
        CHECK(r.verdict == "finite");
    }
    // integer power: the derivative order exceeds the polynomial degree
    auto r1 = run(std::make_shared<TwistedPowerFamily>(0, 1.0), 0.3);
    CHECK(r1.verdict == "finite");
    CHECK(r1.partial_sum < 1e-12);
}

TEST_CASE("log-quotient symbols split at p = 1/(1+alpha)") {
    // psi = z/log(1+z): membership iff p(1+alpha) > 1, here alpha = 1
    auto lo = run(std::make_shared<LogPowerFamily>(1.0, 2.0, false), 0.4);
    INFO("p=0.4 verdict=", lo.verdict, " beta=", lo.beta_hat, " gamma=", lo.gamma_hat);
    CHECK(divergent_verdict(lo));
    auto hi = run(std::make_shared<LogPowerFamily>(1.0, 2.0, false), 0.6);
    INFO("p=0.6 verdict=", hi.verdict, " beta=", hi.beta_hat, " gamma=", hi.gamma_hat);
    CHECK(hi.verdict == "finite");
}

TEST_CASE("reciprocal-log symbols split exactly at p = 1") {
    // 1/(C - log psi): increments k^{-p} (log k)^{-2p}, so p = 1 is the
    // logarithmic borderline the power-law part cannot decide alone
    auto lo = run(std::make_shared<LogPowerFamily>(1.0, 2.0, true), 0.9);
    INFO("p=0.9 verdict=", lo.verdict, " beta=", lo.beta_hat, " gamma=", lo.gamma_hat);
    CHECK(divergent_verdict(lo));
    CHECK(lo.verdict == "divergent");
    auto hi = run(std::make_shared<LogPowerFamily>(1.0, 2.0, true), 1.0);
    INFO("p=1.0 verdict=", hi.verdict, " beta=", hi.beta_hat, " gamma=", hi.gamma_hat);
    CHECK(finite_verdict(hi));
}

TEST_CASE("verdict does not depend on the derivative order used") {
    auto a = run(std::make_shared<LogPowerFamily>(1.0, 2.0, false), 0.6, 4);
    auto b = run(std::make_shared<LogPowerFamily>(1.0, 2.0, false), 0.6, 5);
    CHECK(a.verdict == "finite");
    CHECK(b.verdict == "finite");
    CHECK(a.derivative_order == 4);
    CHECK(b.derivative_order == 5);
}

TEST_CASE("polynomial symbols are trivially finite") {
    auto f = FourierSymbol::from_coefficients({{1, cd(1, 0)}, {3, cd(1, 0)}});
    auto r = besov_integral(f, 0.5);
    CHECK(r.verdict == "finite");
}

TEST_CASE("underdetermined weight is refused") {
    auto f = FourierSymbol::from_coefficients({{0, cd(1, 0)}, {1, cd(1, 0)}});
    CHECK_THROWS(besov_integral(f, 0.3, 3));  // p n = 0.9 <= 1
    CHECK_THROWS(besov_integral(f, -1.0));
}
