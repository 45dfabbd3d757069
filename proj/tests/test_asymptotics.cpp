#include "srgg/asymptotics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace srgg;

namespace {

// int_0^inf u^{s-1} h2(exp(-u^eta)) du by composite Simpson in x = log u.
double mellin_oracle(double s, double eta) {
    const auto c = Connection::rayleigh(eta);
    const double lo = -40.0 / (s + eta), hi = std::log(60.0) / eta;
    const long n = 400'000;
    const double h = (hi - lo) / n;
    double sum = 0.0;
    for (long i = 0; i <= n; ++i) {
        const double x = lo + i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        sum += w * std::exp(s * x) * entropy_scaled(c, std::exp(x));
    }
    return sum * h / 3.0;
}

double ball_density_oracle(double r) { return 3.0 * r * r * (1.0 - 0.75 * r + r * r * r / 16.0); }

} // namespace

TEST(RayleighMellin, MatchesDirectIntegration) {
    for (int d = 1; d <= 3; ++d)
        for (double eta : {1.0, 2.0, 4.0}) {
            const double oracle = mellin_oracle(d, eta);
            EXPECT_NEAR(rayleigh_mellin(d, eta), oracle, 1e-9 * oracle) << d << " " << eta;
        }
}

TEST(RayleighMellin, FrozenValues) {
    EXPECT_NEAR(rayleigh_mellin(1, 2), 0.82274283812531086, 1e-13);
    EXPECT_NEAR(rayleigh_mellin(2, 2), std::numbers::pi * std::numbers::pi / 12, 1e-13);
    EXPECT_NEAR(rayleigh_mellin(3, 1), 7.8586284074379178, 1e-12);
    EXPECT_NEAR(rayleigh_mellin(3, 4), 0.39906236598873035, 1e-13);
}

TEST(SmallR0, ScalesAsPowerOfRange) {
    for (int d = 1; d <= 3; ++d) {
        const double a = small_r0_leading(d, 2.0, 0.01).value;
        const double b = small_r0_leading(d, 2.0, 0.02).value;
        EXPECT_NEAR(b / a, std::pow(2.0, d), 1e-13);
    }
}

TEST(SmallR0, SquareEtaTwoConstant) {
    // Gamma(1) = 1, zeta(2) = pi^2/6, S(1) = 1.
    const double pi = std::numbers::pi;
    EXPECT_NEAR(small_r0_leading(2, 2.0, 1.0).value, 2 * pi / 2 * (1 + pi * pi / 6 - 1), 1e-12);
}

TEST(SmallR0, IntervalRatioNearOne) {
    const auto c = Connection::rayleigh(2);
    const double r0 = 1e-3;
    const double q = entropy_per_edge_quadrature(Domain::interval(), c, r0).value;
    EXPECT_NEAR(q / small_r0_leading(1, 2.0, r0).value, 1.0, 0.01);
}

TEST(SmallR0, SecondOrderIsCloser) {
    const auto c = Connection::rayleigh(2);
    for (const auto& dom : {Domain::interval(), Domain::square()}) {
        const double r0 = 0.05;
        const double q = entropy_per_edge_quadrature(dom, c, r0).value;
        const double lead = small_r0_leading(dom.dim(), 2.0, r0).value;
        const auto second = small_r0_second_order(dom, 2.0, r0);
        EXPECT_LT(std::abs(q - second.value), std::abs(q - lead)) << to_string(dom);
        EXPECT_EQ(second.regime, Regime::SmallR0SecondOrder);
    }
    const double c1 = small_r0_second_order(Domain::interval(), 2.0, 0.01).value - small_r0_leading(1, 2.0, 0.01).value;
    const double c2 = small_r0_second_order(Domain::interval(), 2.0, 0.02).value - small_r0_leading(1, 2.0, 0.02).value;
    EXPECT_LT(c1, 0.0);
    EXPECT_NEAR((c2 / small_r0_leading(1, 2.0, 0.02).value) / (c1 / small_r0_leading(1, 2.0, 0.01).value), 2.0, 1e-12);
    EXPECT_THROW(small_r0_second_order(Domain::disk(), 2.0, 0.01), UnsupportedError);
}

TEST(Moments, AnalyticQuadrature) {
    const auto i = domain_moments(Domain::interval(), 2.0, Method::Quadrature);
    EXPECT_NEAR(i.e_r_eta, 1.0 / 6.0, 1e-10);
    EXPECT_NEAR(i.e_r_eta_log, -7.0 / 72.0, 1e-10);
    const auto t = domain_moments(Domain::torus1d(), 2.0, Method::Quadrature);
    EXPECT_NEAR(t.e_r_eta, 1.0 / 12.0, 1e-10);
    EXPECT_NEAR(t.e_r_eta_log, -std::numbers::ln2 / 12.0 - 1.0 / 36.0, 1e-10);
}

TEST(Moments, MonteCarlo) {
    const auto m = domain_moments(Domain::interval(), 2.0, Method::MonteCarlo, {10'000'000, 17, kDefaultChunk});
    EXPECT_NEAR(m.e_r_eta, 1.0 / 6.0, 3 * m.std_error_r_eta);
    EXPECT_NEAR(m.e_r_eta_log, -7.0 / 72.0, 3 * m.std_error_r_eta_log);
    const auto b = domain_moments(Domain::ball(), 4.0, Method::MonteCarlo, {10'000'000, 18, kDefaultChunk});
    auto exact = quad::integrate([](double r) { return std::pow(r, 4) * ball_density_oracle(r); }, 0.0, 2.0);
    EXPECT_NEAR(b.e_r_eta, exact.value, 3 * b.std_error_r_eta);
    EXPECT_GT(b.e_r_eta, 0.0);
    EXPECT_LT(b.e_r_eta, 16.0);
}

TEST(LargeR0, TracksQuadrature) {
    const auto c = Connection::rayleigh(2);
    for (const auto& dom : {Domain::interval(), Domain::torus1d()}) {
        const auto m = domain_moments(dom, 2.0, Method::Quadrature);
        double prev = INFINITY;
        for (double r0 : {2.0, 5.0, 10.0, 50.0}) {
            const double q = entropy_per_edge_quadrature(dom, c, r0).value;
            const double err = std::abs(q / large_r0(dom, 2.0, r0, m).value - 1.0);
            EXPECT_LT(err, prev);
            prev = err;
        }
    }
    EXPECT_THROW(large_r0(Domain::interval(), 4.0, 10.0, domain_moments(Domain::interval(), 2.0, Method::Quadrature)),
                 DomainError);
}

TEST(Integrability, Examples) {
    EXPECT_EQ(integrability_class(Connection::rayleigh(2), 3).growth, Growth::ThetaR0PowD);
    EXPECT_EQ(integrability_class(Connection::power_law(3), 3).growth, Growth::SuperPolynomial);
    EXPECT_EQ(integrability_class(Connection::power_law(3), 2).growth, Growth::ThetaR0PowD);
    EXPECT_EQ(integrability_class(Connection::hard(), 2).growth, Growth::ThetaR0PowD);
    EXPECT_EQ(integrability_class(Connection::constant(0.5), 1).growth, Growth::SuperPolynomial);
}

TEST(Integrability, NumericCheckAgrees) {
    for (auto c : {Connection::rayleigh(1), Connection::rayleigh(4), Connection::fermi_dirac(0.0),
                   Connection::fermi_dirac(-2.0), Connection::power_law(3), Connection::power_law(6)})
        for (int d = 1; d <= 3; ++d) {
            const auto rep = integrability_class(c, d);
            EXPECT_TRUE(rep.agrees) << rep.diagnostic;
            EXPECT_TRUE(rep.diagnostic.empty());
        }
}

TEST(Integrability, SlowTailIsReportedAndAnalyticRuleWins) {
    // x^{-1.5} log x tails are still moving by several percent at T = 1e4.
    const auto rep = integrability_class(Connection::power_law(1.5), 1);
    EXPECT_EQ(rep.growth, Growth::ThetaR0PowD);
    EXPECT_EQ(rep.numeric, Growth::SuperPolynomial);
    EXPECT_FALSE(rep.agrees);
    EXPECT_FALSE(rep.diagnostic.empty());
}
