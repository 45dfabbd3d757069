#include "srgg/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

using srgg::quad::integrate;

TEST(Quadrature, PolynomialsAreExact) {
    auto r = integrate([](double x) { return 3 * x * x - 2 * x + 1; }, 0.0, 2.0);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 8.0 - 4.0 + 2.0, 1e-13);
}

TEST(Quadrature, Sine) {
    auto r = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    EXPECT_NEAR(r.value, 2.0, 1e-13);
}

TEST(Quadrature, EndpointSingularity) {
    auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {}, {1e-12, 1e-10, 4000});
    EXPECT_NEAR(r.value, 2.0, 1e-8);
}

TEST(Quadrature, BreakpointsHandleJumps) {
    const std::vector<double> cut{0.3};
    auto r = integrate([](double x) { return x < 0.3 ? 1.0 : 5.0; }, 0.0, 1.0, cut);
    EXPECT_NEAR(r.value, 0.3 + 3.5, 1e-13);
    EXPECT_LE(r.intervals, 2);
}

TEST(Quadrature, ComplexIntegrand) {
    using C = std::complex<double>;
    auto r = integrate([](double x) { return std::exp(C(0.0, 5.0 * x)) * x; }, 0.0, 2 * std::numbers::pi);
    // int_0^{2pi} x e^{5ix} dx = 2 pi / (5 i)
    const C expect = 2 * std::numbers::pi / C(0.0, 5.0);
    EXPECT_NEAR(std::abs(r.value - expect), 0.0, 1e-12);
}

TEST(Quadrature, SemiInfinite) {
    auto r = srgg::quad::integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0, 1.0);
    EXPECT_NEAR(r.value, 1.0, 1e-12);
    auto g = srgg::quad::integrate_to_infinity([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0);
    EXPECT_NEAR(g.value, std::numbers::pi / 2, 1e-10);
}

TEST(Quadrature, CheckedThrowsWhenBudgetTooSmall) {
    EXPECT_THROW(srgg::quad::integrate_checked([](double x) { return std::sin(1.0 / (x + 1e-6)); }, 0.0, 1.0, {},
                                               {1e-14, 1e-14, 5}),
                 srgg::ConvergenceError);
}

TEST(Quadrature, EmptyInterval) {
    auto r = integrate([](double) { return 1.0; }, 1.0, 1.0);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.value, 0.0);
}
