#include "srgg/entropy.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace srgg;

namespace {

// Composite Simpson rule on a uniform grid.
template <class F>
double simpson_oracle(F&& f, double a, double b, long n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (long i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

McConfig mc(std::size_t n, std::uint64_t seed) { return {n, seed, kDefaultChunk}; }

} // namespace

TEST(Quadrature, ConstantConnection) {
    const auto c = Connection::constant(0.3);
    for (double r0 : {0.01, 1.0, 50.0})
        EXPECT_NEAR(entropy_per_edge_quadrature(Domain::interval(), c, r0).value, binary_entropy(0.3), 1e-12);
}

TEST(Quadrature, HardConnectionLargeRange) {
    for (double r0 : {1.0, 2.0}) EXPECT_EQ(entropy_per_edge_quadrature(Domain::interval(), Connection::hard(), r0).value, 0.0);
}

TEST(Quadrature, MatchesSimpsonOracle) {
    const auto c = Connection::rayleigh(2);
    const double r0 = 0.1;
    const double oracle = simpson_oracle(
        [&](double r) { return (2 - 2 * r) * entropy_scaled(c, r / r0); }, 0.0, 1.0, 1'000'000);
    const auto est = entropy_per_edge_quadrature(Domain::interval(), c, r0);
    EXPECT_NEAR(est.value, oracle, 1e-8);
    EXPECT_EQ(est.method, Method::Quadrature);
    EXPECT_EQ(est.r0, r0);
}

TEST(Quadrature, RefusesDomainsWithoutClosedForm) {
    EXPECT_THROW(entropy_per_edge_quadrature(Domain::cube(), Connection::rayleigh(2), 0.1), UnsupportedError);
    EXPECT_THROW(entropy_per_edge_quadrature(Domain::interval(), Connection::rayleigh(2), 0.0), DomainError);
}

TEST(MonteCarlo, SquareAgreesWithQuadrature) {
    const auto c = Connection::rayleigh(2);
    const auto q = entropy_per_edge_quadrature(Domain::square(), c, 0.2);
    const auto m = entropy_per_edge_mc(Domain::square(), c, 0.2, mc(1'000'000, 5));
    EXPECT_NEAR(m.value, q.value, 3 * m.std_error);
    EXPECT_GT(m.std_error, 0.0);
    EXPECT_EQ(m.n_pairs, 1'000'000u);
}

TEST(MonteCarlo, HardIsExactlyZero) {
    const auto m = entropy_per_edge_mc(Domain::disk(), Connection::hard(), 0.3, mc(10'000, 1));
    EXPECT_EQ(m.value, 0.0);
    EXPECT_EQ(m.std_error, 0.0);
}

TEST(MonteCarlo, BallAgreesWithHistogramQuadrature) {
    const auto c = Connection::rayleigh(4);
    const auto m = entropy_per_edge_mc(Domain::ball(), c, 0.5, mc(1'000'000, 2024));
    const HistogramDensity h(empirical_distance_cdf(Domain::ball(), 1'000'000, 7), Domain::ball().diameter());
    const auto q = entropy_per_edge_histogram(h, c, 0.5);
    const double combined = std::hypot(m.std_error, q.std_error);
    EXPECT_NEAR(m.value, q.value, 3 * combined);
}

TEST(MonteCarlo, DeterministicForSeed) {
    const auto c = Connection::rayleigh(1);
    const auto a = entropy_per_edge_mc(Domain::torus1d(), c, 0.1, mc(50'000, 9));
    const auto b = entropy_per_edge_mc(Domain::torus1d(), c, 0.1, mc(50'000, 9));
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.std_error, b.std_error);
    EXPECT_THROW(entropy_per_edge_mc(Domain::interval(), c, 0.1, mc(10, 1)), DomainError);
}

TEST(Bounds, EntropyBelowErdosRenyiEntropy) {
    for (const auto& dom : {Domain::interval(), Domain::torus1d(), Domain::square(), Domain::disk()})
        for (double eta : {1.0, 2.0, 4.0})
            for (double r0 : {0.05, 0.2, 1.0, 3.0}) {
                const auto c = Connection::rayleigh(eta);
                const double h = entropy_per_edge_quadrature(dom, c, r0).value;
                const auto pm = mean_connection(dom, c, r0, Method::Quadrature);
                EXPECT_GE(h, 0.0);
                EXPECT_LE(h, std::numbers::ln2);
                EXPECT_LE(h, binary_entropy_pq(pm.p, pm.q) + 1e-13);
                EXPECT_GE(compressibility_difference(dom, c, r0), 0.0);
            }
}

TEST(Instance, SinglePairAtHalfProbability) {
    GraphInstance g{Domain::interval(), Connection::rayleigh(2), 1.0, 0, {}, {}};
    const double r = std::sqrt(std::numbers::ln2);
    g.positions = {{0.0, 0, 0}, {r, 0, 0}};
    EXPECT_NEAR(conditional_entropy_of_instance(g).value, std::numbers::ln2, 1e-15);
    g.positions.pop_back();
    EXPECT_THROW(conditional_entropy_of_instance(g), DomainError);
}

TEST(Instance, RepetitionsMatchQuadrature) {
    const auto c = Connection::rayleigh(2);
    const double q = entropy_per_edge_quadrature(Domain::interval(), c, 0.1).value;
    MomentSum reps;
    for (std::uint64_t s = 0; s < 50; ++s)
        reps.add(conditional_entropy_of_instance(generate_srgg(Domain::interval(), c, 0.1, 500, 100 + s, false)).value);
    EXPECT_NEAR(reps.mean(), q, 3 * reps.std_error());
}

TEST(Instance, HardIsZero) {
    const auto g = generate_srgg(Domain::square(), Connection::hard(), 0.2, 100, 3);
    EXPECT_EQ(conditional_entropy_of_instance(g).value, 0.0);
}

TEST(Generate, ConstantExtremes) {
    const auto full = generate_srgg(Domain::square(), Connection::constant(1.0), 1.0, 40, 1);
    EXPECT_EQ(full.edges.size(), 40u * 39u / 2u);
    const auto none = generate_srgg(Domain::square(), Connection::constant(0.0), 1.0, 40, 1);
    EXPECT_TRUE(none.edges.empty());
    for (const auto& [i, j] : full.edges) EXPECT_LT(i, j);
}

TEST(Generate, EdgeDensityMatchesMeanProbability) {
    const auto c = Connection::rayleigh(2);
    const double pbar = mean_connection_prob(Domain::interval(), c, 0.1, Method::Quadrature);
    const std::size_t n = 2000;
    const double pairs = n * (n - 1) / 2.0;
    MomentSum reps;
    double first = 0.0;
    for (std::uint64_t s = 0; s < 8; ++s) {
        const auto g = generate_srgg(Domain::interval(), c, 0.1, n, 500 + s);
        const double dens = g.edges.size() / pairs;
        if (s == 0) first = dens;
        reps.add(dens);
    }
    EXPECT_NEAR(first, pbar, 3 * std::sqrt(reps.variance()));
    EXPECT_NEAR(reps.mean(), pbar, 3 * reps.std_error());
}

TEST(MeanConnection, Examples) {
    EXPECT_NEAR(mean_connection_prob(Domain::square(), Connection::constant(0.2), 0.5, Method::Quadrature), 0.2, 1e-13);
    EXPECT_NEAR(mean_connection_prob(Domain::interval(), Connection::hard(), 0.5, Method::Quadrature), 0.75, 1e-13);
    EXPECT_NEAR(mean_connection_prob(Domain::torus1d(), Connection::rayleigh(2), 0.1, Method::Quadrature),
                0.1 * std::sqrt(std::numbers::pi) * std::erf(5.0), 1e-13);
    const auto m = mean_connection(Domain::torus1d(), Connection::rayleigh(2), 0.1, Method::MonteCarlo, mc(200'000, 3));
    EXPECT_NEAR(m.p, 0.1 * std::sqrt(std::numbers::pi) * std::erf(5.0), 3 * m.std_error);
    EXPECT_NEAR(m.p + m.q, 1.0, 1e-12);
}

TEST(Compressibility, ConstantHasNoGap) {
    EXPECT_NEAR(compressibility_difference(Domain::interval(), Connection::constant(0.4), 0.1), 0.0, 1e-12);
    EXPECT_THROW(compressibility_difference(Domain::interval(), Connection::constant(1.0), 0.1), DomainError);
}

TEST(Compressibility, DivergesAsRangeShrinks) {
    const auto c = Connection::rayleigh(2);
    EXPECT_GT(compressibility_difference(Domain::interval(), c, 1e-4),
              compressibility_difference(Domain::interval(), c, 1e-3));
}

TEST(Compressibility, VanishesForLargeRange) {
    const auto c = Connection::rayleigh(2);
    const double at100 = compressibility_difference(Domain::interval(), c, 100.0);
    EXPECT_LT(at100, 1e-2);
    EXPECT_LT(at100, compressibility_difference(Domain::interval(), c, 50.0));
    EXPECT_LT(compressibility_difference(Domain::interval(), c, 50.0),
              compressibility_difference(Domain::interval(), c, 20.0));
}

TEST(Compressibility, MonteCarloPathForCube) {
    const double v = compressibility_difference(Domain::cube(), Connection::rayleigh(2), 0.2, mc(100'000, 4));
    EXPECT_GT(v, 0.0);
}
