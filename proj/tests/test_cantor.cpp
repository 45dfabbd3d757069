#include "srgg/asymptotics.hpp"
#include "srgg/cantor.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace srgg;

namespace {

// Displacement sampler with one uniform draw per digit, independent of the
// library's bit-packed sampler.
struct OracleSampler {
    double alpha;
    int depth = 40;
    std::mt19937_64 eng;
    std::uniform_int_distribution<int> bit{0, 1};

    OracleSampler(double a, std::uint64_t seed) : alpha(a), eng(seed) {}

    double displacement() {
        double r = 0.0, scale = 1.0;
        for (int n = 1; n <= depth; ++n) {
            scale /= alpha;
            r += (alpha - 1.0) * (bit(eng) - bit(eng)) * scale;
        }
        return r;
    }
};

struct Mean {
    double value, std_error;
};

template <class F>
Mean oracle_mean(double alpha, std::size_t n, std::uint64_t seed, F&& f) {
    OracleSampler s(alpha, seed);
    MomentSum acc;
    for (std::size_t i = 0; i < n; ++i) acc.add(f(s.displacement()));
    return {acc.mean(), acc.std_error()};
}

// int e^{sx} h2(p(e^x)) dx by composite Simpson.
cplx psi_oracle(const Connection& c, cplx s, double lo, double hi, long n) {
    const double h = (hi - lo) / n;
    cplx sum = 0.0;
    for (long i = 0; i <= n; ++i) {
        const double x = lo + i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        sum += w * std::exp(s * x) * entropy_scaled(c, std::exp(x));
    }
    return sum * h / 3.0;
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= x.size();
    my /= x.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

} // namespace

TEST(CantorSpec, Validation) {
    EXPECT_THROW((CantorSpec{2.0, 64}.validate()), DomainError);
    EXPECT_THROW((CantorSpec{3.0, 10}.validate()), DomainError);
    EXPECT_THROW((CantorSpec{3.0, 65}.validate()), DomainError);
    EXPECT_NEAR((CantorSpec{3.0, 64}.hausdorff_d()), 0.63092975357145743, 1e-15);
    EXPECT_DOUBLE_EQ((CantorSpec{4.0, 64}.hausdorff_d()), 0.5);
}

TEST(CantorSampling, DigitExtremes) {
    const CantorSpec s{3.0, 20};
    EXPECT_EQ(cantor_point_from_bits(s, 0), 0.0);
    EXPECT_NEAR(cantor_point_from_bits(s, ~std::uint64_t{0}), 1.0 - std::pow(3.0, -20), 1e-15);
    EXPECT_NEAR(cantor_point_from_bits({3.0, 64}, ~std::uint64_t{0}), 1.0, 1e-15);
}

TEST(CantorSampling, TruncationBound) {
    Engine eng = make_stream(3);
    for (double a : {2.5, 3.0, 10.0}) {
        const CantorSpec deep{a, 64}, shallow{a, 20};
        for (int i = 0; i < 1000; ++i) {
            const std::uint64_t bits = eng();
            const double gap = cantor_point_from_bits(deep, bits) - cantor_point_from_bits(shallow, bits);
            EXPECT_GE(gap, -1e-15);
            EXPECT_LE(gap, std::pow(a, -20) / (1.0 - 1.0 / a) + 1e-15);
        }
    }
}

TEST(CantorSampling, MeanIsOneHalf) {
    const CantorSpec s{3.0, 64};
    Engine eng = make_stream(21);
    MomentSum acc;
    for (int i = 0; i < 1'000'000; ++i) acc.add(sample_cantor_point(s, eng));
    EXPECT_NEAR(acc.mean(), 0.5, 3 * acc.std_error());
}

TEST(CantorSampling, ThreadCountInvariant) {
    const CantorSpec s{3.0, 64};
    set_worker_count(1);
    const auto a = sample_cantor_displacements(s, 200'000, 9, 4096);
    set_worker_count(4);
    const auto b = sample_cantor_displacements(s, 200'000, 9, 4096);
    set_worker_count(0);
    EXPECT_EQ(a, b);
}

TEST(CantorMoments, EvenMomentExamples) {
    EXPECT_DOUBLE_EQ(cantor_even_moment({3.0, 64}, 0), 0.5);
    EXPECT_NEAR(cantor_even_moment({3.0, 64}, 1), 0.125, 1e-15);
    for (double a : {2.5, 4.0, 6.0, 10.0})
        EXPECT_NEAR(2 * cantor_even_moment({a, 64}, 1), (a - 1) / (2 * (a + 1)), 1e-15) << a;
}

TEST(CantorMoments, AgreeWithMonteCarlo) {
    for (double a : {3.0, 4.5}) {
        CantorMoments m(a);
        for (int n = 1; n <= 6; ++n) {
            const auto mc = oracle_mean(a, 400'000, 100 + n, [n](double r) { return std::pow(std::abs(r), n); });
            EXPECT_NEAR(m.abs_moment(n), mc.value, 3 * mc.std_error) << a << " " << n;
            if (n % 2 == 0) {
                EXPECT_DOUBLE_EQ(m.abs_moment(n), m.signed_moment(n));
                EXPECT_NEAR(2 * cantor_even_moment({a, 64}, n / 2), mc.value, 3 * mc.std_error);
            } else {
                EXPECT_EQ(m.signed_moment(n), 0.0);
            }
        }
    }
}

TEST(CantorMoments, HighOrdersStayFinite) {
    CantorMoments m(3.0);
    double prev = 1.0;
    for (int n = 2; n <= 2000; n += 2) {
        const double v = m.signed_moment(n);
        EXPECT_TRUE(std::isfinite(v));
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(CantorMomentSeries, FixedPointAtMinusTwo) {
    const CantorSpec s{3.0, 64};
    const cplx v = cantor_moment_series(s, -2.0);
    EXPECT_NEAR(v.real(), 0.125, 1e-12);
    EXPECT_EQ(v.imag(), 0.0);
    const double c2 = cantor_even_moment(s, 1);
    EXPECT_NEAR((4.0 * 0.5 + c2) / 17.0, 0.125, 1e-15);
}

TEST(CantorMomentSeries, NegativeMomentMatchesMonteCarlo) {
    const double sexp = 0.2;
    const auto mc = oracle_mean(3.0, 10'000'000, 77, [sexp](double r) { return 0.5 * std::pow(std::abs(r), -sexp); });
    const cplx v = cantor_moment_series({3.0, 64}, sexp);
    EXPECT_NEAR(v.real(), mc.value, 3 * mc.std_error);
    EXPECT_EQ(v.imag(), 0.0);
}

TEST(CantorMomentSeries, Poles) {
    const CantorSpec s{3.0, 64};
    EXPECT_GT(std::abs(cantor_moment_series(s, s.hausdorff_d() + 1e-6)), 1e4);
    EXPECT_THROW(cantor_moment_series(s, cantor_pole(s, 0)), DomainError);
    EXPECT_THROW(cantor_moment_series(s, cantor_pole(s, 2)), DomainError);
    for (int m = -50; m <= 50; ++m)
        EXPECT_LT(std::abs(2.0 * std::exp(-cantor_pole(s, m) * std::log(3.0)) - 1.0), 1e-12);
}

TEST(CantorShiftTransform, CascadeMatchesSeries) {
    for (double a : {3.0, 4.0, 10.0}) {
        const CantorSpec s{a, 64};
        for (cplx z : {cplx{0.2, 0}, cplx{0.63, 0}, cplx{1.5, 0}}) {
            EXPECT_NEAR(std::abs(cantor_shift_transform(s, z) - cantor_shift_transform_series(s, z)), 0.0, 1e-13);
        }
        for (int m = 1; m <= 3; ++m) {
            const cplx z = cantor_pole(s, m);
            EXPECT_NEAR(std::abs(cantor_shift_transform(s, z) - cantor_shift_transform_series(s, z)), 0.0, 1e-11);
        }
    }
}

TEST(CantorShiftTransform, MatchesMonteCarlo) {
    const CantorSpec s{3.0, 64};
    const cplx z = cantor_pole(s, 2);
    OracleSampler o(3.0, 555);
    MomentSum re, im;
    for (int i = 0; i < 1'000'000; ++i) {
        const cplx v = std::exp(-z * std::log(2.0 + o.displacement()));
        re.add(v.real());
        im.add(v.imag());
    }
    const cplx j = cantor_shift_transform(s, z);
    EXPECT_NEAR(j.real(), re.mean(), 3 * re.std_error());
    EXPECT_NEAR(j.imag(), im.mean(), 3 * im.std_error());
}

TEST(CantorShiftTransform, HalfRangeMatchesMonteCarlo) {
    const CantorSpec s{3.0, 64};
    const cplx z = cantor_pole(s, 1);
    OracleSampler o(3.0, 556);
    MomentSum re, im;
    for (int i = 0; i < 1'000'000; ++i) {
        const double r = o.displacement();
        const cplx v = r >= 0.0 ? std::exp(-z * std::log(2.0 + r)) : cplx{0.0};
        re.add(v.real());
        im.add(v.imag());
    }
    const cplx j = cantor_half_shift_transform(s, z);
    EXPECT_NEAR(j.real(), re.mean(), 3 * re.std_error());
    EXPECT_NEAR(j.imag(), im.mean(), 3 * im.std_error());
}

TEST(MellinPsi, RealAxis) {
    const double pi = std::numbers::pi;
    EXPECT_NEAR(mellin_psi(Connection::rayleigh(2), 2.0).real(), pi * pi / 12, 1e-11);
    EXPECT_EQ(mellin_psi(Connection::rayleigh(2), 2.0).imag(), 0.0);
    for (double eta : {1.0, 4.0})
        for (double sr : {0.4, 1.0, 2.5})
            EXPECT_NEAR(mellin_psi(Connection::rayleigh(eta), sr).real(), rayleigh_mellin(sr, eta),
                        1e-10 * rayleigh_mellin(sr, eta));
}

TEST(MellinPsi, ComplexMatchesOracle) {
    const CantorSpec s{3.0, 64};
    const auto ray = Connection::rayleigh(4);
    for (int m : {1, 3}) {
        const cplx z = cantor_pole(s, m);
        EXPECT_NEAR(std::abs(mellin_psi(ray, z) - psi_oracle(ray, z, -14.0, 1.7, 2'000'000)), 0.0, 1e-10);
    }
    const auto fd = Connection::fermi_dirac(-1.0);
    const cplx z = cantor_pole(s, 2);
    EXPECT_NEAR(std::abs(mellin_psi(fd, z) - psi_oracle(fd, z, -60.0, std::log(760.0), 4'000'000)), 0.0, 1e-9);
}

TEST(MellinPsi, ConjugateSymmetry) {
    const cplx z{0.7, 9.3};
    for (auto c : {Connection::rayleigh(2), Connection::fermi_dirac(0.5), Connection::power_law(3)}) {
        const cplx a = mellin_psi(c, z), b = mellin_psi(c, std::conj(z));
        EXPECT_NEAR(std::abs(a - std::conj(b)), 0.0, 1e-12) << to_string(c);
    }
}

TEST(MellinPsi, DecayAlongPoles) {
    const CantorSpec s{3.0, 64};
    for (auto c : {Connection::power_law(3), Connection::rayleigh(4)}) {
        std::vector<double> m, mag;
        for (int k = 5; k <= 40; k += 5) {
            m.push_back(k);
            mag.push_back(std::abs(mellin_psi(c, cantor_pole(s, k))));
        }
        EXPECT_LE(log_slope(m, mag), -1.5) << to_string(c);
    }
}

TEST(MellinPsi, Errors) {
    EXPECT_THROW(mellin_psi(Connection::rayleigh(2), cplx{0.0, 1.0}), DomainError);
    EXPECT_THROW(mellin_psi(Connection::power_law(2), 2.5), DomainError);
    EXPECT_THROW(mellin_psi(Connection::constant(0.3), 0.5), DomainError);
    EXPECT_EQ(mellin_psi(Connection::hard(), 0.5), cplx{0.0});
}

TEST(MellinConditions, Families) {
    const std::vector<double> sig{0.3, 0.63, 1.13};
    EXPECT_TRUE(check_mellin_conditions(Connection::rayleigh(4), sig).ok());
    EXPECT_TRUE(check_mellin_conditions(Connection::rayleigh(1), sig).ok());
    EXPECT_TRUE(check_mellin_conditions(Connection::fermi_dirac(-1.0), sig).ok());
    const auto pl = check_mellin_conditions(Connection::power_law(3), sig);
    EXPECT_FALSE(pl.second_derivative);
    EXPECT_TRUE(pl.transform_finite);
    EXPECT_FALSE(pl.diagnostic.empty());
    const auto cst = check_mellin_conditions(Connection::constant(0.4), sig);
    EXPECT_FALSE(cst.transform_finite);
    EXPECT_FALSE(cst.boundary_vanishes);
    EXPECT_THROW(build_cantor_series({3.0, 64}, Connection::power_law(3), 5), DomainError);
}

TEST(MellinConditions, LogDerivativesMatchFiniteDifferences) {
    for (auto c : {Connection::rayleigh(2), Connection::fermi_dirac(-1.0), Connection::power_law(3)}) {
        for (double x : {-2.0, -0.3, 0.4, 1.1}) {
            if (c.family == Family::PowerLaw && x <= 0.0) continue;
            auto g = [&](double y) { return entropy_scaled(c, std::exp(y)); };
            const double h = 1e-4;
            const double d1 = (g(x + h) - g(x - h)) / (2 * h);
            const double d2 = (g(x + h) - 2 * g(x) + g(x - h)) / (h * h);
            const auto [a1, a2] = detail::entropy_log_derivatives(c, x);
            EXPECT_NEAR(a1, d1, 1e-6 * (1 + std::abs(d1))) << to_string(c) << " " << x;
            EXPECT_NEAR(a2, d2, 1e-4 * (1 + std::abs(d2))) << to_string(c) << " " << x;
        }
    }
}

TEST(CantorSeries, PeriodicInLogRange) {
    const CantorSpec s{3.0, 64};
    const auto ser = build_cantor_series(s, Connection::rayleigh(4), 20);
    const double d = s.hausdorff_d();
    for (double r0 : {1e-3, 0.0123, 0.05}) {
        const double a = ser.value(r0) / (2 * std::pow(r0, d));
        const double b = ser.value(3.0 * r0) / (2 * std::pow(3.0 * r0, d));
        EXPECT_NEAR(a, b, 1e-12 * std::abs(a));
    }
}

TEST(CantorSeries, AmplitudesDecay) {
    const auto ser = build_cantor_series({3.0, 64}, Connection::rayleigh(4), 50);
    for (int m = 10; m <= 50; ++m) EXPECT_LT(ser.R[m], ser.R[1]) << m;
    EXPECT_EQ(ser.theta[0], 0.0);
    EXPECT_GT(ser.R[0], 0.0);
    EXPECT_LT(ser.c_l, ser.d);
    EXPECT_GT(ser.c_r, ser.d);
    EXPECT_LT(ser.error_bound(1e-2), 1e-10);
}

TEST(CantorSeries, MatchesMonteCarlo) {
    const CantorSpec s{3.0, 64};
    const auto c = Connection::rayleigh(4);
    auto ser = build_cantor_series(s, c, 50);
    const auto cal = calibrate_series_sign(ser, s, c, 1e-2, {1'000'000, 4, kDefaultChunk});
    EXPECT_EQ(cal.sign, 1);
    EXPECT_LT(cal.relative_mismatch, 0.05);
    for (double r0 : {1e-2, std::pow(10.0, -2.5), 1e-3}) {
        const auto mc = cantor_entropy_mc(s, c, r0, {2'000'000, 5, kDefaultChunk});
        EXPECT_FALSE(mc.depth_warning);
        EXPECT_NEAR(ser.value(r0), mc.value, std::max(3 * mc.std_error, 0.05 * mc.value)) << r0;
        EXPECT_NEAR(cantor_entropy_series(s, c, r0, 50).value, ser.value(r0), 1e-15);
    }
}

TEST(CantorSeries, HalfRangeRouteFailsCalibration) {
    const CantorSpec s{3.0, 64};
    const auto c = Connection::rayleigh(4);
    auto ser = build_cantor_series(s, c, 10, ShiftRoute::HalfRange);
    EXPECT_THROW(calibrate_series_sign(ser, s, c, 1e-2, {400'000, 4, kDefaultChunk}), ConvergenceError);
}

TEST(CantorMc, TrivialConnections) {
    const CantorSpec s{3.0, 64};
    const auto cst = cantor_entropy_mc(s, Connection::constant(0.3), 0.01, {10'000, 1, 1024});
    EXPECT_NEAR(cst.value, binary_entropy(0.3), 1e-14);
    EXPECT_EQ(cantor_entropy_mc(s, Connection::hard(), 0.01, {10'000, 1, 1024}).value, 0.0);
    EXPECT_TRUE(cantor_entropy_mc({3.0, 20}, Connection::rayleigh(2), 1e-8, {1000, 1, 1024}).depth_warning);
    EXPECT_FALSE(cantor_entropy_mc({3.0, 20}, Connection::rayleigh(2), 1e-4, {1000, 1, 1024}).depth_warning);
}

TEST(CantorMc, SharedSampleMatchesDirect) {
    const CantorSpec s{3.0, 64};
    CantorDistanceSample sample(s, 300'000, 12, 4096);
    for (auto c : {Connection::rayleigh(4), Connection::fermi_dirac(-2.0), Connection::power_law(3)}) {
        const auto a = sample.entropy(c, 0.02);
        const auto b = cantor_entropy_mc(s, c, 0.02, {300'000, 12, 4096});
        EXPECT_NEAR(a.value, b.value, 1e-12 * b.value) << to_string(c);
        EXPECT_NEAR(a.std_error, b.std_error, 1e-6 * b.std_error);
    }
}

TEST(CantorMc, LogPeriodicRatio) {
    for (double a : {3.0, 4.0}) {
        CantorDistanceSample sample({a, 64}, 2'000'000, 31);
        const auto c = Connection::rayleigh(4);
        const auto lo = sample.entropy(c, 1e-3), hi = sample.entropy(c, a * 1e-3);
        EXPECT_NEAR(hi.value / lo.value, 2.0, 0.1) << a;
    }
}

TEST(CantorMc, LocalMaximaSlope) {
    for (double a : {3.0, 4.0}) {
        const CantorSpec s{a, 64};
        CantorDistanceSample sample(s, 1'000'000, 41);
        const auto fit = local_maxima_slope(sample, Connection::rayleigh(4), 1e-4, 0.1, 200);
        EXPECT_GE(fit.max_r0.size(), 4u);
        EXPECT_NEAR(fit.slope / s.hausdorff_d(), 1.0, 0.05) << a;
    }
}

TEST(CantorCdf, SelfSimilarityWithinDkwBand) {
    for (double a : {3.0, 4.0, 6.0, 10.0}) {
        const auto chk = cdf_recursion_check({a, 64}, 1'000'000, 60 + static_cast<int>(a));
        // each of the four CDF values sits within one DKW half-width, total weight 2
        EXPECT_LE(chk.deviation, 2 * chk.dkw) << a;
    }
}

TEST(CantorCdf, SaturatesAtOne) {
    const CantorSpec s{3.0, 64};
    auto r = sample_cantor_displacements(s, 10'000, 3);
    for (double v : r) {
        EXPECT_GE(v, -1.0);
        EXPECT_LE(v, 1.0);
    }
    const auto chk = cdf_recursion_check(s, 10'000, 3);
    EXPECT_GE(chk.deviation, 0.0);
    EXPECT_GT(chk.dkw, 0.0);
}
