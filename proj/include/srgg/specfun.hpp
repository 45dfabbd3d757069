#pragma once

#include "srgg/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace srgg::specfun {

struct SpecFunConfig {
    double series_tol = 1e-12; ///< absolute tail tolerance
    long max_terms = 1'000'000;

    void validate() const {
        if (!(series_tol > 0.0)) throw DomainError("SpecFunConfig: series_tol must be > 0");
        if (max_terms < 100) throw DomainError("SpecFunConfig: max_terms must be >= 100");
    }
};

namespace detail {

inline void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite argument");
}

// B_2, B_4, ..., B_20
inline constexpr std::array<double, 10> kBernoulliEven = {
    1.0 / 6.0,        -1.0 / 30.0,       1.0 / 42.0,      -1.0 / 30.0,          5.0 / 66.0,
    -691.0 / 2730.0,  7.0 / 6.0,         -3617.0 / 510.0, 43867.0 / 798.0,      -174611.0 / 330.0};

// Sum_{k >= first} k^{-s} for s > 1: direct terms up to N-1, then the
// Euler-Maclaurin tail anchored at N.
inline double hurwitz_tail_sum(double s, int first) {
    constexpr int kDirect = 24;
    const int n_anchor = first + kDirect;
    double sum = 0.0;
    for (int k = n_anchor - 1; k >= first; --k) sum += std::pow(static_cast<double>(k), -s);

    const double n = n_anchor;
    double tail = std::pow(n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(n, -s);
    // term_j = B_{2j}/(2j)! * s(s+1)...(s+2j-2) * N^{-s-2j+1}
    double rising = s;                       // s (s+1) ... (s+2j-2)
    double factorial = 2.0;                  // (2j)!
    double npow = std::pow(n, -s - 1.0);     // N^{-s-2j+1}
    for (std::size_t j = 1; j <= kBernoulliEven.size(); ++j) {
        const double term = kBernoulliEven[j - 1] / factorial * rising * npow;
        tail += term;
        if (std::abs(term) < 1e-18 * std::abs(tail)) break;
        const double twoj = 2.0 * static_cast<double>(j);
        rising *= (s + twoj - 1.0) * (s + twoj);
        factorial *= (twoj + 1.0) * (twoj + 2.0);
        npow /= n * n;
    }
    return sum + tail;
}

} // namespace detail

/// Gamma function on the positive real axis.
inline double gamma(double z) {
    detail::require_finite(z, "gamma");
    if (z <= 0.0) throw DomainError("gamma: argument must be > 0");
    return std::tgamma(z);
}

/// Lower incomplete gamma function gamma(z, x) = int_0^x t^{z-1} e^{-t} dt.
///
/// Power series below x = z + 1, Lentz continued fraction for the upper
/// function above it.
inline double lower_incomplete_gamma(double z, double x, const SpecFunConfig& cfg = {}) {
    detail::require_finite(z, "lower_incomplete_gamma");
    detail::require_finite(x, "lower_incomplete_gamma");
    if (z <= 0.0) throw DomainError("lower_incomplete_gamma: z must be > 0");
    if (x < 0.0) throw DomainError("lower_incomplete_gamma: x must be >= 0");
    if (x == 0.0) return 0.0;

    const double log_prefactor = z * std::log(x) - x;
    const double eps = std::numeric_limits<double>::epsilon();

    if (x < z + 1.0) {
        double term = 1.0 / z;
        double sum = term;
        for (long n = 1; n < cfg.max_terms; ++n) {
            term *= x / (z + static_cast<double>(n));
            sum += term;
            if (std::abs(term) < std::abs(sum) * eps) return sum * std::exp(log_prefactor);
        }
        throw ConvergenceError("lower_incomplete_gamma: series did not converge");
    }

    constexpr double tiny = 1e-300;
    double b = x + 1.0 - z;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (long i = 1; i < cfg.max_terms; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - z);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < eps) {
            const double upper = std::exp(log_prefactor) * h;
            return gamma(z) - upper;
        }
    }
    throw ConvergenceError("lower_incomplete_gamma: continued fraction did not converge");
}

/// Riemann zeta for real s > 1 (Euler-Maclaurin corrected partial sums).
inline double riemann_zeta(double s) {
    detail::require_finite(s, "riemann_zeta");
    if (s <= 1.0) throw DomainError("riemann_zeta: s must be > 1");
    return detail::hurwitz_tail_sum(s, 1);
}

/// zeta(s) - 1 without cancellation for large s.
inline double riemann_zeta_minus_one(double s) {
    detail::require_finite(s, "riemann_zeta_minus_one");
    if (s <= 1.0) throw DomainError("riemann_zeta_minus_one: s must be > 1");
    return detail::hurwitz_tail_sum(s, 2);
}

/// S(z) = sum_{k>=2} k^{-z} / (k-1) for real z > 0.
///
/// The direct series converges like k^{-1-z}. Expanding 1/(k-1) as
/// sum_{j=1}^{n} k^{-j} + k^{-n}/(k-1) rewrites it as
/// sum_{j=1}^{n} (zeta(z+j) - 1) + sum_{k>=2} k^{-z-n}/(k-1), whose remainder
/// converges geometrically fast.
inline double tail_series(double z, const SpecFunConfig& cfg = {}) {
    cfg.validate();
    detail::require_finite(z, "tail_series");
    if (z <= 0.0) throw DomainError("tail_series: exponent must be > 0");

    constexpr int kShift = 30;
    double head = 0.0;
    for (int j = kShift; j >= 1; --j) head += riemann_zeta_minus_one(z + j);

    const double p = z + kShift;
    double rest = 0.0;
    for (long k = 2; k < cfg.max_terms; ++k) {
        const double kd = static_cast<double>(k);
        rest += std::pow(kd, -p) / (kd - 1.0);
        // sum_{j>k} j^{-p}/(j-1) <= 2 * int_k^inf x^{-p-1} dx
        const double tail_bound = 2.0 * std::pow(kd, -p) / p;
        if (tail_bound <= cfg.series_tol) return head + rest;
    }
    throw ConvergenceError("tail_series: max_terms exceeded before tail bound met");
}

/// S(d/eta), the series entering the small-r0 entropy constant.
inline double entropy_tail_series(int d, double eta, const SpecFunConfig& cfg = {}) {
    if (d < 1) throw DomainError("entropy_tail_series: d must be >= 1");
    detail::require_finite(eta, "entropy_tail_series");
    if (eta <= 0.0) throw DomainError("entropy_tail_series: eta must be > 0");
    return tail_series(static_cast<double>(d) / eta, cfg);
}

} // namespace srgg::specfun
