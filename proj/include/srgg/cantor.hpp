#pragma once

#include "srgg/connect.hpp"
#include "srgg/entropy.hpp"
#include "srgg/errors.hpp"
#include "srgg/geometry.hpp"
#include "srgg/parallel.hpp"
#include "srgg/quadrature.hpp"
#include "srgg/random.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace srgg {

using cplx = std::complex<double>;

/// Middle-(1 - 2/alpha) Cantor set truncated at `depth` alpha-ary digits.
struct CantorSpec {
    double alpha = 3.0;
    int depth = 64;

    double hausdorff_d() const { return std::numbers::ln2 / std::log(alpha); }

    void validate() const {
        if (!std::isfinite(alpha) || !(alpha > 2.0)) throw DomainError("CantorSpec: alpha must be > 2");
        // One random bit per digit, one 64-bit word per point.
        if (depth < 20 || depth > 64) throw DomainError("CantorSpec: depth must be in [20, 64]");
    }
};

/// Point whose digit n (n = 1..depth) is alpha - 1 when bit n-1 is set, else 0.
inline double cantor_point_from_bits(const CantorSpec& spec, std::uint64_t bits) {
    const double inv = 1.0 / spec.alpha, big = spec.alpha - 1.0;
    double x = 0.0;
    for (int n = spec.depth - 1; n >= 0; --n) x = (x + big * static_cast<double>((bits >> n) & 1u)) * inv;
    return x;
}

/// X - Y for two points given by their digit bits, summed digit by digit so
/// that small displacements keep full relative precision.
inline double cantor_displacement_from_bits(const CantorSpec& spec, std::uint64_t a, std::uint64_t b) {
    const double inv = 1.0 / spec.alpha, big = spec.alpha - 1.0;
    double r = 0.0;
    for (int n = spec.depth - 1; n >= 0; --n) {
        const int w = static_cast<int>((a >> n) & 1u) - static_cast<int>((b >> n) & 1u);
        r = (r + big * w) * inv;
    }
    return r;
}

inline double sample_cantor_point(const CantorSpec& spec, Engine& eng) {
    return cantor_point_from_bits(spec, eng());
}

/// Signed displacements X - Y of n independent pairs.
inline std::vector<double> sample_cantor_displacements(const CantorSpec& spec, std::size_t n, std::uint64_t seed,
                                                       std::size_t chunk = kDefaultChunk) {
    spec.validate();
    std::vector<double> out(n);
    run_chunks<char>({n, chunk}, [&](std::size_t c, std::size_t b, std::size_t e) {
        Engine eng = make_stream(seed, c);
        for (std::size_t i = b; i < e; ++i) {
            const std::uint64_t x = eng();
            out[i] = cantor_displacement_from_bits(spec, x, eng());
        }
        return char{};
    });
    return out;
}

/// Moments of the displacement R = X - Y from the digit self-similarity
/// R = (W + R') / alpha, W in {-(alpha-1), 0, alpha-1} with weights 1/4, 1/2, 1/4.
///
/// Signed moments M_n = E[R^n] vanish for odd n. Absolute moments
/// A_n = E|R|^n follow from |W + R'| = alpha - 1 + W R'/|W| whenever W != 0.
class CantorMoments {
public:
    explicit CantorMoments(double alpha) : alpha_(alpha) {
        if (!(alpha > 2.0)) throw DomainError("CantorMoments: alpha must be > 2");
        signed_.push_back(1.0);
        abs_.push_back(1.0);
    }

    double alpha() const { return alpha_; }

    double signed_moment(int n) {
        ensure(n);
        return signed_[n];
    }

    double abs_moment(int n) {
        ensure(n);
        return abs_[n];
    }

    void ensure(int n) {
        if (n < 0) throw DomainError("CantorMoments: order must be >= 0");
        if (n > kMaxOrder) throw ConvergenceError("CantorMoments: order above " + std::to_string(kMaxOrder));
        const double la = std::log(alpha_), lb = std::log(alpha_ - 1.0);
        for (int m = static_cast<int>(signed_.size()); m <= n; ++m) {
            const double lf = std::lgamma(m + 1.0);
            // log of binom(m,k) (alpha-1)^j alpha^{-m} with j = k or m - k
            auto weight = [&](int k, int j) {
                return std::exp(lf - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0) + j * lb - m * la);
            };
            double sm = 0.0;
            if (m % 2 == 0) {
                for (int k = m; k >= 2; k -= 2) sm += weight(k, k) * signed_[m - k];
                sm /= 2.0 * (1.0 - std::pow(alpha_, -m));
            }
            signed_.push_back(sm);
            double am = 0.0;
            for (int k = 0; k < m; k += 2) am += weight(k, m - k) * signed_[k];
            // the k = m term carries the unknown M_m (zero when m is odd)
            const double self = std::pow(alpha_, -m);
            am = 0.5 * (am + self * sm);
            abs_.push_back(am / (1.0 - 0.5 * self));
        }
    }

    static constexpr int kMaxOrder = 6000;

private:
    double alpha_;
    std::vector<double> signed_, abs_;
};

/// C[F; 2l] = int_0^1 r^{2l} dF(r) = E[R^{2l}] / 2.
inline double cantor_even_moment(const CantorSpec& spec, int l) {
    spec.validate();
    if (l < 0) throw DomainError("cantor_even_moment: l must be >= 0");
    CantorMoments m(spec.alpha);
    return 0.5 * m.signed_moment(2 * l);
}

/// C[F; n] = int_0^1 r^n dF(r) = E|R|^n / 2 for any order n.
inline double cantor_half_moment(const CantorSpec& spec, int n) {
    spec.validate();
    CantorMoments m(spec.alpha);
    return 0.5 * m.abs_moment(n);
}

namespace detail {

// sum_k binom(-s, k) x^k c_k over k = first, first + step, ...
// Stops once a term drops below rel * |partial sum|.
template <class Coef>
cplx binomial_series(cplx s, double x, int step, Coef&& coef, double rel, const char* what) {
    cplx binom = 1.0, sum = 0.0;
    double xp = 1.0;
    int quiet = 0;
    for (int k = 0; k <= CantorMoments::kMaxOrder; ++k) {
        if (k % step == 0) {
            const cplx term = binom * xp * coef(k);
            sum += term;
            if (std::abs(term) <= rel * std::abs(sum)) {
                // two small terms in a row, so a vanishing coefficient is not mistaken for convergence
                if (++quiet >= 2 || binom == 0.0) return sum;
            } else {
                quiet = 0;
            }
        }
        binom *= (-s - static_cast<double>(k)) / static_cast<double>(k + 1);
        xp *= x;
    }
    throw ConvergenceError(std::string(what) + ": binomial series did not converge");
}

} // namespace detail

/// E[(alpha - 1 + R)^{-s}] over the full displacement range, as the
/// binomial series in the even moments.
inline cplx cantor_shift_transform_series(const CantorSpec& spec, cplx s, double rel = 1e-15) {
    spec.validate();
    CantorMoments mom(spec.alpha);
    const double a1 = spec.alpha - 1.0;
    const cplx lead = std::exp(-s * std::log(a1));
    return lead * detail::binomial_series(s, 1.0 / a1, 2, [&](int k) { return mom.signed_moment(k); }, rel,
                                          "cantor_shift_transform_series");
}

/// E[(alpha - 1 + R)^{-s}] for large |s|.
///
/// The first K digits of R are enumerated exactly (3^K leaves); the rest of the
/// displacement, alpha^{-K} R', enters through a short even-moment series.
inline cplx cantor_shift_transform(const CantorSpec& spec, cplx s) {
    spec.validate();
    const double a = spec.alpha, a1 = a - 1.0;
    int K = 0;
    while (std::abs(s) * std::pow(a, -K) / (a - 2.0) > 0.02) ++K;
    if (K > 13) throw ConvergenceError("cantor_shift_transform: |s| too large for alpha this close to 2");
    CantorMoments mom(a);
    mom.ensure(40);
    const double tail_scale = std::pow(a, -K);

    cplx total = 0.0;
    std::function<void(int, double, double, double)> walk = [&](int level, double c, double scale, double w) {
        if (level == K) {
            const double base = a1 + c;
            const double eps = tail_scale / base;
            cplx inner = 1.0, binom = 1.0;
            double ep = 1.0;
            for (int k = 0; k < 40; ++k) {
                binom *= (-s - static_cast<double>(k)) / static_cast<double>(k + 1);
                ep *= eps;
                if (k % 2 == 1) {
                    const cplx term = binom * ep * mom.signed_moment(k + 1);
                    inner += term;
                    if (std::abs(term) < 1e-17 * std::abs(inner)) break;
                }
            }
            total += w * std::exp(-s * std::log(base)) * inner;
            return;
        }
        const double step = scale / a;
        walk(level + 1, c, step, 0.5 * w);
        walk(level + 1, c + a1 * step, step, 0.25 * w);
        walk(level + 1, c - a1 * step, step, 0.25 * w);
    };
    walk(0, 0.0, 1.0, 1.0);
    return total;
}

/// int_0^1 (r + alpha - 1)^{-s} dF(r): the upper half of the displacement law
/// only, expanded over all half-range moments C[F; n].
inline cplx cantor_half_shift_transform(const CantorSpec& spec, cplx s, double rel = 1e-15) {
    spec.validate();
    CantorMoments mom(spec.alpha);
    const double a1 = spec.alpha - 1.0;
    const cplx lead = std::exp(-s * std::log(a1));
    return lead * detail::binomial_series(s, 1.0 / a1, 1, [&](int k) { return 0.5 * mom.abs_moment(k); }, rel,
                                          "cantor_half_shift_transform");
}

/// C[F; -s] = E|R|^{-s} / 2, continued meromorphically through the
/// self-similarity: C[F; -s] = E[(alpha - 1 + R)^{-s}] / (2 (2 alpha^{-s} - 1)).
inline cplx cantor_moment_series(const CantorSpec& spec, cplx s) {
    spec.validate();
    const cplx denom = 2.0 * std::exp(-s * std::log(spec.alpha)) - 1.0;
    if (std::abs(denom) < 1e-8) throw DomainError("cantor_moment_series: s is at a pole");
    return cantor_shift_transform_series(spec, s, 1e-14) / (2.0 * denom);
}

/// Poles s_m = d + 2 pi i m / log alpha of C[F; -s].
inline cplx cantor_pole(const CantorSpec& spec, int m) {
    return {spec.hausdorff_d(), 2.0 * std::numbers::pi * m / std::log(spec.alpha)};
}

namespace detail {

// Exponent gamma with h2(p(u)) ~ u^gamma log(1/u) as u -> 0, or 0 when h2(p(0)) > 0.
inline double small_u_order(const Connection& c) {
    return c.family == Family::Rayleigh ? c.param : 0.0;
}

// Smallest u where h2(p(u)) can be nonzero.
inline double support_start(const Connection& c) {
    return c.family == Family::PowerLaw ? 1.0 : 0.0;
}

// x = log u below which int e^{sigma x} h(e^x) dx is under tol.
inline double mellin_lower_limit(const Connection& c, double sigma, double tol) {
    if (c.family == Family::PowerLaw) return 0.0;
    const double g = small_u_order(c);
    const double kappa = sigma + g;
    double x = std::log(tol * 1e-3 * kappa) / kappa;
    for (int i = 0; i < 3; ++i) x = (std::log(tol * 1e-3 * kappa) - std::log(1.0 + g * std::abs(x) + 1.0)) / kappa;
    return x;
}

inline double mellin_upper_limit(const Connection& c, double sigma, double tol) {
    if (c.family == Family::PowerLaw) {
        const double gap = c.param - sigma;
        double x = 10.0;
        for (int i = 0; i < 5; ++i) x = (std::log(1.0 + c.param * x) - std::log(tol * 1e-3 * gap)) / gap;
        return std::max(x, 1.0);
    }
    const double cut = negligible_beyond_scaled(c);
    return std::log(std::max(cut, 1.0)) + 0.5;
}

inline void require_mellin_finite(const Connection& c, double sigma, const char* what) {
    if (!(sigma > 0.0)) throw DomainError(std::string(what) + ": Re(s) must be > 0");
    if (c.family == Family::PowerLaw && !(sigma < c.param))
        throw DomainError(std::string(what) + ": transform diverges for powerlaw with Re(s) >= alpha");
    if (c.family == Family::Constant && c.param != 0.0 && c.param != 1.0)
        throw DomainError(std::string(what) + ": transform diverges for a constant connection");
}

} // namespace detail

/// psi(s) = int_0^inf u^{s-1} h2(p(u)) du for Re(s) > 0, by adaptive
/// quadrature in x = log u with a breakpoint every half period of u^{i Im s}.
inline cplx mellin_psi(const Connection& conn, cplx s, double tol = 1e-12) {
    const double sigma = s.real(), T = s.imag();
    detail::require_mellin_finite(conn, sigma, "mellin_psi");
    if (!(tol > 0.0)) throw DomainError("mellin_psi: tol must be > 0");
    if (conn.family == Family::Hard || conn.family == Family::Constant) return 0.0;

    const double lo = detail::mellin_lower_limit(conn, sigma, tol);
    const double hi = detail::mellin_upper_limit(conn, sigma, tol);
    std::vector<double> breaks;
    for (double b : scaled_breakpoints(conn))
        if (b > 0.0) breaks.push_back(std::log(b));
    if (T != 0.0) {
        const double half = std::numbers::pi / std::abs(T);
        if ((hi - lo) / half > 400'000) throw ConvergenceError("mellin_psi: too many oscillations to resolve");
        for (double x = lo + half; x < hi; x += half) breaks.push_back(x);
    } else {
        for (double x = std::ceil(lo); x < hi; x += 1.0) breaks.push_back(x);
    }
    auto f = [&](double x) -> cplx {
        const double h = entropy_scaled(conn, std::exp(x));
        if (h == 0.0) return 0.0;
        return std::polar(std::exp(sigma * x) * h, T * x);
    };
    quad::Options opt{tol, 1e-13, static_cast<int>(breaks.size()) + 20'000};
    auto r = quad::integrate(f, lo, hi, breaks, opt);
    if (!r.converged)
        throw ConvergenceError("mellin_psi: tolerance not reached (error estimate " + std::to_string(r.error) + ")");
    return r.value;
}

/// Finite numeric proxies for the decay and smoothness conditions on h2(p(u))
/// used by the residue series, checked at the real parts actually in use.
struct MellinConditions {
    bool transform_finite = true;   ///< int u^{s-1} h du
    bool boundary_vanishes = true;  ///< u^s h(u) -> 0 at both ends
    bool first_derivative = true;   ///< int u^s |h'| du
    bool second_derivative = true;  ///< int u^{s+1} |h''| du
    std::string diagnostic;

    bool ok() const { return transform_finite && boundary_vanishes && first_derivative && second_derivative; }
};

namespace detail {

// First and second derivatives of g(x) = h2(p(e^x)), using h2'(p) = log(q/p)
// and h2''(p) = -1/(pq).
inline std::pair<double, double> entropy_log_derivatives(const Connection& c, double x) {
    const double u = std::exp(x);
    double p = 0.0, q = 0.0, log_q_over_p = 0.0, p1 = 0.0, p2 = 0.0, p1_sq_over_pq = 0.0;
    switch (c.family) {
    case Family::Rayleigh: {
        const double eta = c.param, t = std::pow(u, eta);
        if (t > 745.0 || t == 0.0) return {0.0, 0.0};
        p = std::exp(-t);
        q = -std::expm1(-t);
        log_q_over_p = std::log(q) + t;
        p1 = -eta * t * p;
        p2 = -eta * eta * t * p * (1.0 - t);
        p1_sq_over_pq = eta * eta * t * t * p / q;
        break;
    }
    case Family::FermiDirac: {
        const double z = c.param + u;
        if (z > 745.0) return {0.0, 0.0};
        const auto pq = edge_prob(c, u);
        p = pq.p;
        q = pq.q;
        log_q_over_p = z;
        p1 = -p * q * u;
        p2 = p * q * u * (u * (q - p) - 1.0);
        p1_sq_over_pq = p * q * u * u;
        break;
    }
    case Family::PowerLaw: {
        if (x <= 0.0) return {0.0, 0.0};
        const double a = c.param;
        p = std::exp(-a * x);
        q = -std::expm1(-a * x);
        log_q_over_p = std::log(q) + a * x;
        p1 = -a * p;
        p2 = a * a * p;
        p1_sq_over_pq = a * a * p / q;
        break;
    }
    case Family::Hard:
    case Family::Constant: return {0.0, 0.0};
    }
    return {log_q_over_p * p1, log_q_over_p * p2 - p1_sq_over_pq};
}

// Truncated integrals at three successively wider cutoffs must settle.
inline bool settles(double i0, double i1, double i2) {
    const double d1 = std::abs(i1 - i0), d2 = std::abs(i2 - i1);
    if (d2 <= 1e-3 * std::abs(i2)) return true;
    if (d1 > 0.0 && d2 < 0.5 * d1) {
        const double r = d2 / d1;
        return d2 * r / (1.0 - r) <= 1e-3 * std::abs(i2);
    }
    return false;
}

} // namespace detail

inline MellinConditions check_mellin_conditions(const Connection& conn, const std::vector<double>& sigmas) {
    MellinConditions rep;
    auto g = [&](double x) { return entropy_scaled(conn, std::exp(x)); };
    const double u0 = detail::support_start(conn);
    std::vector<double> breaks;
    for (double b : scaled_breakpoints(conn))
        if (b > 0.0) breaks.push_back(std::log(b));
    const double top = std::log(std::max(negligible_beyond_scaled(conn), 1.0));

    auto fail = [&](bool& flag, const std::string& what, double sigma) {
        flag = false;
        rep.diagnostic += what + " fails at s=" + std::to_string(sigma) + "; ";
    };

    for (double sigma : sigmas) {
        if (!(sigma > 0.0)) throw DomainError("check_mellin_conditions: s must be > 0");
        auto truncated = [&](auto&& integrand, int level) {
            const double delta = std::pow(1e-8, level + 1);
            const double lo = u0 > 0.0 ? std::log1p(delta) : std::log(delta);
            const double hi = std::min(std::log(1e3) * (level + 1), top + 1.0);
            std::vector<double> br = breaks;
            for (double x = std::ceil(lo); x < hi; x += 1.0) br.push_back(x);
            // geometric breakpoints toward a kink at the lower end
            if (u0 > 0.0)
                for (double x = 1e-2; x > lo; x *= 1e-2) br.push_back(x);
            return quad::integrate(integrand, lo, hi, br, {1e-300, 1e-10, 40'000}).value;
        };
        auto check = [&](auto&& integrand) {
            return detail::settles(truncated(integrand, 0), truncated(integrand, 1), truncated(integrand, 2));
        };
        if (!check([&](double x) { return std::exp(sigma * x) * g(x); }))
            fail(rep.transform_finite, "transform integral", sigma);
        if (!check([&](double x) { return std::exp(sigma * x) * std::abs(detail::entropy_log_derivatives(conn, x).first); }))
            fail(rep.first_derivative, "first-derivative integral", sigma);
        if (!check([&](double x) {
                const auto [d1, d2] = detail::entropy_log_derivatives(conn, x);
                return std::exp(sigma * x) * std::abs(d2 - d1);
            }))
            fail(rep.second_derivative, "second-derivative integral", sigma);

        auto edge = [&](double u) { return std::pow(u, sigma) * entropy_scaled(conn, u); };
        const bool low_ok = u0 > 0.0 || (edge(1e-8) <= 1e-2 && edge(1e-8) <= edge(1e-4));
        const bool high_ok = edge(1e8) <= 1e-2 && edge(1e8) <= edge(1e4);
        if (!low_ok || !high_ok) fail(rep.boundary_vanishes, "boundary term", sigma);
    }
    return rep;
}

enum class ShiftRoute { FullRange, HalfRange };

inline const char* to_string(ShiftRoute r) { return r == ShiftRoute::FullRange ? "full_range" : "half_range"; }

/// Log-periodic residue series for the Cantor entropy per edge,
/// 2 r0^d (R_0/2 + sum_m R_m cos(theta_m + 2 pi m log r0 / log alpha)).
struct CantorSeries {
    double alpha = 3.0;
    double d = 0.0;
    int m_max = 0;
    std::vector<double> R, theta; ///< index 0..m_max
    double c_l = 0.0, c_r = 0.0;
    int sign = 1;
    double tail = 0.0; ///< bound on the dropped modes, in units of 2 r0^d
    ShiftRoute route = ShiftRoute::FullRange;

    double periodic_part(double r0) const {
        const double phase = 2.0 * std::numbers::pi * std::log(r0) / std::log(alpha);
        double v = 0.0;
        for (int m = m_max; m >= 1; --m) v += R[m] * std::cos(theta[m] + m * phase);
        return 0.5 * R[0] + v;
    }
    double value(double r0) const { return sign * 2.0 * std::pow(r0, d) * periodic_part(r0); }
    double error_bound(double r0) const { return 2.0 * std::pow(r0, d) * tail; }
};

/// Builds R_m, theta_m from G_m = psi(s_m) E[(alpha - 1 + R)^{-s_m}] / log alpha
/// (FullRange), or from psi(s_m) int_0^1 (r + alpha - 1)^{-s_m} dF / (2 log alpha)
/// (HalfRange, the upper half of the displacement law only).
inline CantorSeries build_cantor_series(const CantorSpec& spec, const Connection& conn, int m_max = 50,
                                        ShiftRoute route = ShiftRoute::FullRange, double psi_tol = 1e-13) {
    spec.validate();
    if (m_max < 1) throw DomainError("build_cantor_series: m_max must be >= 1");
    CantorSeries out;
    out.alpha = spec.alpha;
    out.d = spec.hausdorff_d();
    out.m_max = m_max;
    out.route = route;
    out.c_l = 0.5 * out.d;
    out.c_r = out.d + 0.5;
    if (conn.family == Family::PowerLaw && conn.param > out.d) out.c_r = out.d + 0.5 * std::min(1.0, conn.param - out.d);

    const auto cond = check_mellin_conditions(conn, {out.c_l, out.d, out.c_r});
    if (!cond.ok()) throw DomainError("build_cantor_series: connection fails the decay conditions: " + cond.diagnostic);

    const double la = std::log(spec.alpha);
    out.R.resize(m_max + 1);
    out.theta.resize(m_max + 1);
    for (int m = 0; m <= m_max; ++m) {
        const cplx s = cantor_pole(spec, m);
        if (std::abs(2.0 * std::exp(-s * la) - 1.0) > 1e-12)
            throw ConvergenceError("build_cantor_series: pole location drifted at m=" + std::to_string(m));
        const cplx psi = mellin_psi(conn, s, psi_tol);
        const cplx g = route == ShiftRoute::FullRange ? psi * cantor_shift_transform(spec, s) / la
                                                      : psi * cantor_half_shift_transform(spec, s) / (2.0 * la);
        out.R[m] = std::abs(g);
        out.theta[m] = std::arg(g);
    }
    // Remaining modes modelled as R_m <= R_{m_max} (m_max / m)^2.
    const double M = m_max;
    out.tail = out.R[m_max] * M * M * (1.0 / M - 0.5 / (M * M) + 1.0 / (6.0 * M * M * M)) + psi_tol;
    return out;
}

struct CantorSeriesValue {
    double value = 0.0;
    double err_bound = 0.0;
    CantorSeries series;
};

inline CantorSeriesValue cantor_entropy_series(const CantorSpec& spec, const Connection& conn, double r0,
                                               int m_max = 50) {
    detail::require_r0(r0, "cantor_entropy_series");
    auto s = build_cantor_series(spec, conn, m_max);
    return {s.value(r0), s.error_bound(r0), std::move(s)};
}

struct CantorEstimate : EntropyEstimate {
    bool depth_warning = false; ///< truncation depth too shallow for this r0
};

/// Digits needed so that truncation sits three decades below r0.
inline int cantor_required_depth(const CantorSpec& spec, double r0) {
    return static_cast<int>(std::ceil(std::log(r0 * 1e-3) / std::log(1.0 / spec.alpha)));
}

inline CantorEstimate cantor_entropy_mc(const CantorSpec& spec, const Connection& conn, double r0,
                                        const McConfig& cfg = {}) {
    spec.validate();
    detail::require_r0(r0, "cantor_entropy_mc");
    if (cfg.n_pairs < 2) throw DomainError("cantor_entropy_mc: n_pairs must be >= 2");
    auto parts = run_chunks<MomentSum>({cfg.n_pairs, cfg.chunk_size}, [&](std::size_t c, std::size_t b, std::size_t e) {
        Engine eng = make_stream(cfg.seed, c);
        MomentSum acc;
        for (std::size_t i = b; i < e; ++i) {
            const std::uint64_t x = eng();
            const double r = std::abs(cantor_displacement_from_bits(spec, x, eng()));
            acc.add(entropy_scaled(conn, r / r0));
        }
        return acc;
    });
    MomentSum total;
    for (const auto& p : parts) total.merge(p);
    CantorEstimate out;
    out.value = total.mean();
    out.std_error = total.std_error();
    out.method = Method::MonteCarlo;
    out.n_pairs = cfg.n_pairs;
    out.r0 = r0;
    out.depth_warning = spec.depth < cantor_required_depth(spec, r0);
    return out;
}

/// A fixed sample of pair distances |X - Y|, reused across r0 so that a sweep
/// is a smooth function of r0 (common random numbers).
class CantorDistanceSample {
public:
    CantorDistanceSample(const CantorSpec& spec, std::size_t n, std::uint64_t seed, std::size_t chunk = kDefaultChunk)
        : spec_(spec), dist_(sample_cantor_displacements(spec, n, seed, chunk)) {
        if (n < 2) throw DomainError("CantorDistanceSample: n must be >= 2");
        for (double& r : dist_) r = std::abs(r);
        std::sort(dist_.begin(), dist_.end());
    }

    const std::vector<double>& sorted() const { return dist_; }
    const CantorSpec& spec() const { return spec_; }

    /// Mean of h2(p(|R| / r0)) over the sample. Pairs outside the window where
    /// h2 is numerically zero are counted without being evaluated.
    EntropyEstimate entropy(const Connection& conn, double r0) const {
        detail::require_r0(r0, "CantorDistanceSample::entropy");
        double lo_scaled = 0.0;
        if (conn.family == Family::Rayleigh) lo_scaled = std::pow(1e-18, 1.0 / conn.param);
        if (conn.family == Family::PowerLaw) lo_scaled = 1.0;
        const double hi_scaled = negligible_beyond_scaled(conn);
        auto first = std::lower_bound(dist_.begin(), dist_.end(), lo_scaled * r0);
        auto last = std::isfinite(hi_scaled) ? std::upper_bound(first, dist_.end(), hi_scaled * r0) : dist_.end();
        MomentSum acc;
        for (auto it = first; it != last; ++it) acc.add(entropy_scaled(conn, *it / r0));
        const std::size_t outside = dist_.size() - acc.count;
        if (conn.family == Family::Constant || conn.family == Family::FermiDirac) {
            for (auto it = dist_.begin(); it != first; ++it) acc.add(entropy_scaled(conn, *it / r0));
            for (auto it = last; it != dist_.end(); ++it) acc.add(entropy_scaled(conn, *it / r0));
        } else {
            acc.count += outside;
        }
        EntropyEstimate out;
        out.value = acc.mean();
        out.std_error = acc.std_error();
        out.method = Method::MonteCarlo;
        out.n_pairs = dist_.size();
        out.r0 = r0;
        return out;
    }

private:
    CantorSpec spec_;
    std::vector<double> dist_;
};

struct LocalMaximaFit {
    std::vector<double> r0, value;       ///< the sweep
    std::vector<double> max_r0, max_val; ///< refined local maxima
    double slope = 0.0;                  ///< of log value against log r0 through the maxima
};

/// Sweeps r0 log-uniformly over [lo, hi], locates the local maxima of the
/// entropy curve and fits a line through them in log-log coordinates.
inline LocalMaximaFit local_maxima_slope(const CantorDistanceSample& sample, const Connection& conn, double lo,
                                         double hi, std::size_t n_grid) {
    if (!(lo > 0.0) || !(hi > lo)) throw DomainError("local_maxima_slope: need 0 < lo < hi");
    if (n_grid < 16) throw DomainError("local_maxima_slope: n_grid must be >= 16");
    LocalMaximaFit fit;
    fit.r0.resize(n_grid);
    const double step = std::log(hi / lo) / static_cast<double>(n_grid - 1);
    for (std::size_t i = 0; i < n_grid; ++i) fit.r0[i] = lo * std::exp(step * static_cast<double>(i));
    fit.value = run_chunks<double>({n_grid, 1}, [&](std::size_t, std::size_t b, std::size_t) {
        return sample.entropy(conn, fit.r0[b]).value;
    });

    for (std::size_t i = 1; i + 1 < n_grid; ++i) {
        const double a = fit.value[i - 1], b = fit.value[i], c = fit.value[i + 1];
        if (!(b > a && b >= c) || !(a > 0.0)) continue;
        // parabola through the three points in log-log coordinates
        const double ya = std::log(a), yb = std::log(b), yc = std::log(c);
        const double curv = ya - 2.0 * yb + yc;
        double off = 0.0, peak = yb;
        if (curv < 0.0) {
            off = 0.5 * (ya - yc) / curv;
            peak = yb - 0.125 * (ya - yc) * (ya - yc) / curv;
        }
        fit.max_r0.push_back(fit.r0[i] * std::exp(off * step));
        fit.max_val.push_back(std::exp(peak));
    }
    if (fit.max_r0.size() < 2) throw ConvergenceError("local_maxima_slope: fewer than two local maxima in range");
    double mx = 0.0, my = 0.0;
    const double n = static_cast<double>(fit.max_r0.size());
    for (std::size_t i = 0; i < fit.max_r0.size(); ++i) {
        mx += std::log(fit.max_r0[i]);
        my += std::log(fit.max_val[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < fit.max_r0.size(); ++i) {
        const double dx = std::log(fit.max_r0[i]) - mx;
        sxy += dx * (std::log(fit.max_val[i]) - my);
        sxx += dx * dx;
    }
    fit.slope = sxy / sxx;
    return fit;
}

struct RecursionCheck {
    double deviation = 0.0; ///< sup over the grid of |F(r) - (F(ar)/2 + F(ar-(a-1))/4 + F(ar+(a-1))/4)|
    double dkw = 0.0;       ///< DKW half-width of the empirical CDF
    std::size_t n_pairs = 0;
};

/// Self-similarity of the displacement CDF, tested on an empirical sample
/// over 1000 points of [0, 1].
inline RecursionCheck cdf_recursion_check(const CantorSpec& spec, std::size_t n_pairs, std::uint64_t seed,
                                          double confidence = 0.99) {
    if (n_pairs < 2) throw DomainError("cdf_recursion_check: n_pairs must be >= 2");
    auto r = sample_cantor_displacements(spec, n_pairs, seed);
    std::sort(r.begin(), r.end());
    const double n = static_cast<double>(n_pairs);
    auto F = [&](double x) {
        if (x < -1.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return static_cast<double>(std::upper_bound(r.begin(), r.end(), x) - r.begin()) / n;
    };
    const double a = spec.alpha;
    RecursionCheck out;
    out.n_pairs = n_pairs;
    out.dkw = dkw_epsilon(n_pairs, confidence);
    for (int i = 0; i < 1000; ++i) {
        const double x = i / 999.0;
        const double rhs = 0.5 * F(a * x) + 0.25 * F(a * x - (a - 1.0)) + 0.25 * F(a * x + (a - 1.0));
        out.deviation = std::max(out.deviation, std::abs(F(x) - rhs));
    }
    return out;
}

struct SignCalibration {
    int sign = 1;
    double series_value = 0.0;
    double mc_value = 0.0;
    double mc_std_error = 0.0;
    double relative_mismatch = 0.0;
};

/// Compares the series with Monte Carlo at r0_ref and fixes the global sign.
/// The derived orientation gives +1; a mismatch above 20% for either sign
/// means the series is wrong and is reported as an error.
inline SignCalibration calibrate_series_sign(CantorSeries& series, const CantorSpec& spec, const Connection& conn,
                                             double r0_ref = 1e-2, const McConfig& cfg = {}) {
    const auto mc = cantor_entropy_mc(spec, conn, r0_ref, cfg);
    series.sign = 1;
    const double v = series.value(r0_ref);
    SignCalibration out{1, v, mc.value, mc.std_error, std::abs(v - mc.value) / std::abs(mc.value)};
    if (out.relative_mismatch > 0.2) {
        const double flipped = std::abs(-v - mc.value) / std::abs(mc.value);
        if (flipped > 0.2)
            throw ConvergenceError("calibrate_series_sign: series and Monte Carlo differ by " +
                                   std::to_string(100.0 * out.relative_mismatch) + "%");
        series.sign = out.sign = -1;
        out.series_value = -v;
        out.relative_mismatch = flipped;
    }
    return out;
}

} // namespace srgg
