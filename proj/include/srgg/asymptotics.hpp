#pragma once

#include "srgg/connect.hpp"
#include "srgg/entropy.hpp"
#include "srgg/errors.hpp"
#include "srgg/geometry.hpp"
#include "srgg/quadrature.hpp"
#include "srgg/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace srgg {

enum class Regime { SmallR0Leading, SmallR0SecondOrder, LargeR0 };

struct AsymptoteResult {
    double value = 0.0;
    Regime regime = Regime::SmallR0Leading;
    double validity_hint = 0.0; ///< small-r0 forms: r0 <= hint; large-r0 form: r0 >= hint
};

/// Surface area s_{d-1} of the unit sphere in R^d for d = 1, 2, 3.
inline double unit_sphere_area(int d) {
    switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: throw DomainError("unit_sphere_area: d must be 1, 2 or 3");
    }
}

/// int_0^inf u^{s-1} h2(exp(-u^eta)) du for real s > 0, via the gamma/zeta
/// closed form (1/eta) Gamma(z) (z + zeta(z+1) - S(z)) with z = s/eta.
inline double rayleigh_mellin(double s, double eta) {
    if (!(s > 0.0) || !(eta > 0.0)) throw DomainError("rayleigh_mellin: s and eta must be > 0");
    const double z = s / eta;
    return specfun::gamma(z) * (z + specfun::riemann_zeta(z + 1.0) - specfun::tail_series(z)) / eta;
}

/// Leading small-r0 entropy per edge for a d-dimensional domain with
/// f(r) ~ s_{d-1} r^{d-1}.
inline AsymptoteResult small_r0_leading(int d, double eta, double r0) {
    if (d < 1 || d > 3) throw DomainError("small_r0_leading: d must be 1, 2 or 3");
    if (!(eta > 0.0)) throw DomainError("small_r0_leading: eta must be > 0");
    if (!(r0 > 0.0)) throw DomainError("small_r0_leading: r0 must be > 0");
    const double z = static_cast<double>(d) / eta;
    const double S = specfun::entropy_tail_series(d, eta);
    const double value = unit_sphere_area(d) * std::pow(r0, d) / eta * specfun::gamma(z) *
                         (z + specfun::riemann_zeta(z + 1.0) - S);
    return {value, Regime::SmallR0Leading, 0.0};
}

/// Leading term plus the a_d r^d correction of the distance density.
inline AsymptoteResult small_r0_second_order(const Domain& dom, double eta, double r0) {
    const auto coeffs = small_r_coeffs(dom);
    if (!coeffs.valid)
        throw UnsupportedError("small_r0_second_order: a_d not available for domain '" + to_string(dom) + "'");
    const int d = dom.dim();
    const double lead = coeffs.s_leading / unit_sphere_area(d) * small_r0_leading(d, eta, r0).value;
    const double z = static_cast<double>(d + 1) / eta;
    const double S = specfun::entropy_tail_series(d + 1, eta);
    const double corr = coeffs.a_d * std::pow(r0, d + 1) / eta * specfun::gamma(z) *
                        (z + specfun::riemann_zeta(z + 1.0) - S);
    return {lead + corr, Regime::SmallR0SecondOrder, 0.2 * dom.diameter()};
}

struct DomainMoments {
    double e_r_eta = 0.0;     ///< E[R^eta]
    double e_r_eta_log = 0.0; ///< E[R^eta log R]
    double eta = 0.0;
    Method method = Method::Quadrature;
    double std_error_r_eta = 0.0;
    double std_error_r_eta_log = 0.0;
};

inline DomainMoments domain_moments(const Domain& dom, double eta, Method method, const McConfig& cfg = {}) {
    if (!(eta > 0.0)) throw DomainError("domain_moments: eta must be > 0");
    auto pow_log = [eta](double r) {
        if (r <= 0.0) return std::array<double, 2>{0.0, 0.0};
        const double a = std::pow(r, eta);
        return std::array<double, 2>{a, a * std::log(r)};
    };
    if (method == Method::Quadrature) {
        detail::require_closed_form(dom, "domain_moments");
        const double D = dom.diameter();
        const auto kinks = density_breakpoints(dom);
        auto m1 = quad::integrate([&](double r) { return pair_distance_density(dom, r) * pow_log(r)[0]; }, 0.0, D,
                                  kinks, {1e-15, 1e-13, 4000});
        auto m2 = quad::integrate([&](double r) { return pair_distance_density(dom, r) * pow_log(r)[1]; }, 0.0, D,
                                  kinks, {1e-15, 1e-13, 4000});
        if (!m1.converged || !m2.converged) throw ConvergenceError("domain_moments: tolerance not reached");
        return {m1.value, m2.value, eta, Method::Quadrature, 0.0, 0.0};
    }
    if (method != Method::MonteCarlo) throw UnsupportedError("domain_moments: unsupported method");
    const auto m = pair_moments_mc<2>(dom, pow_log, cfg);
    return {m[0].mean(), m[1].mean(), eta, Method::MonteCarlo, m[0].std_error(), m[1].std_error()};
}

/// Two-term large-r0 expansion of the entropy per edge for Rayleigh(eta).
inline AsymptoteResult large_r0(const Domain& dom, double eta, double r0, const DomainMoments& m) {
    if (!(r0 > 0.0)) throw DomainError("large_r0: r0 must be > 0");
    if (std::abs(m.eta - eta) > 1e-12 * eta) throw DomainError("large_r0: moments computed for a different eta");
    const double scale = std::pow(r0, -eta);
    const double value = (1.0 + eta * std::log(r0)) * scale * m.e_r_eta - eta * scale * m.e_r_eta_log;
    return {value, Regime::LargeR0, dom.diameter()};
}

enum class Growth { ThetaR0PowD, SuperPolynomial };

inline const char* to_string(Growth g) {
    return g == Growth::ThetaR0PowD ? "theta_r0_pow_d" : "super_polynomial";
}

struct IntegrabilityReport {
    Growth growth = Growth::ThetaR0PowD; ///< the analytic classification
    Growth numeric = Growth::ThetaR0PowD;
    bool agrees = true;
    std::array<double, 3> cutoffs{1e2, 1e3, 1e4};
    std::array<double, 3> truncated{}; ///< int_0^T t^{d-1} h2(p(t)) dt
    std::string diagnostic;
};

/// int_0^T t^{d-1} h2(p(t)) dt.
inline double truncated_entropy_moment(const Connection& conn, int d, double T) {
    std::vector<double> breaks = scaled_breakpoints(conn);
    for (double b = 10.0; b < T; b *= 10.0) breaks.push_back(b);
    auto r = quad::integrate([&](double t) { return std::pow(t, d - 1) * entropy_scaled(conn, t); }, 0.0, T, breaks,
                             {1e-14, 1e-11, 20000});
    return r.value;
}

/// Whether the entropy per edge scales as r0^d for small r0 (the truncated
/// moment of rho is finite) or decays more slowly.
///
/// The analytic rule decides; a numerical stabilization check on truncated
/// integrals runs alongside and any disagreement is reported.
inline IntegrabilityReport integrability_class(const Connection& conn, int d) {
    if (d < 1) throw DomainError("integrability_class: d must be >= 1");
    IntegrabilityReport rep;
    switch (conn.family) {
    case Family::PowerLaw:
        rep.growth = static_cast<double>(d) < conn.param ? Growth::ThetaR0PowD : Growth::SuperPolynomial;
        break;
    case Family::Constant:
        rep.growth = (conn.param == 0.0 || conn.param == 1.0) ? Growth::ThetaR0PowD : Growth::SuperPolynomial;
        break;
    default: rep.growth = Growth::ThetaR0PowD;
    }

    for (std::size_t i = 0; i < rep.cutoffs.size(); ++i)
        rep.truncated[i] = truncated_entropy_moment(conn, d, rep.cutoffs[i]);
    const double i3 = rep.truncated[2];
    const double d1 = rep.truncated[1] - rep.truncated[0];
    const double d2 = rep.truncated[2] - rep.truncated[1];
    // Stable if the last decade adds under 1%, or if the increments shrink
    // and their geometric (Aitken) tail estimate is under 1%.
    bool stable = std::abs(d2) <= 0.01 * std::abs(i3);
    if (!stable && d1 > 0.0 && d2 >= 0.0 && d2 < 0.5 * d1) {
        const double ratio = d2 / d1;
        stable = d2 * ratio / (1.0 - ratio) <= 0.01 * std::abs(i3);
    }
    rep.numeric = stable ? Growth::ThetaR0PowD : Growth::SuperPolynomial;
    rep.agrees = rep.numeric == rep.growth;
    if (!rep.agrees) {
        rep.diagnostic = "numeric stabilization check says " + std::string(to_string(rep.numeric)) +
                         " but the analytic rule says " + to_string(rep.growth) + " for " + to_string(conn) +
                         ", d=" + std::to_string(d);
    }
    return rep;
}

} // namespace srgg
