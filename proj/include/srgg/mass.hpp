#pragma once

#include "srgg/asymptotics.hpp"
#include "srgg/connect.hpp"
#include "srgg/entropy.hpp"
#include "srgg/errors.hpp"
#include "srgg/geometry.hpp"
#include "srgg/parallel.hpp"
#include "srgg/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace srgg {

struct RhoMoments {
    double rho0 = 0.0; ///< int_0^inf rho(r) dr
    double rho1 = 0.0; ///< int_0^inf r rho(r) dr
    double rho2 = 0.0; ///< int_0^inf r^2 rho(r) dr
    double rho_at_0 = 0.0;
};

/// rho_k = int_0^inf r^k h2(p(r / r0)) dr for k = 0, 1, 2.
inline RhoMoments rho_moments(const Connection& conn, double r0) {
    if (!(r0 > 0.0)) throw DomainError("rho_moments: r0 must be > 0");
    for (int k = 0; k <= 2; ++k)
        if (integrability_class(conn, k + 1).growth == Growth::SuperPolynomial)
            throw DomainError("rho_moments: moment of order " + std::to_string(k) + " diverges for " +
                              to_string(conn));
    const auto breaks = scaled_breakpoints(conn);
    const double cut = negligible_beyond_scaled(conn);
    std::array<double, 3> scaled{};
    for (int k = 0; k <= 2; ++k) {
        auto g = [&](double x) { return std::pow(x, k) * entropy_scaled(conn, x); };
        quad::Result<double> r;
        if (std::isfinite(cut))
            r = quad::integrate(g, 0.0, cut, breaks, {1e-15, 1e-13, 4000});
        else
            r = quad::integrate_to_infinity(g, 0.0, 1.0, breaks, {1e-15, 1e-12, 8000});
        if (!r.converged) throw ConvergenceError("rho_moments: tolerance not reached");
        scaled[k] = r.value;
    }
    return {scaled[0] * r0, scaled[1] * r0 * r0, scaled[2] * r0 * r0 * r0, entropy_scaled(conn, 0.0)};
}

/// Which integrand a mass integral uses: h2(p) for entropy mass, p for connectivity mass.
enum class MassKind { Entropy, Connectivity };

namespace detail {

inline double mass_integrand(MassKind kind, const Connection& conn, double x) {
    return kind == MassKind::Entropy ? entropy_scaled(conn, x) : edge_prob(conn, x).p;
}

} // namespace detail

/// P(l) = int_0^l g(r / r0) r dr, tabulated and interpolated by cubic Hermite
/// polynomials whose slopes are the exact integrand.
class RadialProfile {
public:
    RadialProfile(MassKind kind, const Connection& conn, double r0, double max_len, std::size_t cells = 4096)
        : kind_(kind), conn_(conn), r0_(r0) {
        if (!(r0 > 0.0)) throw DomainError("RadialProfile: r0 must be > 0");
        len_ = std::min(max_len, r0 * negligible_beyond_scaled(conn));
        auto integrand = [&](double r) { return detail::mass_integrand(kind_, conn_, r / r0_) * r; };
        std::vector<double> knots{0.0};
        for (double b : scaled_breakpoints(conn))
            if (b * r0 > 0.0 && b * r0 < len_) knots.push_back(b * r0);
        knots.push_back(len_);
        std::sort(knots.begin(), knots.end());
        for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
            const double a = knots[s], b = knots[s + 1];
            const auto n = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(cells * (b - a) / len_)));
            for (std::size_t i = 0; i < n; ++i) nodes_.push_back(a + (b - a) * static_cast<double>(i) / n);
        }
        nodes_.push_back(len_);
        const std::size_t m = nodes_.size() - 1;
        value_.assign(m + 1, 0.0);
        slope_lo_.assign(m, 0.0);
        slope_hi_.assign(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const double a = nodes_[i], b = nodes_[i + 1], w = b - a;
            auto seg = quad::detail::kronrod21<double>(integrand, a, b);
            value_[i + 1] = value_[i] + seg.value;
            slope_lo_[i] = integrand(a + 1e-9 * w);
            slope_hi_[i] = integrand(b - 1e-9 * w);
        }
    }

    double operator()(double l) const {
        if (l <= 0.0) return 0.0;
        if (l >= len_) return value_.back();
        const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), l);
        const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
        const double a = nodes_[i], h = nodes_[i + 1] - a;
        const double t = (l - a) / h;
        const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
        const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
        return h00 * value_[i] + h10 * h * slope_lo_[i] + h01 * value_[i + 1] + h11 * h * slope_hi_[i];
    }

    double saturation() const { return value_.back(); }

private:
    MassKind kind_;
    Connection conn_;
    double r0_;
    double len_ = 0.0;
    std::vector<double> nodes_, value_, slope_lo_, slope_hi_;
};

inline bool mass_quadrature_supported(const Domain& dom) {
    switch (dom.kind) {
    case DomainKind::Interval:
    case DomainKind::Torus1D:
    case DomainKind::Square:
    case DomainKind::Disk:
    case DomainKind::Wedge: return true;
    default: return false;
    }
}

namespace detail {

// Distance from x to the boundary of a convex planar domain along angle phi.
inline double ray_length(const Domain& dom, const Point& x, double phi) {
    const double ux = std::cos(phi), uy = std::sin(phi);
    constexpr double inf = std::numeric_limits<double>::infinity();
    auto arc = [&](double R) {
        const double b = x[0] * ux + x[1] * uy;
        const double c = x[0] * x[0] + x[1] * x[1] - R * R;
        return std::max(0.0, -b + std::sqrt(std::max(0.0, b * b - c)));
    };
    switch (dom.kind) {
    case DomainKind::Square: {
        double t = inf;
        if (ux > 0) t = std::min(t, (1.0 - x[0]) / ux);
        if (ux < 0) t = std::min(t, -x[0] / ux);
        if (uy > 0) t = std::min(t, (1.0 - x[1]) / uy);
        if (uy < 0) t = std::min(t, -x[1] / uy);
        return std::max(0.0, t);
    }
    case DomainKind::Disk: return arc(1.0);
    case DomainKind::Wedge: {
        double t = arc(dom.radius);
        if (uy < 0) t = std::min(t, -x[1] / uy);
        const double nx = std::sin(dom.theta), ny = -std::cos(dom.theta);
        const double nu = nx * ux + ny * uy;
        if (nu < 0) t = std::min(t, -(nx * x[0] + ny * x[1]) / nu);
        return std::max(0.0, t);
    }
    default: throw UnsupportedError("ray_length: not a convex planar domain");
    }
}

inline std::vector<Point> domain_vertices(const Domain& dom) {
    switch (dom.kind) {
    case DomainKind::Square: return {Point{0, 0, 0}, Point{1, 0, 0}, Point{1, 1, 0}, Point{0, 1, 0}};
    case DomainKind::Wedge:
        return {Point{0, 0, 0}, Point{dom.radius, 0, 0},
                Point{dom.radius * std::cos(dom.theta), dom.radius * std::sin(dom.theta), 0}};
    default: return {};
    }
}

inline double planar_mass(const Domain& dom, const Point& x, const RadialProfile& P) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> breaks;
    for (const auto& v : domain_vertices(dom)) {
        const double dx = v[0] - x[0], dy = v[1] - x[1];
        if (std::hypot(dx, dy) < 1e-14) continue;
        double a = std::atan2(dy, dx);
        if (a < 0) a += two_pi;
        breaks.push_back(a);
    }
    auto r = quad::integrate([&](double phi) { return P(ray_length(dom, x, phi)); }, 0.0, two_pi, breaks,
                             {1e-15, 1e-11, 4000});
    if (!r.converged) throw ConvergenceError("entropy_mass: angular quadrature did not converge");
    return r.value;
}

inline double linear_mass(MassKind kind, const Domain& dom, const Connection& conn, double r0, double x) {
    auto g = [&](double y) {
        double d = std::abs(x - y);
        if (dom.kind == DomainKind::Torus1D) d = std::min(d, 1.0 - d);
        return mass_integrand(kind, conn, d / r0);
    };
    std::vector<double> breaks{x};
    for (double b : scaled_breakpoints(conn))
        for (double s : {x - b * r0, x + b * r0, x - 1.0 + b * r0, x + 1.0 - b * r0}) breaks.push_back(s);
    if (dom.kind == DomainKind::Torus1D) {
        const double opp = x < 0.5 ? x + 0.5 : x - 0.5;
        breaks.push_back(opp);
    }
    auto r = quad::integrate(g, 0.0, 1.0, breaks, {1e-15, 1e-12, 4000});
    if (!r.converged) throw ConvergenceError("entropy_mass: quadrature did not converge");
    return r.value;
}

} // namespace detail

struct MassOptions {
    Method method = Method::Quadrature;
    std::size_t budget = 10'000; ///< MC samples of y
    std::uint64_t seed = 0;
};

struct MassValue {
    double value = 0.0;
    double std_error = 0.0;
};

/// int_Omega g(|x - y| / r0) dy with g = h2(p) or p.
inline MassValue point_mass(MassKind kind, const Domain& dom, const Connection& conn, double r0, const Point& x,
                            const MassOptions& opt = {}) {
    if (!(r0 > 0.0)) throw DomainError("entropy_mass: r0 must be > 0");
    if (!contains(dom, x, 1e-12)) throw DomainError("entropy_mass: point lies outside the domain");
    if (opt.method == Method::Quadrature) {
        if (!mass_quadrature_supported(dom))
            throw UnsupportedError("entropy_mass: quadrature not available for '" + to_string(dom) + "'");
        if (dom.dim() == 1) return {detail::linear_mass(kind, dom, conn, r0, x[0]), 0.0};
        const RadialProfile P(kind, conn, r0, dom.diameter());
        return {detail::planar_mass(dom, x, P), 0.0};
    }
    if (opt.method != Method::MonteCarlo) throw UnsupportedError("entropy_mass: unsupported method");
    if (opt.budget < 2) throw DomainError("entropy_mass: budget must be >= 2");
    Engine g = make_stream(opt.seed, 0);
    MomentSum m;
    for (std::size_t i = 0; i < opt.budget; ++i)
        m.add(detail::mass_integrand(kind, conn, distance(dom, x, sample_point(dom, g)) / r0));
    return {dom.volume() * m.mean(), dom.volume() * m.std_error()};
}

/// Entropy mass H_x = int_Omega h2(p(|x - y| / r0)) dy.
inline MassValue entropy_mass(const Domain& dom, const Connection& conn, double r0, const Point& x,
                              const MassOptions& opt = {}) {
    return point_mass(MassKind::Entropy, dom, conn, r0, x, opt);
}

/// Connectivity mass M(x) = int_Omega p(|x - y| / r0) dy.
inline MassValue connectivity_mass(const Domain& dom, const Connection& conn, double r0, const Point& x,
                                   const MassOptions& opt = {}) {
    return point_mass(MassKind::Connectivity, dom, conn, r0, x, opt);
}

struct MassMap {
    Domain domain;
    Connection connection;
    double r0 = 0.0;
    std::size_t nx = 0, ny = 0;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    std::vector<double> values;    ///< row-major, index j * nx + i
    std::vector<unsigned char> inside;

    Point center(std::size_t i, std::size_t j) const {
        return {x0 + (x1 - x0) * (static_cast<double>(i) + 0.5) / static_cast<double>(nx),
                y0 + (y1 - y0) * (static_cast<double>(j) + 0.5) / static_cast<double>(ny), 0.0};
    }
    double at(std::size_t i, std::size_t j) const { return values[j * nx + i]; }

    /// Cell (i, j) with the largest value among cells inside the domain.
    std::pair<std::size_t, std::size_t> argmax() const {
        std::size_t best = 0;
        bool found = false;
        for (std::size_t k = 0; k < values.size(); ++k)
            if (inside[k] && (!found || values[k] > values[best])) {
                best = k;
                found = true;
            }
        return {best % nx, best / nx};
    }

    double mean_inside() const {
        double s = 0.0;
        std::size_t n = 0;
        for (std::size_t k = 0; k < values.size(); ++k)
            if (inside[k]) {
                s += values[k];
                ++n;
            }
        return n ? s / static_cast<double>(n) : 0.0;
    }
};

/// Entropy mass at every cell centre of an nx-by-ny grid over the domain's
/// bounding box. Cells whose centre lies outside the domain hold 0.
///
/// The Monte-Carlo method evaluates every cell against one shared pool of
/// `budget` sample points.
inline MassMap mass_map(const Domain& dom, const Connection& conn, double r0, std::size_t nx, std::size_t ny,
                        const MassOptions& opt = {}, MassKind kind = MassKind::Entropy) {
    if (dom.dim() != 2) throw UnsupportedError("mass_map: domain must be two-dimensional");
    if (nx == 0 || ny == 0) throw DomainError("mass_map: grid must be non-empty");
    if (!(r0 > 0.0)) throw DomainError("mass_map: r0 must be > 0");
    MassMap map{dom, conn, r0, nx, ny};
    switch (dom.kind) {
    case DomainKind::Disk: map.x0 = -1; map.x1 = 1; map.y0 = -1; map.y1 = 1; break;
    case DomainKind::Wedge:
        map.x0 = std::min(0.0, dom.radius * std::cos(dom.theta));
        map.x1 = dom.radius;
        map.y0 = 0.0;
        map.y1 = dom.theta >= std::numbers::pi / 2 ? dom.radius : dom.radius * std::sin(dom.theta);
        break;
    default: break;
    }
    map.values.assign(nx * ny, 0.0);
    map.inside.assign(nx * ny, 0);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) map.inside[j * nx + i] = contains(dom, map.center(i, j), 0.0);

    std::vector<Point> pool;
    std::unique_ptr<RadialProfile> profile;
    if (opt.method == Method::Quadrature) {
        if (!mass_quadrature_supported(dom))
            throw UnsupportedError("mass_map: quadrature not available for '" + to_string(dom) + "'");
        profile = std::make_unique<RadialProfile>(kind, conn, r0, dom.diameter());
    } else {
        if (opt.budget < 2) throw DomainError("mass_map: budget must be >= 2");
        Engine g = make_stream(opt.seed, 0);
        pool.reserve(opt.budget);
        for (std::size_t k = 0; k < opt.budget; ++k) pool.push_back(sample_point(dom, g));
    }

    ChunkPlan plan{nx * ny, 64};
    auto parts = run_chunks<std::vector<double>>(plan, [&](std::size_t, std::size_t b, std::size_t e) {
        std::vector<double> out(e - b, 0.0);
        for (std::size_t k = b; k < e; ++k) {
            if (!map.inside[k]) continue;
            const Point x = map.center(k % nx, k / nx);
            if (profile) {
                out[k - b] = detail::planar_mass(dom, x, *profile);
            } else {
                double s = 0.0;
                for (const auto& y : pool) s += detail::mass_integrand(kind, conn, distance(dom, x, y) / r0);
                out[k - b] = dom.volume() * s / static_cast<double>(pool.size());
            }
        }
        return out;
    });
    std::size_t k = 0;
    for (const auto& p : parts)
        for (double v : p) map.values[k++] = v;
    return map;
}

struct WedgePoint {
    double r = 0.0;     ///< distance from the corner
    double omega = 0.0; ///< angle from the first edge, in [0, theta]
    double theta = std::numbers::pi / 4;

    double omega_prime() const { return theta - omega; }
    Point cartesian() const { return {r * std::cos(omega), r * std::sin(omega), 0.0}; }
};

/// Leading-order entropy mass near the corner of a wedge:
/// theta rho_1 + rho_0 r (sin w + sin w') + rho(0) r^2/2 (sin w cos w + sin w' cos w').
inline double wedge_mass_leading(const WedgePoint& wp, const RhoMoments& m) {
    if (!(wp.r >= 0.0)) throw DomainError("wedge_mass_leading: r must be >= 0");
    if (!(wp.omega >= 0.0 && wp.omega <= wp.theta)) throw DomainError("wedge_mass_leading: omega outside [0, theta]");
    const double w = wp.omega, wq = wp.omega_prime();
    return wp.theta * m.rho1 + m.rho0 * wp.r * (std::sin(w) + std::sin(wq)) +
           m.rho_at_0 * 0.5 * wp.r * wp.r * (std::sin(w) * std::cos(w) + std::sin(wq) * std::cos(wq));
}

} // namespace srgg
