#pragma once

#include "srgg/connect.hpp"
#include "srgg/errors.hpp"
#include "srgg/geometry.hpp"
#include "srgg/parallel.hpp"
#include "srgg/quadrature.hpp"
#include "srgg/random.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace srgg {

enum class Method { Quadrature, MonteCarlo, Instance };

inline const char* to_string(Method m) {
    switch (m) {
    case Method::Quadrature: return "quadrature";
    case Method::MonteCarlo: return "mc";
    case Method::Instance: return "instance";
    }
    return "?";
}

struct EntropyEstimate {
    double value = 0.0; ///< nats per edge
    Method method = Method::Quadrature;
    double std_error = 0.0;
    std::size_t n_pairs = 0;
    double r0 = 0.0;
};

struct McConfig {
    std::size_t n_pairs = 1'000'000;
    std::uint64_t seed = 0;
    std::size_t chunk_size = kDefaultChunk;
};

/// Breakpoints in r for integrands built from f(r) and p(r / r0).
inline std::vector<double> pair_breakpoints(const Domain& dom, const Connection& conn, double r0) {
    std::vector<double> out = density_breakpoints(dom);
    for (double x : scaled_breakpoints(conn)) out.push_back(x * r0);
    return out;
}

/// Integral of f(r) g(r) over [0, D], truncated where p and rho vanish.
template <class G>
quad::Result<double> pair_integral(const Domain& dom, const Connection& conn, double r0, G&& g, double abs_tol,
                                   double rel_tol = 1e-11) {
    const double D = dom.diameter();
    const auto breaks = pair_breakpoints(dom, conn, r0);
    auto integrand = [&](double r) { return pair_distance_density(dom, r) * g(r); };
    return quad::integrate(integrand, 0.0, D, breaks, {abs_tol, rel_tol, 20000});
}

namespace detail {

inline void require_r0(double r0, const char* what) {
    if (!(r0 > 0.0) || !std::isfinite(r0)) throw DomainError(std::string(what) + ": r0 must be > 0");
}

inline void require_closed_form(const Domain& dom, const char* what) {
    if (!has_closed_form_density(dom))
        throw UnsupportedError(std::string(what) + ": domain '" + to_string(dom) +
                               "' has no closed-form distance density; use the Monte-Carlo path");
}

} // namespace detail

/// Mean over fresh independent pairs of fn(distance), with K statistics
/// collected in one pass so they share random numbers.
template <std::size_t K, class Fn>
std::array<MomentSum, K> pair_moments_mc(const Domain& dom, Fn&& fn, const McConfig& cfg) {
    ChunkPlan plan{cfg.n_pairs, cfg.chunk_size};
    auto parts = run_chunks<std::array<MomentSum, K>>(plan, [&](std::size_t c, std::size_t b, std::size_t e) {
        Engine g = make_stream(cfg.seed, c);
        std::array<MomentSum, K> acc{};
        for (std::size_t i = b; i < e; ++i) {
            const std::array<double, K> v = fn(sample_pair_distance(dom, g));
            for (std::size_t k = 0; k < K; ++k) acc[k].add(v[k]);
        }
        return acc;
    });
    std::array<MomentSum, K> total{};
    for (const auto& p : parts)
        for (std::size_t k = 0; k < K; ++k) total[k].merge(p[k]);
    return total;
}

/// Conditional entropy per edge, int_0^D f(r) h2(p(r / r0)) dr.
inline EntropyEstimate entropy_per_edge_quadrature(const Domain& dom, const Connection& conn, double r0,
                                                   double tol = 1e-13) {
    detail::require_r0(r0, "entropy_per_edge_quadrature");
    detail::require_closed_form(dom, "entropy_per_edge_quadrature");
    if (!(tol > 0.0)) throw DomainError("entropy_per_edge_quadrature: tol must be > 0");
    auto res = pair_integral(dom, conn, r0, [&](double r) { return entropy_scaled(conn, r / r0); }, tol);
    if (!res.converged) throw ConvergenceError("entropy_per_edge_quadrature: tolerance not reached");
    return {std::max(0.0, res.value), Method::Quadrature, 0.0, 0, r0};
}

inline EntropyEstimate entropy_per_edge_mc(const Domain& dom, const Connection& conn, double r0,
                                           const McConfig& cfg) {
    detail::require_r0(r0, "entropy_per_edge_mc");
    if (cfg.n_pairs < 1000) throw DomainError("entropy_per_edge_mc: n_pairs must be >= 1000");
    const auto m = pair_moments_mc<1>(
        dom, [&](double r) { return std::array<double, 1>{entropy_scaled(conn, r / r0)}; }, cfg);
    return {m[0].mean(), Method::MonteCarlo, m[0].std_error(), cfg.n_pairs, r0};
}

/// Same integral against a histogram density, for domains without a closed form.
inline EntropyEstimate entropy_per_edge_histogram(const HistogramDensity& hist, const Connection& conn,
                                                  double r0) {
    detail::require_r0(r0, "entropy_per_edge_histogram");
    std::vector<double> breaks;
    for (double x : scaled_breakpoints(conn)) breaks.push_back(x * r0);
    const double m1 = hist.expect([&](double r) { return entropy_scaled(conn, r / r0); }, breaks);
    const double m2 = hist.expect(
        [&](double r) {
            const double v = entropy_scaled(conn, r / r0);
            return v * v;
        },
        breaks);
    const double var = std::max(0.0, m2 - m1 * m1);
    return {m1, Method::Quadrature, std::sqrt(var / static_cast<double>(hist.samples())), hist.samples(), r0};
}

struct GraphInstance {
    Domain domain;
    Connection connection;
    double r0 = 1.0;
    std::uint64_t seed = 0;
    std::vector<Point> positions;
    std::vector<std::pair<std::size_t, std::size_t>> edges; ///< i < j
};

/// Samples n uniform points and includes each pair independently with
/// probability p(r_ij / r0).
inline GraphInstance generate_srgg(const Domain& dom, const Connection& conn, double r0, std::size_t n,
                                   std::uint64_t seed, bool with_edges = true) {
    detail::require_r0(r0, "generate_srgg");
    if (n < 1) throw DomainError("generate_srgg: n must be >= 1");
    GraphInstance g{dom, conn, r0, seed, {}, {}};
    Engine eng = make_stream(seed, 0);
    g.positions.reserve(n);
    for (std::size_t i = 0; i < n; ++i) g.positions.push_back(sample_point(dom, eng));
    if (!with_edges) return g;
    Engine coin = make_stream(seed, 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double p = edge_prob(conn, distance(dom, g.positions[i], g.positions[j]) / r0).p;
            if (uniform01(coin) < p) g.edges.emplace_back(i, j);
        }
    return g;
}

/// Average of h2(p(r_ij / r0)) over all pairs of a realized point set.
inline EntropyEstimate conditional_entropy_of_instance(const GraphInstance& g) {
    const std::size_t n = g.positions.size();
    if (n < 2) throw DomainError("conditional_entropy_of_instance: need at least 2 nodes");
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            sum += entropy_scaled(g.connection, distance(g.domain, g.positions[i], g.positions[j]) / g.r0);
    const std::size_t pairs = n * (n - 1) / 2;
    return {sum / static_cast<double>(pairs), Method::Instance, 0.0, pairs, g.r0};
}

/// Mean connection probability and its complement, each accurate on its own.
struct MeanConnection {
    double p = 0.0;
    double q = 1.0;
    double std_error = 0.0;
};

inline MeanConnection mean_connection(const Domain& dom, const Connection& conn, double r0, Method method,
                                      const McConfig& cfg = {}) {
    detail::require_r0(r0, "mean_connection_prob");
    if (method == Method::Quadrature) {
        detail::require_closed_form(dom, "mean_connection_prob");
        auto p = pair_integral(dom, conn, r0, [&](double r) { return edge_prob(conn, r / r0).p; }, 1e-15);
        auto q = pair_integral(dom, conn, r0, [&](double r) { return edge_prob(conn, r / r0).q; }, 1e-15);
        if (!p.converged || !q.converged) throw ConvergenceError("mean_connection_prob: tolerance not reached");
        return {std::clamp(p.value, 0.0, 1.0), std::clamp(q.value, 0.0, 1.0), 0.0};
    }
    if (method != Method::MonteCarlo) throw UnsupportedError("mean_connection_prob: unsupported method");
    const auto m = pair_moments_mc<2>(
        dom,
        [&](double r) {
            const auto e = edge_prob(conn, r / r0);
            return std::array<double, 2>{e.p, e.q};
        },
        cfg);
    return {m[0].mean(), m[1].mean(), m[0].std_error()};
}

inline double mean_connection_prob(const Domain& dom, const Connection& conn, double r0, Method method,
                                   const McConfig& cfg = {}) {
    return mean_connection(dom, conn, r0, method, cfg).p;
}

/// Limit compressibility gap (h2(p_bar) - H_bar) / p_bar between the
/// Erdos-Renyi ensemble with matched density and the soft RGG.
inline double compressibility_difference(const Domain& dom, const Connection& conn, double r0,
                                         const McConfig& cfg = {}) {
    detail::require_r0(r0, "compressibility_difference");
    double p = 0.0, q = 0.0, h = 0.0;
    if (has_closed_form_density(dom)) {
        const auto mc = mean_connection(dom, conn, r0, Method::Quadrature);
        p = mc.p;
        q = mc.q;
        h = entropy_per_edge_quadrature(dom, conn, r0, 1e-15).value;
    } else {
        const auto m = pair_moments_mc<3>(
            dom,
            [&](double r) {
                const auto e = edge_prob(conn, r / r0);
                return std::array<double, 3>{e.p, e.q, entropy_scaled(conn, r / r0)};
            },
            cfg);
        p = m[0].mean();
        q = m[1].mean();
        h = m[2].mean();
    }
    if (!(p > 0.0) || !(q > 0.0))
        throw DomainError("compressibility_difference: mean connection probability is degenerate");
    const double er = binary_entropy_pq(p, q);
    double gap = (er - h) / p;
    if (gap < 0.0) {
        if (-gap > 1e-9 * std::max(er / p, 1e-300)) throw ConvergenceError("compressibility_difference: negative gap");
        gap = 0.0;
    }
    return gap;
}

/// r0 maximizing the quadrature entropy per edge, by golden-section search in
/// log r0 over [lo, hi]. Assumes a single interior maximum.
inline double entropy_maximizing_range(const Domain& dom, const Connection& conn, double lo = 1e-2,
                                       double hi = 10.0, double tol = 1e-8) {
    if (!(lo > 0.0 && hi > lo)) throw DomainError("entropy_maximizing_range: need 0 < lo < hi");
    auto h = [&](double u) { return entropy_per_edge_quadrature(dom, conn, std::exp(u)).value; };
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::log(lo), b = std::log(hi);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = h(c), fd = h(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = h(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = h(d);
        }
    }
    return std::exp(0.5 * (a + b));
}

} // namespace srgg
