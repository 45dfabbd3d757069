#pragma once

#include "srgg/errors.hpp"
#include "srgg/parallel.hpp"
#include "srgg/quadrature.hpp"
#include "srgg/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace srgg {

enum class DomainKind { Interval, Torus1D, Square, Disk, Cube, Ball, Wedge };

/// Embedding domain with uniform (normalized Lebesgue) sampling measure.
struct Domain {
    DomainKind kind = DomainKind::Interval;
    double theta = std::numbers::pi / 4; // wedge opening angle
    double radius = 1.0;                 // wedge radius

    static Domain interval() { return {DomainKind::Interval}; }
    static Domain torus1d() { return {DomainKind::Torus1D}; }
    static Domain square() { return {DomainKind::Square}; }
    static Domain disk() { return {DomainKind::Disk}; }
    static Domain cube() { return {DomainKind::Cube}; }
    static Domain ball() { return {DomainKind::Ball}; }
    static Domain wedge(double theta, double radius = 1.0) {
        if (!(theta > 0.0 && theta <= std::numbers::pi))
            throw DomainError("wedge: angle must lie in (0, pi]");
        if (!(radius > 0.0)) throw DomainError("wedge: radius must be > 0");
        return {DomainKind::Wedge, theta, radius};
    }

    int dim() const {
        switch (kind) {
        case DomainKind::Interval:
        case DomainKind::Torus1D: return 1;
        case DomainKind::Cube:
        case DomainKind::Ball: return 3;
        default: return 2;
        }
    }

    double diameter() const {
        switch (kind) {
        case DomainKind::Interval: return 1.0;
        case DomainKind::Torus1D: return 0.5;
        case DomainKind::Square: return std::numbers::sqrt2;
        case DomainKind::Disk: return 2.0;
        case DomainKind::Cube: return std::numbers::sqrt3;
        case DomainKind::Ball: return 2.0;
        case DomainKind::Wedge: return radius * std::max(1.0, 2.0 * std::sin(0.5 * theta));
        }
        return 0.0;
    }

    double volume() const {
        switch (kind) {
        case DomainKind::Disk: return std::numbers::pi;
        case DomainKind::Ball: return 4.0 * std::numbers::pi / 3.0;
        case DomainKind::Wedge: return 0.5 * theta * radius * radius;
        default: return 1.0;
        }
    }
};

using Point = std::array<double, 3>;

inline std::string to_string(const Domain& dom) {
    switch (dom.kind) {
    case DomainKind::Interval: return "interval";
    case DomainKind::Torus1D: return "torus";
    case DomainKind::Square: return "square";
    case DomainKind::Disk: return "disk";
    case DomainKind::Cube: return "cube";
    case DomainKind::Ball: return "ball";
    case DomainKind::Wedge: {
        char buf[96];
        std::snprintf(buf, sizeof buf, "wedge:theta=%.17g,radius=%.17g", dom.theta, dom.radius);
        return buf;
    }
    }
    return "?";
}

namespace detail {

inline std::vector<std::pair<std::string, std::string>> parse_params(std::string_view body,
                                                                    std::string_view what) {
    std::vector<std::pair<std::string, std::string>> out;
    while (!body.empty()) {
        const auto comma = body.find(',');
        const auto item = body.substr(0, comma);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos || eq == 0)
            throw ParseError(std::string(what) + ": expected key=value, got '" + std::string(item) + "'");
        out.emplace_back(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
        if (comma == std::string_view::npos) break;
        body.remove_prefix(comma + 1);
    }
    return out;
}

inline double parse_number(const std::string& text, std::string_view what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v))
        throw ParseError(std::string(what) + ": bad number '" + text + "'");
    return v;
}

} // namespace detail

/// Parses `interval`, `torus`, `square`, `disk`, `cube`, `ball` or
/// `wedge:theta=<rad>,radius=<len>` (both wedge keys optional).
inline Domain parse_domain(std::string_view text) {
    const auto colon = text.find(':');
    const std::string name(text.substr(0, colon));
    const std::string_view body = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    auto plain = [&](Domain d) {
        if (!body.empty()) throw ParseError("domain '" + name + "' takes no parameters");
        return d;
    };
    if (name == "interval") return plain(Domain::interval());
    if (name == "torus" || name == "torus1d") return plain(Domain::torus1d());
    if (name == "square") return plain(Domain::square());
    if (name == "disk") return plain(Domain::disk());
    if (name == "cube") return plain(Domain::cube());
    if (name == "ball") return plain(Domain::ball());
    if (name == "wedge") {
        double theta = std::numbers::pi / 4, radius = 1.0;
        for (const auto& [k, v] : detail::parse_params(body, "wedge")) {
            if (k == "theta") theta = detail::parse_number(v, "wedge theta");
            else if (k == "radius") radius = detail::parse_number(v, "wedge radius");
            else throw ParseError("wedge: unknown key '" + k + "'");
        }
        try {
            return Domain::wedge(theta, radius);
        } catch (const DomainError& e) {
            throw ParseError(e.what());
        }
    }
    throw ParseError("unknown domain '" + std::string(text) + "'");
}

inline bool contains(const Domain& dom, const Point& x, double slack = 1e-12) {
    switch (dom.kind) {
    case DomainKind::Interval:
    case DomainKind::Torus1D: return x[0] >= -slack && x[0] <= 1.0 + slack;
    case DomainKind::Square:
        return x[0] >= -slack && x[0] <= 1.0 + slack && x[1] >= -slack && x[1] <= 1.0 + slack;
    case DomainKind::Cube:
        return x[0] >= -slack && x[0] <= 1.0 + slack && x[1] >= -slack && x[1] <= 1.0 + slack &&
               x[2] >= -slack && x[2] <= 1.0 + slack;
    case DomainKind::Disk: return std::hypot(x[0], x[1]) <= 1.0 + slack;
    case DomainKind::Ball: return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) <= 1.0 + slack;
    case DomainKind::Wedge: {
        const double r = std::hypot(x[0], x[1]);
        if (r > dom.radius * (1.0 + slack)) return false;
        if (r <= slack) return true;
        double a = std::atan2(x[1], x[0]);
        return a >= -slack && a <= dom.theta + slack;
    }
    }
    return false;
}

/// Uniform point in the domain. Disk and ball use radius-power inverse CDFs,
/// the wedge a uniform angle with radius R_w * sqrt(u).
inline Point sample_point(const Domain& dom, Engine& g) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    switch (dom.kind) {
    case DomainKind::Interval:
    case DomainKind::Torus1D: return {uniform01(g), 0.0, 0.0};
    case DomainKind::Square: {
        const double x = uniform01(g);
        return {x, uniform01(g), 0.0};
    }
    case DomainKind::Cube: {
        const double x = uniform01(g);
        const double y = uniform01(g);
        return {x, y, uniform01(g)};
    }
    case DomainKind::Disk: {
        const double r = std::sqrt(uniform01(g));
        const double a = two_pi * uniform01(g);
        return {r * std::cos(a), r * std::sin(a), 0.0};
    }
    case DomainKind::Ball: {
        const double r = std::cbrt(uniform01(g));
        const double z = 2.0 * uniform01(g) - 1.0;
        const double a = two_pi * uniform01(g);
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * rho * std::cos(a), r * rho * std::sin(a), r * z};
    }
    case DomainKind::Wedge: {
        const double r = dom.radius * std::sqrt(uniform01(g));
        const double a = dom.theta * uniform01(g);
        return {r * std::cos(a), r * std::sin(a), 0.0};
    }
    }
    return {};
}

inline double distance(const Domain& dom, const Point& x, const Point& y) {
    switch (dom.kind) {
    case DomainKind::Interval: return std::abs(x[0] - y[0]);
    case DomainKind::Torus1D: {
        const double d = std::abs(x[0] - y[0]);
        return std::min(d, 1.0 - d);
    }
    case DomainKind::Cube:
    case DomainKind::Ball: {
        const double a = x[0] - y[0], b = x[1] - y[1], c = x[2] - y[2];
        return std::sqrt(a * a + b * b + c * c);
    }
    default: return std::hypot(x[0] - y[0], x[1] - y[1]);
    }
}

/// Distance between two fresh independent uniform points.
inline double sample_pair_distance(const Domain& dom, Engine& g) {
    const Point x = sample_point(dom, g);
    const Point y = sample_point(dom, g);
    return distance(dom, x, y);
}

inline bool has_closed_form_density(const Domain& dom) {
    switch (dom.kind) {
    case DomainKind::Interval:
    case DomainKind::Torus1D:
    case DomainKind::Square:
    case DomainKind::Disk: return true;
    default: return false;
    }
}

/// Points where the pair-distance density has a kink or jump.
inline std::vector<double> density_breakpoints(const Domain& dom) {
    if (dom.kind == DomainKind::Square) return {1.0};
    return {};
}

/// Pair-distance density f(r) on [0, D] for the closed-form domains.
inline double pair_distance_density(const Domain& dom, double r) {
    if (!has_closed_form_density(dom))
        throw UnsupportedError("pair_distance_density: no closed form for domain '" + to_string(dom) +
                               "'; use empirical_distance_cdf");
    if (!(r >= 0.0) || r > dom.diameter()) return 0.0;
    constexpr double pi = std::numbers::pi;
    switch (dom.kind) {
    case DomainKind::Interval: return 2.0 - 2.0 * r;
    case DomainKind::Torus1D: return 2.0;
    case DomainKind::Square:
        if (r <= 1.0) return 2.0 * r * (pi - 4.0 * r + r * r);
        return 2.0 * r *
               (4.0 * std::sqrt(r * r - 1.0) - (r * r + 2.0 - pi) - 4.0 * std::acos(1.0 / r));
    case DomainKind::Disk: {
        const double h = 0.5 * r;
        return 4.0 * r / pi * (std::acos(h) - h * std::sqrt(std::max(0.0, 1.0 - h * h)));
    }
    default: return 0.0;
    }
}

/// CDF of the pair distance, tabulated once per domain and interpolated with
/// cubic Hermite polynomials using the exact density as the slope.
class DistanceCdf {
public:
    explicit DistanceCdf(const Domain& dom, std::size_t cells = 4096) : dom_(dom) {
        if (!has_closed_form_density(dom))
            throw UnsupportedError("DistanceCdf: no closed form for domain '" + to_string(dom) + "'");
        D_ = dom.diameter();
        h_ = D_ / static_cast<double>(cells);
        F_.assign(cells + 1, 0.0);
        f_.assign(cells + 1, 0.0);
        const auto kinks = density_breakpoints(dom);
        for (std::size_t i = 0; i <= cells; ++i) f_[i] = pair_distance_density(dom, i * h_);
        for (std::size_t i = 0; i < cells; ++i) {
            const double a = i * h_, b = (i + 1 == cells) ? D_ : (i + 1) * h_;
            auto r = quad::integrate([&](double x) { return pair_distance_density(dom, x); }, a, b, kinks,
                                     {1e-16, 1e-13, 200});
            F_[i + 1] = F_[i] + r.value;
        }
    }

    double operator()(double r) const {
        if (r <= 0.0) return 0.0;
        if (r >= D_) return 1.0;
        const std::size_t n = F_.size() - 1;
        std::size_t i = std::min(n - 1, static_cast<std::size_t>(r / h_));
        const double a = i * h_;
        const double t = (r - a) / h_;
        const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
        const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
        const double v = h00 * F_[i] + h10 * h_ * f_[i] + h01 * F_[i + 1] + h11 * h_ * f_[i + 1];
        return std::clamp(v, 0.0, 1.0);
    }

    double total() const { return F_.back(); }

private:
    Domain dom_;
    double D_ = 0.0, h_ = 0.0;
    std::vector<double> F_, f_;
};

/// Dvoretzky-Kiefer-Wolfowitz half-width: P(sup|F_n - F| > eps) <= 1 - confidence.
inline double dkw_epsilon(std::size_t n, double confidence = 0.99) {
    if (n == 0) throw DomainError("dkw_epsilon: n must be > 0");
    return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(n)));
}

/// Empirical CDF of pair distances.
struct EmpiricalCDF {
    std::vector<double> sorted;
    std::size_t n_pairs = 0;
    std::uint64_t seed = 0;

    double operator()(double r) const {
        if (sorted.empty()) return 0.0;
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), r);
        return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
    }

    /// sup_r |F_hat(r) - F(r)|, checked on both sides of every jump.
    template <class Cdf>
    double sup_deviation(const Cdf& F) const {
        const double n = static_cast<double>(sorted.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            const double Fr = F(sorted[i]);
            worst = std::max({worst, std::abs(static_cast<double>(i + 1) / n - Fr),
                              std::abs(static_cast<double>(i) / n - Fr)});
        }
        return worst;
    }

    void write_csv(std::ostream& os, std::size_t max_rows = 0) const {
        const std::size_t n = sorted.size();
        const std::size_t stride = (max_rows == 0 || n <= max_rows) ? 1 : (n + max_rows - 1) / max_rows;
        os << "distance,cdf\n";
        char buf[64];
        for (std::size_t i = stride - 1; i < n; i += stride) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", sorted[i],
                          static_cast<double>(i + 1) / static_cast<double>(n));
            os << buf;
        }
        if ((n % stride) != 0 && n > 0) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", sorted.back(), 1.0);
            os << buf;
        }
    }
};

inline constexpr std::size_t kDefaultChunk = std::size_t{1} << 15;

/// Pair distances drawn in deterministic chunks; the result depends only on
/// (seed, n_pairs, chunk).
inline std::vector<double> sample_pair_distances(const Domain& dom, std::size_t n_pairs, std::uint64_t seed,
                                                 std::size_t chunk = kDefaultChunk) {
    ChunkPlan plan{n_pairs, chunk};
    auto parts = run_chunks<std::vector<double>>(plan, [&](std::size_t c, std::size_t b, std::size_t e) {
        Engine g = make_stream(seed, c);
        std::vector<double> out(e - b);
        for (auto& v : out) v = sample_pair_distance(dom, g);
        return out;
    });
    std::vector<double> all;
    all.reserve(n_pairs);
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return all;
}

inline EmpiricalCDF empirical_distance_cdf(const Domain& dom, std::size_t n_pairs, std::uint64_t seed) {
    if (n_pairs < 1000) throw DomainError("empirical_distance_cdf: n_pairs must be >= 1000");
    EmpiricalCDF out;
    out.sorted = sample_pair_distances(dom, n_pairs, seed);
    std::sort(out.sorted.begin(), out.sorted.end());
    out.n_pairs = n_pairs;
    out.seed = seed;
    return out;
}

/// Histogram estimate of f(r) with Freedman-Diaconis bin width; stands in for
/// the closed form on domains that lack one.
class HistogramDensity {
public:
    explicit HistogramDensity(const EmpiricalCDF& cdf, double upper) : upper_(upper), n_(cdf.sorted.size()) {
        const auto& s = cdf.sorted;
        if (s.size() < 2) throw DomainError("HistogramDensity: need at least two samples");
        const double iqr = s[(3 * s.size()) / 4] - s[s.size() / 4];
        double width = 2.0 * iqr / std::cbrt(static_cast<double>(s.size()));
        if (!(width > 0.0)) width = upper / 100.0;
        bins_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(upper / width)));
        width_ = upper / static_cast<double>(bins_);
        counts_.assign(bins_, 0.0);
        for (double v : s) {
            const auto b = std::min(bins_ - 1, static_cast<std::size_t>(std::max(0.0, v) / width_));
            counts_[b] += 1.0;
        }
    }

    double density(double r) const {
        if (r < 0.0 || r > upper_) return 0.0;
        const auto b = std::min(bins_ - 1, static_cast<std::size_t>(r / width_));
        return counts_[b] / (static_cast<double>(n_) * width_);
    }

    double bin_width() const { return width_; }
    std::size_t bins() const { return bins_; }
    std::size_t samples() const { return n_; }

    /// Integral of g against the histogram density, each bin averaged with a
    /// Gauss-Kronrod rule.
    template <class G>
    double expect(G&& g, std::span<const double> breakpoints = {}) const {
        double total = 0.0;
        for (std::size_t b = 0; b < bins_; ++b) {
            if (counts_[b] == 0.0) continue;
            const double a = b * width_, e = (b + 1) * width_;
            auto r = quad::integrate(g, a, e, breakpoints, {1e-15, 1e-10, 200});
            total += counts_[b] / static_cast<double>(n_) * r.value / width_;
        }
        return total;
    }

private:
    double upper_;
    std::size_t n_;
    std::size_t bins_ = 1;
    double width_ = 1.0;
    std::vector<double> counts_;
};

struct SmallRCoeffs {
    double s_leading = 0.0; ///< coefficient of r^{d-1}
    double a_d = 0.0;       ///< coefficient of r^d
    bool valid = false;     ///< a_d known in closed form
};

/// f(r) = s_leading r^{d-1} + a_d r^d + ... for small r.
inline SmallRCoeffs small_r_coeffs(const Domain& dom) {
    constexpr double pi = std::numbers::pi;
    switch (dom.kind) {
    case DomainKind::Interval: return {2.0, -2.0, true};
    case DomainKind::Torus1D: return {2.0, 0.0, false};
    case DomainKind::Square: return {2.0 * pi, -8.0, true};
    case DomainKind::Disk: return {2.0 * pi / dom.volume(), 0.0, false};
    case DomainKind::Cube: return {4.0 * pi, 0.0, false};
    case DomainKind::Ball: return {4.0 * pi / dom.volume(), 0.0, false};
    case DomainKind::Wedge: return {2.0 * pi / dom.volume(), 0.0, false};
    }
    return {};
}

} // namespace srgg
