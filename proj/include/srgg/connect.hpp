#pragma once

#include "srgg/errors.hpp"
#include "srgg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace srgg {

enum class Family { Rayleigh, FermiDirac, PowerLaw, Hard, Constant };

/// Connection function p(r / r0). `param` is eta, alpha or q depending on family.
struct Connection {
    Family family = Family::Rayleigh;
    double param = 2.0;

    static Connection rayleigh(double eta) {
        if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("rayleigh: eta must be > 0");
        return {Family::Rayleigh, eta};
    }
    static Connection fermi_dirac(double alpha) {
        if (!std::isfinite(alpha)) throw DomainError("fermi: alpha must be finite");
        return {Family::FermiDirac, alpha};
    }
    static Connection power_law(double alpha) {
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("powerlaw: alpha must be > 0");
        return {Family::PowerLaw, alpha};
    }
    static Connection hard() { return {Family::Hard, 0.0}; }
    static Connection constant(double q) {
        if (!(q >= 0.0 && q <= 1.0)) throw DomainError("const: q must lie in [0, 1]");
        return {Family::Constant, q};
    }
};

/// Probability and its complement at scaled distance x = r / r0, each
/// computed without cancellation.
struct EdgeProb {
    double p;
    double q;
};

namespace detail {

inline double softplus(double u) { return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u))); }

} // namespace detail

inline EdgeProb edge_prob(const Connection& c, double x) {
    switch (c.family) {
    case Family::Rayleigh: {
        if (x <= 0.0) return {1.0, 0.0};
        const double t = std::pow(x, c.param);
        return {std::exp(-t), -std::expm1(-t)};
    }
    case Family::FermiDirac: {
        const double u = c.param + x;
        if (u >= 0.0) {
            const double e = std::exp(-u);
            return {e / (1.0 + e), 1.0 / (1.0 + e)};
        }
        const double e = std::exp(u);
        return {1.0 / (1.0 + e), e / (1.0 + e)};
    }
    case Family::PowerLaw: {
        if (x <= 1.0) return {1.0, 0.0};
        const double lx = std::log(x);
        return {std::exp(-c.param * lx), -std::expm1(-c.param * lx)};
    }
    case Family::Hard: return x < 1.0 ? EdgeProb{1.0, 0.0} : EdgeProb{0.0, 1.0};
    case Family::Constant: return {c.param, 1.0 - c.param};
    }
    return {0.0, 1.0};
}

/// p(r / r0).
inline double eval(const Connection& c, double r, double r0) {
    if (!(r0 > 0.0)) throw DomainError("eval: r0 must be > 0");
    if (!(r >= 0.0)) throw DomainError("eval: r must be >= 0");
    return edge_prob(c, r / r0).p;
}

/// h2(p) = -p log p - (1-p) log(1-p) in nats.
inline double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binary_entropy: p must lie in [0, 1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    if (p <= 0.5) return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
    const double q = 1.0 - p;
    return -q * std::log(q) - p * std::log1p(-q);
}

/// h2 from a (p, q) pair with p + q = 1, taking the smaller one as exact.
inline double binary_entropy_pq(double p, double q) {
    if (p <= q) {
        if (p <= 0.0) return 0.0;
        return -p * std::log(p) - q * std::log1p(-p);
    }
    if (q <= 0.0) return 0.0;
    return -q * std::log(q) - p * std::log1p(-q);
}

/// rho(x) = h2(p(x)) at scaled distance x, using closed-form logarithms where
/// the family allows so that both tails keep full relative precision.
inline double entropy_scaled(const Connection& c, double x) {
    switch (c.family) {
    case Family::Rayleigh: {
        if (x <= 0.0) return 0.0;
        const double t = std::pow(x, c.param);
        if (!std::isfinite(t) || t > 745.0) return 0.0;
        const double p = std::exp(-t);
        const double q = -std::expm1(-t);
        if (q <= 0.0) return 0.0;
        const double log_q = p < 0.5 ? std::log1p(-p) : std::log(q);
        return p * t - q * log_q;
    }
    case Family::FermiDirac: {
        const double u = c.param + x;
        const auto [p, q] = edge_prob(c, x);
        return p * detail::softplus(u) + q * detail::softplus(-u);
    }
    case Family::PowerLaw: {
        if (x <= 1.0) return 0.0;
        const double lp = -c.param * std::log(x);
        const double p = std::exp(lp);
        const double q = -std::expm1(lp);
        const double log_q = p < 0.5 ? std::log1p(-p) : std::log(q);
        return -p * lp - q * log_q;
    }
    case Family::Hard: return 0.0;
    case Family::Constant: return binary_entropy(c.param);
    }
    return 0.0;
}

/// rho(r) = h2(p(r / r0)), the connection function of the entropy graph.
inline double entropy_connection(const Connection& c, double r, double r0) {
    if (!(r0 > 0.0)) throw DomainError("entropy_connection: r0 must be > 0");
    if (!(r >= 0.0)) throw DomainError("entropy_connection: r must be >= 0");
    return entropy_scaled(c, r / r0);
}

/// Scaled distance where p = 1/2 (the peak of rho), if any.
inline std::optional<double> entropy_peak_scaled(const Connection& c) {
    switch (c.family) {
    case Family::Rayleigh: return std::pow(std::numbers::ln2, 1.0 / c.param);
    case Family::FermiDirac:
        if (-c.param > 0.0) return -c.param;
        return std::nullopt;
    case Family::PowerLaw: return std::pow(2.0, 1.0 / c.param);
    default: return std::nullopt;
    }
}

/// Scaled distances where rho or p has a kink, jump or sharp peak.
inline std::vector<double> scaled_breakpoints(const Connection& c) {
    std::vector<double> out;
    if (auto peak = entropy_peak_scaled(c)) out.push_back(*peak);
    if (c.family == Family::PowerLaw || c.family == Family::Hard) out.push_back(1.0);
    if (c.family == Family::Rayleigh) {
        // Tail and head of the spike for steep profiles.
        out.push_back(std::pow(0.05, 1.0 / c.param));
        out.push_back(std::pow(5.0, 1.0 / c.param));
        out.push_back(std::pow(40.0, 1.0 / c.param));
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Scaled distance beyond which both p and rho vanish to double precision,
/// or +inf when they never do.
inline double negligible_beyond_scaled(const Connection& c) {
    switch (c.family) {
    case Family::Rayleigh: return std::pow(745.0, 1.0 / c.param);
    case Family::FermiDirac: return std::max(0.0, 745.0 - c.param);
    case Family::Hard: return 1.0;
    default: return std::numeric_limits<double>::infinity();
    }
}

struct SmallArgExpansion {
    double constant = 0.0; ///< rho(0)
    std::vector<std::pair<double, double>> power_terms; ///< (alpha, a_alpha)
    std::vector<std::pair<double, double>> log_terms;   ///< (beta, b_beta), multiplying x^beta log x
    double alpha_min = 0.0;
    double beta_min = 0.0;
};

/// rho(x) = rho(0) + sum a x^alpha + sum b x^beta log x + ...; Rayleigh only.
inline SmallArgExpansion small_arg_expansion(const Connection& c) {
    if (c.family != Family::Rayleigh)
        throw UnsupportedError("small_arg_expansion: only the Rayleigh family has a known expansion");
    SmallArgExpansion e;
    e.constant = 0.0;
    e.power_terms = {{c.param, 1.0}};
    e.log_terms = {{c.param, -c.param}};
    e.alpha_min = c.param;
    e.beta_min = c.param;
    return e;
}

inline std::string to_string(const Connection& c) {
    char buf[96];
    switch (c.family) {
    case Family::Rayleigh: std::snprintf(buf, sizeof buf, "rayleigh:eta=%.17g", c.param); break;
    case Family::FermiDirac: std::snprintf(buf, sizeof buf, "fermi:alpha=%.17g", c.param); break;
    case Family::PowerLaw: std::snprintf(buf, sizeof buf, "powerlaw:alpha=%.17g", c.param); break;
    case Family::Hard: return "hard";
    case Family::Constant: std::snprintf(buf, sizeof buf, "const:q=%.17g", c.param); break;
    }
    return buf;
}

/// Parses `rayleigh:eta=2`, `fermi:alpha=0.0`, `powerlaw:alpha=3`, `hard`, `const:q=0.1`.
inline Connection parse_connection(std::string_view text) {
    const auto colon = text.find(':');
    const std::string name(text.substr(0, colon));
    const std::string_view body = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    auto single = [&](const char* key) {
        const auto kv = detail::parse_params(body, name);
        if (kv.size() != 1 || kv[0].first != key)
            throw ParseError("connection '" + name + "' expects exactly '" + key + "=<value>'");
        return detail::parse_number(kv[0].second, name);
    };
    try {
        if (name == "hard") {
            if (!body.empty()) throw ParseError("connection 'hard' takes no parameters");
            return Connection::hard();
        }
        if (name == "rayleigh") return Connection::rayleigh(single("eta"));
        if (name == "fermi") return Connection::fermi_dirac(single("alpha"));
        if (name == "powerlaw") return Connection::power_law(single("alpha"));
        if (name == "const") return Connection::constant(single("q"));
    } catch (const DomainError& e) {
        throw ParseError(e.what());
    }
    throw ParseError("unknown connection '" + std::string(text) + "'");
}

} // namespace srgg
