#pragma once

#include "srgg/asymptotics.hpp"
#include "srgg/cantor.hpp"
#include "srgg/connect.hpp"
#include "srgg/entropy.hpp"
#include "srgg/geometry.hpp"
#include "srgg/mass.hpp"
#include "srgg/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace srgg::validation {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct Options {
    std::uint64_t seed = 20240611;
};

namespace detail {

inline std::string fmt(const char* f, auto... args) {
    std::string out(static_cast<std::size_t>(std::snprintf(nullptr, 0, f, args...)), '\0');
    std::snprintf(out.data(), out.size() + 1, f, args...);
    return out;
}

template <class Fn>
CriterionResult timed(int id, const char* name, Fn&& fn) {
    CriterionResult r;
    r.id = id;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        fn(r);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline double spread(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo;
}

} // namespace detail

/// Quadrature against Monte Carlo over 4 domains x 3 eta x 3 r0.
inline CriterionResult cross_method(const Options& opt = {}) {
    return detail::timed(1, "quadrature vs Monte Carlo, 36 configurations", [&](CriterionResult& r) {
        double worst = 0.0;
        std::string where;
        int failed = 0;
        std::uint64_t k = 0;
        for (const auto& dom : {Domain::interval(), Domain::torus1d(), Domain::square(), Domain::disk()})
            for (double eta : {1.0, 2.0, 4.0})
                for (double r0 : {0.05, 0.25, 1.0}) {
                    const auto c = Connection::rayleigh(eta);
                    const double q = entropy_per_edge_quadrature(dom, c, r0).value;
                    const auto mc = entropy_per_edge_mc(dom, c, r0, {1'000'000, opt.seed + k++, kDefaultChunk});
                    const double z = std::abs(q - mc.value) / mc.std_error;
                    if (z > 3.0) ++failed;
                    if (z > worst) {
                        worst = z;
                        where = to_string(dom) + " eta=" + detail::fmt("%g", eta) + " r0=" + detail::fmt("%g", r0);
                    }
                }
        r.passed = failed == 0;
        r.detail = detail::fmt("%d of 36 beyond 3 sigma; worst %.2f sigma at ", failed, worst) + where;
    });
}

/// Small-r0 leading asymptote and its second-order refinement.
inline CriterionResult small_range_asymptote(const Options& = {}) {
    return detail::timed(2, "small-r0 asymptote ratios", [&](CriterionResult& r) {
        bool ok = true;
        std::string d;
        for (const auto& dom : {Domain::interval(), Domain::square()}) {
            const auto c = Connection::rayleigh(2);
            double prev = INFINITY;
            std::vector<double> ratios;
            for (double r0 : {1e-2, std::pow(10.0, -2.5), 1e-3}) {
                const double ratio =
                    entropy_per_edge_quadrature(dom, c, r0).value / small_r0_leading(dom.dim(), 2.0, r0).value;
                ratios.push_back(ratio);
                ok = ok && std::abs(ratio - 1.0) < prev;
                prev = std::abs(ratio - 1.0);
            }
            ok = ok && ratios.back() >= 0.98 && ratios.back() <= 1.02;
            d += to_string(dom) + detail::fmt(" %.5f %.5f %.5f; ", ratios[0], ratios[1], ratios[2]);
        }
        const auto c = Connection::rayleigh(2);
        const double q = entropy_per_edge_quadrature(Domain::interval(), c, 0.05).value;
        const double e1 = std::abs(q - small_r0_leading(1, 2.0, 0.05).value);
        const double e2 = std::abs(q - small_r0_second_order(Domain::interval(), 2.0, 0.05).value);
        ok = ok && e2 < e1;
        r.passed = ok;
        r.detail = d + detail::fmt("interval r0=0.05 error leading %.3g, second order %.3g", e1, e2);
    });
}

/// Large-r0 two-term expansion with analytic moments.
inline CriterionResult large_range_asymptote(const Options& = {}) {
    return detail::timed(3, "large-r0 expansion error scaling", [&](CriterionResult& r) {
        const DomainMoments interval{1.0 / 6.0, -7.0 / 72.0, 2.0, Method::Quadrature, 0.0, 0.0};
        const DomainMoments torus{1.0 / 12.0, -std::numbers::ln2 / 12.0 - 1.0 / 36.0, 2.0, Method::Quadrature, 0.0,
                                  0.0};
        bool ok = true;
        std::string d;
        for (const auto& [dom, m] : {std::pair{Domain::interval(), interval}, std::pair{Domain::torus1d(), torus}}) {
            std::vector<double> stat;
            for (double r0 : {5.0, 10.0, 20.0, 50.0}) {
                const double q = entropy_per_edge_quadrature(dom, Connection::rayleigh(2), r0).value;
                stat.push_back(std::abs(q - large_r0(dom, 2.0, r0, m).value) * std::pow(r0, 4.0) / std::log(r0));
            }
            ok = ok && detail::spread(stat) < 3.0;
            d += to_string(dom) + detail::fmt(" %.4f %.4f %.4f %.4f (x%.2f); ", stat[0], stat[1], stat[2], stat[3],
                                              detail::spread(stat));
        }
        r.passed = ok;
        r.detail = d.substr(0, d.size() - 2);
    });
}

/// Compressibility gap: divergence at small r0, r0^-eta decay at large r0.
inline CriterionResult compressibility(const Options& = {}) {
    return detail::timed(4, "compressibility gap", [&](CriterionResult& r) {
        const auto dom = Domain::interval();
        const auto c = Connection::rayleigh(2);
        auto gap = [&](double r0) { return compressibility_difference(dom, c, r0); };
        const double g4 = gap(1e-4), g3 = gap(1e-3), g2 = gap(1e-2);
        const double inc = gap(5e-5) - g4;
        const double target = dom.dim() * std::numbers::ln2;
        std::vector<double> scaled;
        for (double r0 : {10.0, 20.0, 50.0, 100.0}) scaled.push_back(gap(r0) * r0 * r0);
        const bool order = g4 > g3 && g3 > g2;
        const bool step = std::abs(inc / target - 1.0) <= 0.1;
        const bool tail = detail::spread(scaled) <= 1.1;
        r.passed = order && step && tail;
        r.detail = detail::fmt("gap(1e-4, 1e-3, 1e-2) = %.4f %.4f %.4f; halving increment %.4f vs %.4f; "
                               "gap r0^2 on [10,100] %.5f..%.5f",
                               g4, g3, g2, inc, target, *std::min_element(scaled.begin(), scaled.end()),
                               *std::max_element(scaled.begin(), scaled.end()));
    });
}

enum class Region { Bulk, Edge, Corner };

inline const char* to_string(Region g) {
    switch (g) {
    case Region::Bulk: return "bulk";
    case Region::Edge: return "edge";
    case Region::Corner: return "corner";
    }
    return "?";
}

/// Region of the unit-square map cell holding the maximum.
inline Region argmax_region(const MassMap& map) {
    const auto [i, j] = map.argmax();
    const bool ex = i == 0 || i + 1 == map.nx, ey = j == 0 || j + 1 == map.ny;
    if (ex && ey) return Region::Corner;
    if (ex || ey) return Region::Edge;
    return Region::Bulk;
}

/// Square entropy-mass ratios and the bulk -> edge -> corner migration.
inline CriterionResult square_mass(const Options& = {}) {
    return detail::timed(5, "square entropy-mass ratios and argmax migration", [&](CriterionResult& r) {
        const auto sq = Domain::square();
        const auto c = Connection::rayleigh(2);
        const double r0 = 0.02;
        const double centre = entropy_mass(sq, c, r0, {0.5, 0.5, 0}).value;
        const double edge = entropy_mass(sq, c, r0, {0.5, 0.0, 0}).value;
        const double corner = entropy_mass(sq, c, r0, {0.0, 0.0, 0}).value;
        const bool ratios = std::abs(edge / centre / 0.5 - 1.0) <= 0.05 && std::abs(corner / centre / 0.25 - 1.0) <= 0.05;

        const double r_star = entropy_maximizing_range(sq, c);
        std::vector<Region> got;
        for (double rr : {0.05, r_star, 1.0}) got.push_back(argmax_region(mass_map(sq, c, rr, 32, 32)));
        const bool flips = got[0] == Region::Bulk && got[1] == Region::Edge && got[2] == Region::Corner;
        r.passed = ratios && flips;
        r.detail = detail::fmt("corner:edge:centre = %.4f : %.4f : 1; argmax at r0=0.05, %.4f, 1: ", corner / centre,
                               edge / centre, r_star) +
                   to_string(got[0]) + ", " + to_string(got[1]) + ", " + to_string(got[2]);
    });
}

/// Wedge corner expansion: residual order and proportionality to the angle.
inline CriterionResult wedge_corner(const Options& = {}) {
    return detail::timed(6, "wedge corner expansion", [&](CriterionResult& r) {
        const double pi = std::numbers::pi, theta = pi / 4, eta = 2.0, r0 = 0.05;
        const auto c = Connection::rayleigh(eta);
        const auto m = rho_moments(c, r0);
        const auto w = Domain::wedge(theta, 1.0);
        std::vector<double> rs{0.01, 0.02, 0.04}, res;
        for (double rr : rs) {
            const WedgePoint wp{rr, theta / 2, theta};
            res.push_back(std::abs(entropy_mass(w, c, r0, wp.cartesian()).value - wedge_mass_leading(wp, m)));
        }
        double mx = 0, my = 0, sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < rs.size(); ++i) {
            mx += std::log(rs[i]) / 3.0;
            my += std::log(res[i]) / 3.0;
        }
        for (std::size_t i = 0; i < rs.size(); ++i) {
            sxy += (std::log(rs[i]) - mx) * (std::log(res[i]) - my);
            sxx += (std::log(rs[i]) - mx) * (std::log(rs[i]) - mx);
        }
        const double slope = sxy / sxx;
        const double need = std::min(3.0, eta + 2.0) - 0.5;

        double worst = 0.0;
        for (double th : {pi / 6, pi / 4, pi / 2, 2.0, pi}) {
            const double h0 = entropy_mass(Domain::wedge(th, 1.0), c, r0, {0, 0, 0}).value;
            worst = std::max(worst, std::abs(h0 / (th * m.rho1) - 1.0));
        }
        r.passed = slope >= need && worst <= 1e-9;
        r.detail = detail::fmt("residual slope %.3f (need >= %.2f); corner mass / (theta rho_1) off by %.2e", slope,
                               need, worst);
    });
}

/// Cantor set: self-similarity, local-maxima slope, residue series, moment fixed point.
inline CriterionResult cantor(const Options& opt = {}) {
    return detail::timed(7, "Cantor set entropy", [&](CriterionResult& r) {
        std::string d;
        bool a_ok = true;
        for (double a : {3.0, 4.0, 6.0, 10.0}) {
            const auto chk = cdf_recursion_check({a, 64}, 1'000'000, opt.seed + static_cast<std::uint64_t>(a));
            a_ok = a_ok && chk.deviation <= 2.0 * chk.dkw;
            d += detail::fmt("a=%g dev %.2e; ", a, chk.deviation);
        }
        d += detail::fmt("band %.2e. ", 2.0 * dkw_epsilon(1'000'000, 0.99));

        const auto ray4 = Connection::rayleigh(4);
        bool b_ok = true;
        for (double a : {3.0, 4.0}) {
            const CantorSpec s{a, 64};
            CantorDistanceSample sample(s, 2'000'000, opt.seed + 100 + static_cast<std::uint64_t>(a));
            const auto fit = local_maxima_slope(sample, ray4, 1e-4, 0.1, 300);
            b_ok = b_ok && std::abs(fit.slope / s.hausdorff_d() - 1.0) <= 0.05;
            d += detail::fmt("slope a=%g %.4f vs %.4f; ", a, fit.slope, s.hausdorff_d());
        }

        const CantorSpec s3{3.0, 64};
        auto series = build_cantor_series(s3, ray4, 50);
        calibrate_series_sign(series, s3, ray4, 1e-2, {1'000'000, opt.seed + 200, kDefaultChunk});
        bool c_ok = true;
        for (double r0 : {1e-2, std::pow(10.0, -2.5), 1e-3}) {
            const auto mc = cantor_entropy_mc(s3, ray4, r0, {2'000'000, opt.seed + 300, kDefaultChunk});
            const double v = series.value(r0);
            c_ok = c_ok && std::abs(v - mc.value) <= std::max(3.0 * mc.std_error, 0.05 * mc.value);
            d += detail::fmt("r0=%.4g series %.6f mc %.6f; ", r0, v, mc.value);
        }

        const double c2 = cantor_moment_series(s3, -2.0).real();
        const bool d_ok = std::abs(c2 - 0.125) <= 1e-12;
        d += detail::fmt("C[F;2] = %.17g", c2);
        r.passed = a_ok && b_ok && c_ok && d_ok;
        r.detail = detail::fmt("(a) %s (b) %s (c) %s (d) %s: ", a_ok ? "ok" : "FAIL", b_ok ? "ok" : "FAIL",
                               c_ok ? "ok" : "FAIL", d_ok ? "ok" : "FAIL") +
                   d;
    });
}

/// Growth classes of the small-r0 entropy integral.
inline CriterionResult integrability(const Options& = {}) {
    return detail::timed(8, "integrability classifier", [&](CriterionResult& r) {
        struct Case {
            Connection c;
            int d;
            Growth want;
        };
        std::vector<Case> cases{{Connection::power_law(3), 1, Growth::ThetaR0PowD},
                                {Connection::power_law(3), 2, Growth::ThetaR0PowD},
                                {Connection::power_law(3), 3, Growth::SuperPolynomial}};
        for (int d = 1; d <= 3; ++d) {
            for (double eta : {1.0, 2.0, 4.0}) cases.push_back({Connection::rayleigh(eta), d, Growth::ThetaR0PowD});
            for (double a : {-2.0, 0.0, 1.0}) cases.push_back({Connection::fermi_dirac(a), d, Growth::ThetaR0PowD});
        }
        int bad = 0, disagree = 0;
        for (const auto& cs : cases) {
            const auto rep = integrability_class(cs.c, cs.d);
            if (rep.growth != cs.want) ++bad;
            if (!rep.agrees) ++disagree;
        }
        r.passed = bad == 0 && disagree == 0;
        r.detail = detail::fmt("%zu cases, %d misclassified, %d numeric disagreements", cases.size(), bad, disagree);
    });
}

/// Library-level determinism: Monte-Carlo results under 1, 4 and 8 workers.
inline CriterionResult thread_invariance(const Options& opt = {}) {
    return detail::timed(9, "thread-count invariance", [&](CriterionResult& r) {
        const unsigned saved = worker_count();
        std::vector<std::vector<double>> runs;
        for (unsigned t : {1u, 4u, 8u}) {
            set_worker_count(t);
            std::vector<double> v;
            v.push_back(entropy_per_edge_mc(Domain::square(), Connection::rayleigh(2), 0.1,
                                            {300'000, opt.seed, 4096})
                            .value);
            v.push_back(cantor_entropy_mc({3.0, 64}, Connection::rayleigh(4), 0.01, {300'000, opt.seed, 4096}).value);
            const auto map = mass_map(Domain::square(), Connection::rayleigh(2), 0.2, 8, 8,
                                      {Method::MonteCarlo, 5000, opt.seed});
            v.insert(v.end(), map.values.begin(), map.values.end());
            runs.push_back(std::move(v));
        }
        set_worker_count(saved);
        r.passed = runs[0] == runs[1] && runs[0] == runs[2];
        r.detail = r.passed ? "identical results for 1, 4 and 8 workers" : "results differ across worker counts";
    });
}

using CriterionFn = CriterionResult (*)(const Options&);

inline std::vector<CriterionFn> all_criteria() {
    return {cross_method, small_range_asymptote, large_range_asymptote, compressibility, square_mass,
            wedge_corner, cantor,  integrability,          thread_invariance};
}

inline std::string summary_line(const CriterionResult& r) {
    return detail::fmt("criterion %d %s: %s (%.1fs) | ", r.id, r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds) +
           r.detail;
}

} // namespace srgg::validation
