// Command-line front end: entropy curves, asymptotes, mass maps, wedge and
// Cantor sweeps, compressibility, moments, and the acceptance checks.

#include "srgg/srgg.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace srgg;

namespace {

struct Common {
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out;
    std::string config;
    bool gnuplot = false;
};

// key=value pairs of the resolved configuration, for the CSV comment line.
struct Resolved {
    std::string command;
    std::vector<std::pair<std::string, std::string>> kv;

    void add(const std::string& k, const std::string& v) { kv.emplace_back(k, v); }
    void add(const std::string& k, double v) { kv.emplace_back(k, io::format_double(v)); }
    std::string line() const {
        std::string s = "srgg " + command;
        for (const auto& [k, v] : kv) s += " " + k + "=" + v;
        return s;
    }
};

class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file_) throw std::runtime_error("cannot open output file '" + path + "'");
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "master seed for every random stream")->required();
    sub->add_option("--threads", c.threads, "worker threads (0 = auto); never changes the output");
    sub->add_option("--config", c.config, "flat key = value file; command-line flags win");
    sub->add_option("--out", c.out, "output path (CSV) or prefix (mass); default stdout");
    sub->add_flag("--gnuplot", c.gnuplot, "also write a gnuplot recipe next to the output");
}

void maybe_recipe(const Common& c, const std::string& csv, const std::string& x, const std::vector<std::string>& ys,
                  bool logx, bool logy) {
    if (!c.gnuplot || c.out.empty() || c.out == "-") return;
    std::ofstream gp(csv + ".gp");
    io::write_gnuplot_recipe(gp, csv, x, ys, logx, logy);
}

Method parse_method(const std::string& m) {
    if (m == "quadrature") return Method::Quadrature;
    if (m == "mc") return Method::MonteCarlo;
    throw ParseError("method must be 'quadrature' or 'mc', got '" + m + "'");
}

std::pair<std::size_t, std::size_t> parse_size(const std::string& g) {
    const auto x = g.find('x');
    try {
        if (x == std::string::npos) throw std::invalid_argument(g);
        std::size_t a = 0, b = 0;
        const long nx = std::stol(g.substr(0, x), &a), ny = std::stol(g.substr(x + 1), &b);
        if (a != x || b != g.size() - x - 1 || nx < 1 || ny < 1) throw std::invalid_argument(g);
        return {static_cast<std::size_t>(nx), static_cast<std::size_t>(ny)};
    } catch (const std::invalid_argument&) {
        throw ParseError("grid size must look like 128x128, got '" + g + "'");
    } catch (const std::out_of_range&) {
        throw ParseError("grid size out of range: '" + g + "'");
    }
}

// Appends config-file entries as flags unless the same flag was given.
std::vector<std::string> merge_config(CLI::App& app, std::vector<std::string> args) {
    CLI::App* sub = nullptr;
    std::size_t sub_pos = 0;
    for (std::size_t i = 1; i < args.size() && !sub; ++i)
        for (auto* s : app.get_subcommands({}))
            if (s->get_name() == args[i]) {
                sub = s;
                sub_pos = i;
                break;
            }
    if (!sub) return args;
    std::string path;
    for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    auto given = [&](const std::string& key) {
        for (std::size_t i = sub_pos + 1; i < args.size(); ++i)
            if (args[i] == "--" + key || args[i].rfind("--" + key + "=", 0) == 0) return true;
        return false;
    };
    for (const auto& [key, value] : io::read_config_file(path)) {
        if (key == "config" || given(key)) continue;
        const auto* opt = sub->get_option_no_throw("--" + key);
        if (!opt) throw ParseError("config file: unknown key '" + key + "' for '" + sub->get_name() + "'");
        if (opt->get_expected_max() == 0) {
            if (value == "true" || value == "1" || value == "yes") args.push_back("--" + key);
            else if (value != "false" && value != "0" && value != "no")
                throw ParseError("config file: '" + key + "' expects true or false");
        } else {
            args.push_back("--" + key);
            args.push_back(value);
        }
    }
    return args;
}

int run_curve(const Common& c, const std::string& dom_s, const std::string& conn_s, const std::string& grid,
              const std::string& method, std::size_t n_pairs) {
    const auto dom = parse_domain(dom_s);
    const auto conn = parse_connection(conn_s);
    const auto r0s = io::parse_grid(grid);
    if (method != "quadrature" && method != "mc" && method != "both")
        throw ParseError("method must be quadrature, mc or both");
    Resolved cfg{"curve", {}};
    cfg.add("domain", to_string(dom));
    cfg.add("conn", to_string(conn));
    cfg.add("r0", grid);
    cfg.add("method", method);
    cfg.add("n-pairs", std::to_string(n_pairs));
    cfg.add("seed", std::to_string(c.seed));
    Output out(c.out);
    io::CsvWriter w(out.stream(), cfg.line(), {"r0", "quadrature", "mc_value", "mc_stderr", "domain", "connection"});
    for (std::size_t i = 0; i < r0s.size(); ++i) {
        const double r0 = r0s[i];
        double q = NAN, mc = NAN, se = NAN;
        if (method != "mc") q = entropy_per_edge_quadrature(dom, conn, r0).value;
        if (method != "quadrature") {
            const auto m = entropy_per_edge_mc(dom, conn, r0, {n_pairs, splitmix64(c.seed + i), kDefaultChunk});
            mc = m.value;
            se = m.std_error;
        }
        w.row({r0, q, mc, se, to_string(dom), to_string(conn)});
    }
    maybe_recipe(c, c.out, "r0", {"quadrature", "mc_value"}, true, true);
    return 0;
}

int run_asym(const Common& c, const std::string& dom_s, double eta, std::string grid, bool large,
             const std::string& moments, std::size_t n_pairs) {
    const auto dom = parse_domain(dom_s);
    if (grid.empty()) grid = large ? "2:100:40:log" : "0.001:0.5:40:log";
    const auto r0s = io::parse_grid(grid);
    const auto conn = Connection::rayleigh(eta);
    const Method mm = parse_method(moments);
    Resolved cfg{"asym", {}};
    cfg.add("domain", to_string(dom));
    cfg.add("eta", eta);
    cfg.add("r0", grid);
    cfg.add("large", large ? "true" : "false");
    cfg.add("moments", moments);
    cfg.add("n-pairs", std::to_string(n_pairs));
    cfg.add("seed", std::to_string(c.seed));
    const auto dm = domain_moments(dom, eta, mm, {n_pairs, c.seed, kDefaultChunk});
    const bool second = small_r_coeffs(dom).valid;
    Output out(c.out);
    io::CsvWriter w(out.stream(), cfg.line(), {"r0", "quadrature", "leading", "second_order", "large_r0"});
    for (double r0 : r0s) {
        const double q = entropy_per_edge_quadrature(dom, conn, r0).value;
        const double lead = small_r_coeffs(dom).s_leading / unit_sphere_area(dom.dim()) *
                            small_r0_leading(dom.dim(), eta, r0).value;
        const double so = second ? small_r0_second_order(dom, eta, r0).value : NAN;
        w.row({r0, q, lead, so, large_r0(dom, eta, r0, dm).value});
    }
    maybe_recipe(c, c.out, "r0", large ? std::vector<std::string>{"quadrature", "large_r0"}
                                       : std::vector<std::string>{"quadrature", "leading", "second_order"},
                 true, true);
    return 0;
}

int run_mass(const Common& c, const std::string& dom_s, const std::string& conn_s, double r0, const std::string& grid,
             const std::string& method, std::size_t budget, const std::string& kind_s) {
    const auto dom = parse_domain(dom_s);
    const auto conn = parse_connection(conn_s);
    const auto [nx, ny] = parse_size(grid);
    if (kind_s != "entropy" && kind_s != "connectivity") throw ParseError("kind must be entropy or connectivity");
    const auto kind = kind_s == "entropy" ? MassKind::Entropy : MassKind::Connectivity;
    Resolved cfg{"mass", {}};
    cfg.add("domain", to_string(dom));
    cfg.add("conn", to_string(conn));
    cfg.add("r0", r0);
    cfg.add("grid", std::to_string(nx) + "x" + std::to_string(ny));
    cfg.add("method", method);
    cfg.add("budget", std::to_string(budget));
    cfg.add("kind", kind_s);
    cfg.add("seed", std::to_string(c.seed));
    const auto map = mass_map(dom, conn, r0, nx, ny, {parse_method(method), budget, c.seed}, kind);
    const std::string prefix = c.out.empty() || c.out == "-" ? "mass" : c.out;
    {
        std::ofstream csv(prefix + ".csv", std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write '" + prefix + ".csv'");
        io::write_mass_csv(csv, map, cfg.line());
    }
    std::ofstream pgm(prefix + ".pgm", std::ios::binary);
    if (!pgm) throw std::runtime_error("cannot write '" + prefix + ".pgm'");
    const auto rg = io::write_pgm16(pgm, map);
    std::ofstream side(prefix + ".pgm.range", std::ios::binary);
    io::write_range_sidecar(side, rg);
    if (c.gnuplot) {
        std::ofstream gp(prefix + ".gp");
        gp << "set datafile separator ','\nset view map\nset size ratio -1\nplot '" << prefix
           << ".csv' using 1:2:3 with image\n";
    }
    const auto [i, j] = map.argmax();
    const auto x = map.center(i, j);
    std::fprintf(stderr, "argmax cell (%zu, %zu) at (%.6g, %.6g), value %.6g\n", i, j, x[0], x[1], map.at(i, j));
    return 0;
}

int run_wedge(const Common& c, double theta, double radius, const std::string& conn_s, double r0, double omega,
              const std::string& grid) {
    const auto conn = parse_connection(conn_s);
    const auto dom = Domain::wedge(theta, radius);
    if (std::isnan(omega)) omega = 0.5 * theta;
    if (!(omega >= 0.0 && omega <= theta)) throw DomainError("omega must lie in [0, theta]");
    const auto rs = io::parse_grid(grid);
    Resolved cfg{"wedge", {}};
    cfg.add("theta", theta);
    cfg.add("radius", radius);
    cfg.add("conn", to_string(conn));
    cfg.add("r0", r0);
    cfg.add("omega", omega);
    cfg.add("r", grid);
    cfg.add("seed", std::to_string(c.seed));
    const auto m = rho_moments(conn, r0);
    Output out(c.out);
    io::CsvWriter w(out.stream(), cfg.line(), {"r", "omega", "quadrature", "leading", "residual"});
    for (double r : rs) {
        const WedgePoint wp{r, omega, theta};
        const double q = entropy_mass(dom, conn, r0, wp.cartesian()).value;
        const double lead = wedge_mass_leading(wp, m);
        w.row({r, omega, q, lead, std::abs(q - lead)});
    }
    maybe_recipe(c, c.out, "r", {"residual"}, true, true);
    return 0;
}

int run_cantor(const Common& c, double alpha, int depth, const std::string& conn_s, const std::string& grid,
               std::size_t n_pairs, int m_max, bool calibrate) {
    const CantorSpec spec{alpha, depth};
    spec.validate();
    const auto conn = parse_connection(conn_s);
    const auto r0s = io::parse_grid(grid);
    Resolved cfg{"cantor", {}};
    cfg.add("alpha", alpha);
    cfg.add("depth", std::to_string(depth));
    cfg.add("conn", to_string(conn));
    cfg.add("r0", grid);
    cfg.add("n-pairs", std::to_string(n_pairs));
    cfg.add("m-max", std::to_string(m_max));
    cfg.add("calibrate", calibrate ? "true" : "false");
    cfg.add("seed", std::to_string(c.seed));
    auto series = build_cantor_series(spec, conn, m_max);
    if (calibrate) {
        const auto cal = calibrate_series_sign(series, spec, conn, 1e-2, {n_pairs, splitmix64(c.seed + 1), kDefaultChunk});
        std::fprintf(stderr, "calibration at r0=0.01: sign %+d, series %.6g, mc %.6g, mismatch %.2f%%\n", cal.sign,
                     cal.series_value, cal.mc_value, 100.0 * cal.relative_mismatch);
    }
    const CantorDistanceSample sample(spec, n_pairs, c.seed);
    Output out(c.out);
    io::CsvWriter w(out.stream(), cfg.line(), {"r0", "mc_value", "mc_stderr", "series_value", "series_err_bound"});
    for (double r0 : r0s) {
        const auto mc = sample.entropy(conn, r0);
        if (spec.depth < cantor_required_depth(spec, r0))
            std::fprintf(stderr, "warning: depth %d is shallow for r0=%g\n", spec.depth, r0);
        w.row({r0, mc.value, mc.std_error, series.value(r0), series.error_bound(r0)});
    }
    maybe_recipe(c, c.out, "r0", {"mc_value", "series_value"}, true, true);
    return 0;
}

int run_compress(const Common& c, const std::string& dom_s, const std::string& conn_s, const std::string& grid,
                 std::size_t n_pairs) {
    const auto dom = parse_domain(dom_s);
    const auto conn = parse_connection(conn_s);
    const auto r0s = io::parse_grid(grid);
    Resolved cfg{"compress", {}};
    cfg.add("domain", to_string(dom));
    cfg.add("conn", to_string(conn));
    cfg.add("r0", grid);
    cfg.add("n-pairs", std::to_string(n_pairs));
    cfg.add("seed", std::to_string(c.seed));
    const bool exact = has_closed_form_density(dom);
    Output out(c.out);
    io::CsvWriter w(out.stream(), cfg.line(), {"r0", "p_bar", "entropy_per_edge", "er_entropy_per_edge", "delta_c"});
    for (std::size_t i = 0; i < r0s.size(); ++i) {
        const double r0 = r0s[i];
        const McConfig mc{n_pairs, splitmix64(c.seed + i), kDefaultChunk};
        const auto pq = mean_connection(dom, conn, r0, exact ? Method::Quadrature : Method::MonteCarlo, mc);
        const double h = exact ? entropy_per_edge_quadrature(dom, conn, r0).value
                               : entropy_per_edge_mc(dom, conn, r0, mc).value;
        w.row({r0, pq.p, h, binary_entropy_pq(pq.p, pq.q), compressibility_difference(dom, conn, r0, mc)});
    }
    maybe_recipe(c, c.out, "r0", {"delta_c"}, true, true);
    return 0;
}

int run_moments(const Common& c, const std::string& dom_s, double eta, const std::string& method,
                std::size_t n_pairs, double alpha, int max_order) {
    Output out(c.out);
    if (!std::isnan(alpha)) {
        Resolved cfg{"moments", {}};
        cfg.add("alpha", alpha);
        cfg.add("max-order", std::to_string(max_order));
        cfg.add("seed", std::to_string(c.seed));
        if (max_order < 0) throw DomainError("max-order must be >= 0");
        CantorMoments m(alpha);
        io::CsvWriter w(out.stream(), cfg.line(), {"n", "signed_moment", "half_range_moment"});
        for (int n = 0; n <= max_order; ++n) w.row({std::to_string(n), m.signed_moment(n), 0.5 * m.abs_moment(n)});
        return 0;
    }
    const auto dom = parse_domain(dom_s);
    Resolved cfg{"moments", {}};
    cfg.add("domain", to_string(dom));
    cfg.add("eta", eta);
    cfg.add("method", method);
    cfg.add("n-pairs", std::to_string(n_pairs));
    cfg.add("seed", std::to_string(c.seed));
    const auto m = domain_moments(dom, eta, parse_method(method), {n_pairs, c.seed, kDefaultChunk});
    io::CsvWriter w(out.stream(), cfg.line(),
                    {"domain", "eta", "e_r_eta", "e_r_eta_log", "method", "std_error_r_eta", "std_error_r_eta_log"});
    w.row({to_string(dom), eta, m.e_r_eta, m.e_r_eta_log, method, m.std_error_r_eta, m.std_error_r_eta_log});
    return 0;
}

int run_check(const Common& c, const std::vector<int>& only) {
    Output out(c.out);
    bool all = true;
    const auto criteria = validation::all_criteria();
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const auto r = criteria[i]({c.seed});
        out.stream() << validation::summary_line(r) << std::endl;
        all = all && r.passed;
    }
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entropy of soft random geometric graphs: curves, asymptotes, mass maps and Cantor sweeps"};
    app.require_subcommand(1);
    Common common;

    struct {
        std::string domain = "interval", conn = "rayleigh:eta=2", r0 = "0.01:1:50:log", method = "both";
        std::size_t n_pairs = 1'000'000;
    } cv;
    struct {
        std::string domain = "interval", r0, moments = "quadrature";
        double eta = 2.0;
        bool large = false;
        std::size_t n_pairs = 1'000'000;
    } as;
    struct {
        std::string domain = "square", conn = "rayleigh:eta=2", grid = "128x128", method = "quadrature",
                    kind = "entropy";
        double r0 = 0.05;
        std::size_t budget = 20'000;
    } ms;
    struct {
        std::string conn = "rayleigh:eta=2", r = "0.005:0.2:30:log";
        double theta = std::numbers::pi / 4, radius = 1.0, r0 = 0.05, omega = NAN;
    } wg;
    struct {
        std::string conn = "rayleigh:eta=4", r0 = "0.0001:0.1:40:log";
        double alpha = 3.0;
        int depth = 64, m_max = 50;
        std::size_t n_pairs = 1'000'000;
        bool calibrate = true;
    } ct;
    struct {
        std::string domain = "interval", conn = "rayleigh:eta=2", r0 = "0.0001:100:49:log";
        std::size_t n_pairs = 1'000'000;
    } cp;
    struct {
        std::string domain = "interval", method = "quadrature";
        double eta = 2.0, alpha = NAN;
        int max_order = 20;
        std::size_t n_pairs = 1'000'000;
    } mo;
    std::vector<int> only;

    const char* domain_help = "interval, torus, square, disk, cube, ball, wedge:theta=..,radius=..";
    const char* conn_help = "rayleigh:eta=.., fermi:alpha=.., powerlaw:alpha=.., hard, const:q=..";

    auto* curve = app.add_subcommand("curve", "entropy per edge against r0");
    curve->add_option("--domain", cv.domain, domain_help)->capture_default_str();
    curve->add_option("--conn", cv.conn, conn_help)->capture_default_str();
    curve->add_option("--r0", cv.r0, "r0 grid start:stop:count:log|lin, or one value")->capture_default_str();
    curve->add_option("--method", cv.method, "quadrature, mc or both")->capture_default_str();
    curve->add_option("--n-pairs", cv.n_pairs, "Monte-Carlo pairs per r0")->capture_default_str();
    add_common(curve, common);

    auto* asym = app.add_subcommand("asym", "quadrature against the small- and large-r0 asymptotes (Rayleigh)");
    asym->add_option("--domain", as.domain, domain_help)->capture_default_str();
    asym->add_option("--eta", as.eta, "path-loss exponent")->capture_default_str();
    asym->add_option("--r0", as.r0, "r0 grid (default 0.001:0.5:40:log, or 2:100:40:log with --large)");
    asym->add_flag("--large", as.large, "sweep the large-r0 regime");
    asym->add_option("--moments", as.moments, "quadrature or mc for E[R^eta], E[R^eta log R]")
        ->capture_default_str();
    asym->add_option("--n-pairs", as.n_pairs, "pairs for Monte-Carlo moments")->capture_default_str();
    add_common(asym, common);

    auto* mass = app.add_subcommand("mass", "entropy or connectivity mass map (CSV + 16-bit PGM)");
    mass->add_option("--domain", ms.domain, domain_help)->capture_default_str();
    mass->add_option("--conn", ms.conn, conn_help)->capture_default_str();
    mass->add_option("--r0", ms.r0)->capture_default_str();
    mass->add_option("--grid", ms.grid, "cells, e.g. 128x128")->capture_default_str();
    mass->add_option("--method", ms.method, "quadrature or mc")->capture_default_str();
    mass->add_option("--budget", ms.budget, "Monte-Carlo sample points")->capture_default_str();
    mass->add_option("--kind", ms.kind, "entropy or connectivity")->capture_default_str();
    add_common(mass, common);

    auto* wedge = app.add_subcommand("wedge", "corner expansion of the entropy mass in a wedge");
    wedge->add_option("--theta", wg.theta, "wedge angle in radians")->capture_default_str();
    wedge->add_option("--radius", wg.radius)->capture_default_str();
    wedge->add_option("--conn", wg.conn, conn_help)->capture_default_str();
    wedge->add_option("--r0", wg.r0)->capture_default_str();
    wedge->add_option("--omega", wg.omega, "polar angle of the probe (default theta/2)");
    wedge->add_option("--r", wg.r, "distance grid")->capture_default_str();
    add_common(wedge, common);

    auto* cantor = app.add_subcommand("cantor", "Cantor-set entropy: Monte Carlo and the log-periodic series");
    cantor->add_option("--alpha", ct.alpha, "removal ratio, > 2")->capture_default_str();
    cantor->add_option("--depth", ct.depth, "digits per point, 20..64")->capture_default_str();
    cantor->add_option("--conn", ct.conn, conn_help)->capture_default_str();
    cantor->add_option("--r0", ct.r0)->capture_default_str();
    cantor->add_option("--n-pairs", ct.n_pairs)->capture_default_str();
    cantor->add_option("--m-max", ct.m_max, "Fourier modes in the series")->capture_default_str();
    cantor->add_option("--calibrate", ct.calibrate, "check the series against Monte Carlo at r0 = 0.01")
        ->capture_default_str();
    add_common(cantor, common);

    auto* compress = app.add_subcommand("compress", "compressibility gap against the matched Erdos-Renyi graph");
    compress->add_option("--domain", cp.domain, domain_help)->capture_default_str();
    compress->add_option("--conn", cp.conn, conn_help)->capture_default_str();
    compress->add_option("--r0", cp.r0)->capture_default_str();
    compress->add_option("--n-pairs", cp.n_pairs, "pairs for domains without a closed-form density")
        ->capture_default_str();
    add_common(compress, common);

    auto* moments = app.add_subcommand("moments", "distance moments of a domain, or Cantor displacement moments");
    moments->add_option("--domain", mo.domain, domain_help)->capture_default_str();
    moments->add_option("--eta", mo.eta)->capture_default_str();
    moments->add_option("--method", mo.method, "quadrature or mc")->capture_default_str();
    moments->add_option("--n-pairs", mo.n_pairs)->capture_default_str();
    moments->add_option("--alpha", mo.alpha, "Cantor ratio; switches to the Cantor moment table");
    moments->add_option("--max-order", mo.max_order, "highest Cantor moment order")->capture_default_str();
    add_common(moments, common);

    auto* check = app.add_subcommand("check", "run the acceptance criteria; exit 0 iff all pass");
    check->add_option("--only", only, "criterion numbers to run")->delimiter(',');
    add_common(check, common);

    std::vector<std::string> args(argv, argv + argc);
    try {
        args = merge_config(app, std::move(args));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::vector<char*> cargs;
    for (auto& a : args) cargs.push_back(a.data());
    try {
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    set_worker_count(common.threads);
    try {
        if (*curve) return run_curve(common, cv.domain, cv.conn, cv.r0, cv.method, cv.n_pairs);
        if (*asym) return run_asym(common, as.domain, as.eta, as.r0, as.large, as.moments, as.n_pairs);
        if (*mass) return run_mass(common, ms.domain, ms.conn, ms.r0, ms.grid, ms.method, ms.budget, ms.kind);
        if (*wedge) return run_wedge(common, wg.theta, wg.radius, wg.conn, wg.r0, wg.omega, wg.r);
        if (*cantor) return run_cantor(common, ct.alpha, ct.depth, ct.conn, ct.r0, ct.n_pairs, ct.m_max, ct.calibrate);
        if (*compress) return run_compress(common, cp.domain, cp.conn, cp.r0, cp.n_pairs);
        if (*moments) return run_moments(common, mo.domain, mo.eta, mo.method, mo.n_pairs, mo.alpha, mo.max_order);
        if (*check) return run_check(common, only);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.get_subcommands().front()->help();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
