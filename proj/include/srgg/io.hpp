#pragma once

#include "srgg/errors.hpp"
#include "srgg/mass.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace srgg::io {

/// Shortest text that round-trips the double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Cell {
    std::string text;
    Cell(double v) : text(format_double(v)) {}
    Cell(std::string s) : text(std::move(s)) {}
    Cell(const char* s) : text(s) {}
};

/// Comma-separated rows with LF endings, after a `# ` comment line and a header.
class CsvWriter {
public:
    CsvWriter(std::ostream& os, const std::string& comment, std::vector<std::string> columns)
        : os_(os), width_(columns.size()) {
        if (!comment.empty()) os_ << "# " << comment << '\n';
        row_text(columns);
    }

    void row(std::initializer_list<Cell> cells) {
        std::vector<std::string> t;
        for (const auto& c : cells) t.push_back(c.text);
        row_text(t);
    }

private:
    void row_text(const std::vector<std::string>& cells) {
        if (cells.size() != width_) throw DomainError("CsvWriter: row width does not match header");
        for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
        os_ << '\n';
    }

    std::ostream& os_;
    std::size_t width_;
};

struct PgmRange {
    double min = 0.0, max = 0.0;
};

/// 16-bit binary PGM (P5, big-endian) of the map, top row = largest y.
/// Values inside the domain are scaled linearly from [min, max] to [0, 65535];
/// cells outside are 0.
inline PgmRange write_pgm16(std::ostream& os, const MassMap& map) {
    PgmRange rg{INFINITY, -INFINITY};
    for (std::size_t k = 0; k < map.values.size(); ++k)
        if (map.inside[k]) {
            rg.min = std::min(rg.min, map.values[k]);
            rg.max = std::max(rg.max, map.values[k]);
        }
    if (!(rg.max >= rg.min)) rg = {0.0, 0.0};
    os << "P5\n" << map.nx << ' ' << map.ny << "\n65535\n";
    const double span = rg.max - rg.min;
    std::vector<unsigned char> line(2 * map.nx);
    for (std::size_t k = 0; k < map.ny; ++k) {
        const std::size_t j = map.ny - 1 - k;
        for (std::size_t i = 0; i < map.nx; ++i) {
            std::uint16_t level = 0;
            if (map.inside[j * map.nx + i]) {
                const double t = span > 0.0 ? (map.at(i, j) - rg.min) / span : 1.0;
                level = static_cast<std::uint16_t>(std::lround(std::clamp(t, 0.0, 1.0) * 65535.0));
            }
            line[2 * i] = static_cast<unsigned char>(level >> 8);
            line[2 * i + 1] = static_cast<unsigned char>(level & 0xff);
        }
        os.write(reinterpret_cast<const char*>(line.data()), static_cast<std::streamsize>(line.size()));
    }
    return rg;
}

/// Reads back a P5 16-bit image written by write_pgm16: (nx, ny, levels in file order).
struct PgmImage {
    std::size_t nx = 0, ny = 0;
    std::vector<std::uint16_t> levels;
};

inline PgmImage read_pgm16(std::istream& is) {
    std::string magic;
    std::size_t maxval = 0;
    PgmImage img;
    is >> magic >> img.nx >> img.ny >> maxval;
    if (magic != "P5" || maxval != 65535) throw ParseError("read_pgm16: not a 16-bit P5 image");
    is.get();
    std::vector<unsigned char> raw(2 * img.nx * img.ny);
    is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!is) throw ParseError("read_pgm16: truncated image");
    img.levels.resize(img.nx * img.ny);
    for (std::size_t k = 0; k < img.levels.size(); ++k)
        img.levels[k] = static_cast<std::uint16_t>((raw[2 * k] << 8) | raw[2 * k + 1]);
    return img;
}

inline void write_range_sidecar(std::ostream& os, const PgmRange& rg) {
    os << "min=" << format_double(rg.min) << "\nmax=" << format_double(rg.max) << '\n';
}

/// x,y,value for every cell centre inside the domain.
inline void write_mass_csv(std::ostream& os, const MassMap& map, const std::string& comment) {
    CsvWriter w(os, comment, {"x", "y", "value"});
    for (std::size_t j = 0; j < map.ny; ++j)
        for (std::size_t i = 0; i < map.nx; ++i) {
            if (!map.inside[j * map.nx + i]) continue;
            const auto c = map.center(i, j);
            w.row({c[0], c[1], map.at(i, j)});
        }
}

/// Minimal gnuplot script plotting `ycols` against `xcol` from a CSV.
inline void write_gnuplot_recipe(std::ostream& os, const std::string& csv, const std::string& xcol,
                                 const std::vector<std::string>& ycols, bool logx, bool logy) {
    os << "set datafile separator ','\nset key autotitle columnhead\n";
    if (logx) os << "set logscale x\n";
    if (logy) os << "set logscale y\n";
    os << "set xlabel '" << xcol << "'\nplot ";
    for (std::size_t i = 0; i < ycols.size(); ++i)
        os << (i ? ", \\\n     " : "") << "'" << csv << "' using '" << xcol << "':'" << ycols[i] << "' with lines";
    os << '\n';
}

/// r0 grid "start:stop:count:log|lin", or a single positive value.
inline std::vector<double> parse_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::size_t b = 0;
    for (;;) {
        const auto e = spec.find(':', b);
        parts.push_back(spec.substr(b, e - b));
        if (e == std::string::npos) break;
        b = e + 1;
    }
    auto num = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw ParseError("grid: bad number '" + s + "' in '" + spec + "'");
        }
        if (used != s.size() || !std::isfinite(v)) throw ParseError("grid: bad number '" + s + "' in '" + spec + "'");
        return v;
    };
    if (parts.size() == 1) {
        const double v = num(parts[0]);
        if (!(v > 0.0)) throw ParseError("grid: values must be > 0");
        return {v};
    }
    if (parts.size() != 4) throw ParseError("grid: expected start:stop:count:log|lin, got '" + spec + "'");
    const double lo = num(parts[0]), hi = num(parts[1]);
    const double cnt = num(parts[2]);
    if (cnt < 1 || cnt != std::floor(cnt)) throw ParseError("grid: count must be a positive integer");
    if (!(lo > 0.0) || !(hi > 0.0)) throw ParseError("grid: values must be > 0");
    if (hi < lo) throw ParseError("grid: stop must be >= start");
    const bool log = parts[3] == "log";
    if (!log && parts[3] != "lin") throw ParseError("grid: spacing must be 'log' or 'lin'");
    const auto n = static_cast<std::size_t>(cnt);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        out[i] = log ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
    }
    out.back() = n == 1 ? lo : hi;
    return out;
}

/// Flat `key = value` file; `#` starts a comment.
inline std::vector<std::pair<std::string, std::string>> read_config(std::istream& is) {
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string{};
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("config line " + std::to_string(lineno) + ": empty key");
        std::replace(key.begin(), key.end(), '_', '-');
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

inline std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    return read_config(in);
}

} // namespace srgg::io
