#include "srgg/io.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

fs::path scratch() {
    const fs::path d = fs::temp_directory_path() / ("srgg_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
}

Run cli(const std::string& args) {
    const fs::path out = scratch() / "stdout.txt";
    const std::string cmd = std::string(SRGG_CLI_PATH) + " " + args + " > " + out.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::vector<std::vector<std::string>> rows(const std::string& csv) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        out.push_back(cells);
    }
    return out;
}

} // namespace

TEST(Cli, ExitCodes) {
    EXPECT_EQ(cli("--help").code, 0);
    EXPECT_EQ(cli("curve --help").code, 0);
    EXPECT_EQ(cli("").code, 2);
    EXPECT_EQ(cli("curve").code, 2);
    EXPECT_EQ(cli("curve --seed 1 --r0 0:1:3:log").code, 2);
    EXPECT_EQ(cli("curve --seed 1 --domain blob").code, 2);
    EXPECT_EQ(cli("curve --seed 1 --unknown-flag 3").code, 2);
    EXPECT_EQ(cli("cantor --seed 1 --alpha 1.5").code, 1);
    EXPECT_EQ(cli("wedge --seed 1 --omega 2").code, 1);
    EXPECT_EQ(cli("moments --seed 1 --domain wedge:theta=1 --method quadrature").code, 1);
    EXPECT_EQ(cli("moments --seed 1 --domain square").code, 0);
}

TEST(Cli, HeaderCarriesResolvedConfigWithoutThreads) {
    const auto r = cli("curve --seed 5 --threads 3 --method quadrature --r0 0.1:1:4:log");
    ASSERT_EQ(r.code, 0);
    const auto first = r.out.substr(0, r.out.find('\n'));
    EXPECT_EQ(first, "# srgg curve domain=interval conn=rayleigh:eta=2 r0=0.1:1:4:log method=quadrature "
                     "n-pairs=1000000 seed=5");
    EXPECT_EQ(rows(r.out).size(), 5u);
}

TEST(Cli, ConfigFileLosesToFlags) {
    const fs::path cfg = scratch() / "run.cfg";
    std::ofstream(cfg) << "# sweep\ndomain = square\nr0 = 0.5\nmethod = quadrature\nn_pairs = 10\n";
    const auto r = cli("curve --seed 2 --config " + cfg.string() + " --r0 0.25");
    ASSERT_EQ(r.code, 0);
    const auto t = rows(r.out);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(t[1][0], "0.25");
    EXPECT_EQ(t[1][4], "square");
    EXPECT_NE(r.out.find("n-pairs=10 "), std::string::npos);

    std::ofstream(cfg) << "large = true\n";
    const auto a = cli("asym --seed 2 --config " + cfg.string());
    ASSERT_EQ(a.code, 0);
    EXPECT_NE(a.out.find("large=true"), std::string::npos);

    std::ofstream(cfg) << "no_such_key = 1\n";
    EXPECT_EQ(cli("curve --seed 2 --config " + cfg.string()).code, 2);
}

TEST(Cli, CurveBothAgreesWithinThreeSigma) {
    const auto r = cli("curve --domain interval --conn rayleigh:eta=2 --r0 0.01:1:50:log --method both --seed 7");
    ASSERT_EQ(r.code, 0);
    const auto t = rows(r.out);
    ASSERT_EQ(t.size(), 51u);
    EXPECT_EQ(t[0], (std::vector<std::string>{"r0", "quadrature", "mc_value", "mc_stderr", "domain", "connection"}));
    for (std::size_t i = 1; i < t.size(); ++i)
        EXPECT_LE(std::abs(std::stod(t[i][1]) - std::stod(t[i][2])), 3.0 * std::stod(t[i][3])) << "row " << i;
}

TEST(Cli, SquareMassArgmaxIsBulk) {
    const auto prefix = scratch() / "mass";
    ASSERT_EQ(cli("mass --domain square --conn rayleigh:eta=2 --r0 0.05 --grid 128x128 --seed 7 --out " +
                  prefix.string())
                  .code,
              0);
    std::ifstream in(prefix.string() + ".pgm", std::ios::binary);
    const auto img = srgg::io::read_pgm16(in);
    ASSERT_EQ(img.nx, 128u);
    ASSERT_EQ(img.ny, 128u);
    std::size_t best = 0;
    for (std::size_t k = 0; k < img.levels.size(); ++k)
        if (img.levels[k] > img.levels[best]) best = k;
    const double x = (static_cast<double>(best % 128) + 0.5) / 128.0;
    const double y = (static_cast<double>(best / 128) + 0.5) / 128.0;
    const double edge = std::min({x, y, 1.0 - x, 1.0 - y});
    EXPECT_GT(edge, 0.1) << "argmax at (" << x << ", " << y << ")";
    EXPECT_TRUE(fs::exists(prefix.string() + ".csv"));
    std::ifstream range(prefix.string() + ".pgm.range");
    std::string line;
    std::getline(range, line);
    EXPECT_EQ(line.rfind("min=", 0), 0u);
}

TEST(Cli, CantorColumns) {
    const auto r = cli("cantor --seed 3 --n-pairs 100000 --r0 0.001:0.01:3:log");
    ASSERT_EQ(r.code, 0);
    const auto t = rows(r.out);
    ASSERT_EQ(t.size(), 4u);
    EXPECT_EQ(t[0],
              (std::vector<std::string>{"r0", "mc_value", "mc_stderr", "series_value", "series_err_bound"}));
}

TEST(Cli, RepeatRunsAreIdentical) {
    const std::string args = "curve --seed 4 --domain disk --method mc --r0 0.1:1:3:log --n-pairs 200000";
    const auto a = cli(args + " --threads 1"), b = cli(args + " --threads 3");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}
