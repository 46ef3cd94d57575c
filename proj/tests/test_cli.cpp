// test_cli.cpp — configuration handling in-process, commands through the built binary

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nhbath/cli.hpp"

using namespace nhbath;
using nhbath::cli::json;

namespace fs = std::filesystem;

namespace {

bool throws_code(ErrorCode code, auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == code;
    }
    return false;
}

struct Invocation {
    int exit_code{-1};
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("nhbath_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

Invocation run(const std::string& args) {
    static int counter = 0;
    const std::string tag = std::to_string(counter++);
    const fs::path out = scratch("out" + tag), err = scratch("err" + tag);
    const std::string cmd = std::string(NHBATH_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Invocation r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

json run_json(const std::string& args) {
    const Invocation r = run(args + " --format json");
    EXPECT_EQ(r.exit_code, 0) << r.err;
    return json::parse(r.out);
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Data rows of a CSV (preamble skipped), header first.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    for (const std::string& line : lines(text))
        if (!line.empty() && line[0] != '#') rows.push_back(split(line));
    return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    ADD_FAILURE() << "missing column " << name;
    return 0;
}

} // namespace

TEST(Config, ParsesKeyValueText) {
    const cli::KeyValues kv = cli::parse_config_text("# comment\n\n g0 = 0.8 \ngamma=0.2 # trailing\nroute = lattice\n");
    EXPECT_EQ(kv.at("g0"), "0.8");
    EXPECT_EQ(kv.at("gamma"), "0.2");
    EXPECT_EQ(kv.at("route"), "lattice");
    EXPECT_EQ(kv.size(), 3u);
}

TEST(Config, RejectsMalformedText) {
    EXPECT_TRUE(throws_code(ErrorCode::InvalidParams, [] { (void)cli::parse_config_text("g0 0.8\n"); }));
    EXPECT_TRUE(throws_code(ErrorCode::InvalidParams, [] { (void)cli::parse_config_text("coupling = 1\n"); }));
    EXPECT_TRUE(throws_code(ErrorCode::InvalidParams, [] { (void)cli::read_config_file("/nonexistent/nhbath.cfg"); }));
}

TEST(Config, FlagsOverrideFile) {
    const cli::KeyValues file{{"g0", "0.8"}, {"gamma", "0.2"}, {"tmax", "10"}};
    const cli::KeyValues flags{{"gamma", "1.5"}};
    const cli::RunConfig c = cli::make_config("poles", cli::merge(file, flags));
    EXPECT_EQ(*c.g0, 0.8);
    EXPECT_EQ(c.gamma, 1.5);
    EXPECT_EQ(c.tmax, 10.0);
    EXPECT_EQ(c.J, 1.0);
}

TEST(Config, ValidationBeforeComputation) {
    auto make = [](const std::string& cmd, cli::KeyValues kv) { return [=] { (void)cli::make_config(cmd, kv); }; };
    EXPECT_TRUE(throws_code(ErrorCode::InvalidParams, make("poles", {})));
    EXPECT_TRUE(throws_code(ErrorCode::InvalidParams, make("poles", {{"g0", "0"}})));
    EXPECT_TRUE(throws_code(ErrorCode::InvalidParams, make("poles", {{"g0", "nan"}})));
    EXPECT_TRUE(throws_code(ErrorCode::InvalidParams, make("poles", {{"g0", "1x"}})));
    EXPECT_TRUE(throws_code(ErrorCode::InvalidParams, make("poles", {{"g0", "1"}, {"gamma", "-1"}})));
    EXPECT_TRUE(throws_code(ErrorCode::InvalidParams, make("poles", {{"g0", "1"}, {"J", "0"}})));
    EXPECT_TRUE(throws_code(ErrorCode::InvalidParams, make("decay", {{"g0", "1"}, {"route", "fast"}})));
    EXPECT_TRUE(throws_code(ErrorCode::InvalidParams, make("decay", {{"g0", "1"}, {"nmodes", "32"}})));
    EXPECT_TRUE(throws_code(ErrorCode::InvalidParams, make("decay", {{"g0", "1"}, {"tmax", "0.001"}})));
    EXPECT_TRUE(throws_code(ErrorCode::InvalidParams, make("decay", {{"g0", "1"}, {"format", "xml"}})));
    EXPECT_TRUE(throws_code(ErrorCode::TimeTooSmall, make("decay", {{"g0", "1"}, {"tmin", "0"}})));
    EXPECT_NO_THROW(make("decay", {{"g0", "1"}, {"tmin", "0"}, {"route", "lattice"}})());
    EXPECT_TRUE(throws_code(ErrorCode::DetunedCriticality, make("optimal", {{"g0", "1"}, {"detuning", "0.1"}})));
    EXPECT_TRUE(throws_code(ErrorCode::InvalidParams, make("fig", {{"figure", "12"}})));
    EXPECT_TRUE(throws_code(ErrorCode::InvalidParams, make("launch", {{"g0", "1"}})));
}

TEST(Config, JsonParamsRoundTrip) {
    const cli::RunConfig c = cli::make_config(
        "decay", {{"g0", "0.1"}, {"gamma", "0.30000000000000004"}, {"tmax", "12.5"}, {"route", "momentum"},
                  {"nmodes", "256"}, {"detuning", "-0.7"}, {"points", "17"}});
    const json params = json::parse(cli::params_json(c).dump());
    const cli::RunConfig back = cli::make_config("decay", cli::key_values_from_json(params));
    EXPECT_EQ(*back.g0, *c.g0);
    EXPECT_EQ(back.gamma, c.gamma);
    EXPECT_EQ(back.tmax, c.tmax);
    EXPECT_EQ(back.detuning, c.detuning);
    EXPECT_EQ(back.route, c.route);
    EXPECT_EQ(back.nmodes, c.nmodes);
    EXPECT_EQ(back.points, c.points);
    EXPECT_EQ(cli::params_json(back), cli::params_json(c));
}

TEST(Render, SeventeenSignificantDigits) {
    for (double v : {0.1, 1.0 / 3.0, -2.3094010767585029, 6.02214076e23, 5e-324}) {
        const std::string s = cli::format_double(v);
        EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
        EXPECT_NE(s.find('e'), std::string::npos);
    }
    EXPECT_EQ(cli::format_double(0.64), "6.4000000000000001e-01");
}

TEST(Render, CsvLayout) {
    cli::Report r;
    r.metadata = {"figure 3"};
    r.warnings = {"careful"};
    r.table.header = {"a", "b", "c"};
    r.table.rows = {{1.5, std::string("x,y"), cli::Cell{}}};
    const std::vector<std::string> out = lines(cli::render_csv(r));
    ASSERT_EQ(out.size(), 5u);
    EXPECT_EQ(out[0].rfind("# nhbath", 0), 0u);
    EXPECT_EQ(out[1], "# figure 3");
    EXPECT_EQ(out[2], "# warning: careful");
    EXPECT_EQ(out[3], "a,b,c");
    EXPECT_EQ(out[4], "1.5000000000000000e+00,\"x,y\",");
}

TEST(Render, ErrorObject) {
    const json v = cli::error_json(ErrorCode::InvalidParams, "bad");
    EXPECT_EQ(v["error"]["exit_code"], 2);
    EXPECT_EQ(cli::error_json(ErrorCode::NearDegenerate, "x")["error"]["exit_code"], 3);
    EXPECT_EQ(cli::error_json(ErrorCode::ToleranceNotMet, "x")["error"]["code"], "ToleranceNotMet");
}

TEST(Binary, PolesWeakCoupling) {
    const json j = run_json("poles --g0 0.8 --gamma 0.2");
    EXPECT_EQ(j["results"]["census"]["resonant"], 1);
    EXPECT_EQ(j["results"]["census"]["antiresonant"], 1);
    EXPECT_EQ(j["results"]["census"]["bound"], 0);
    EXPECT_NEAR(j["results"]["gamma_c1"].get<double>(), 0.64, 1e-12);
    EXPECT_TRUE(j["results"]["gamma_c2"].is_null());
    EXPECT_EQ(j["results"]["regime"], "weak");
    for (const auto& key : {"params", "results", "diagnostics", "warnings"}) EXPECT_TRUE(j.contains(key));
}

TEST(Binary, PolesStrongCoupling) {
    const json j = run_json("poles --g0 2 --gamma 2");
    ASSERT_EQ(j["results"]["poles"].size(), 2u);
    for (const auto& p : j["results"]["poles"]) {
        EXPECT_EQ(p["kind"], "bound");
        EXPECT_EQ(p["sheet"], "first");
    }
    EXPECT_EQ(j["results"]["ep"]["kind"], "physical");
}

TEST(Binary, PolesDegenerateQuadratic) {
    const json j = run_json("poles --g0 1 --gamma 1");
    ASSERT_EQ(j["results"]["poles"].size(), 1u);
    EXPECT_TRUE(j["results"]["poles"][0]["degenerate_quadratic"].get<bool>());
    ASSERT_FALSE(j["warnings"].empty());
    EXPECT_NE(j["warnings"][0].get<std::string>().find("DegenerateQuadratic"), std::string::npos);
}

TEST(Binary, DecayAllRoutesAgree) {
    const json j = run_json("decay --g0 0.6 --gamma 0.05 --tmax 50 --route all");
    const json& dev = j["diagnostics"]["max_deviation"];
    ASSERT_EQ(dev.size(), 3u);
    for (const auto& [pair, value] : dev.items()) EXPECT_LT(value.get<double>(), 1e-4) << pair;
    EXPECT_TRUE(j["results"].contains("spectral"));
    EXPECT_TRUE(j["results"].contains("lattice"));
    EXPECT_TRUE(j["results"].contains("momentum"));
    EXPECT_FALSE(j["results"].contains("lindblad"));
}

TEST(Binary, DecaySpectralColumns) {
    const Invocation r = run("decay --g0 2 --gamma 3.7 --route spectral --points 21");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("bound=2 resonant=0"), std::string::npos);
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 22u);
    const auto& h = rows[0];
    const std::vector<std::string> expected{"t", "re_ca", "im_ca", "ps", "route"};
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(h[i], expected[i]);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        ASSERT_EQ(rows[i].size(), h.size());
        EXPECT_EQ(rows[i][column(h, "route")], "spectral");
        EXPECT_FALSE(rows[i][column(h, "re_pole1")].empty());
        EXPECT_FALSE(rows[i][column(h, "re_pole2")].empty());
        // Total = poles + both Hankel terms.
        double re = 0.0;
        for (const char* c : {"re_pole1", "re_pole2", "re_hankel1", "re_hankel2"}) re += std::stod(rows[i][column(h, c)]);
        EXPECT_NEAR(re, std::stod(rows[i][column(h, "re_ca")]), 1e-14);
    }
}

TEST(Binary, LosslessLatticeNormColumn) {
    const Invocation r = run("decay --g0 0.6 --gamma 0.0 --route lattice");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto rows = csv_rows(r.out);
    const std::size_t norm = column(rows[0], "norm");
    ASSERT_GT(rows.size(), 100u);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_NEAR(std::stod(rows[i][norm]), 1.0, 1e-10);
}

TEST(Binary, OutputIsDeterministic) {
    const Invocation a = run("sweep --g0 1.2 --gamma-max 2 --points 41");
    const Invocation b = run("sweep --g0 1.2 --gamma-max 2 --points 41");
    ASSERT_EQ(a.exit_code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("coalescence gamma=1.32664991"), std::string::npos);
}

TEST(Binary, OutFlagWritesFile) {
    const fs::path path = scratch("optimal.json");
    const Invocation r = run("optimal --g0 0.8 --out " + path.string());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    const json j = json::parse(slurp(path));
    EXPECT_NEAR(j["results"]["gamma_star"].get<double>(), 0.64, 1e-6);
    EXPECT_NEAR(j["results"]["rate_star"].get<double>(), 0.64, 1e-6);
    EXPECT_TRUE(j["results"]["matches_expected"].get<bool>());
}

TEST(Binary, ConfigFileWithOverride) {
    const fs::path path = scratch("run.cfg");
    std::ofstream(path) << "# strong coupling\ng0 = 2\ngamma = 0.5  # overridden below\n";
    const json j = run_json("poles --config " + path.string() + " --gamma 2");
    EXPECT_EQ(j["params"]["g0"], 2.0);
    EXPECT_EQ(j["params"]["gamma"], 2.0);
    EXPECT_EQ(j["results"]["census"]["bound"], 2);
}

TEST(Binary, PhaseDiagramCells) {
    const Invocation r = run("phase-diagram --points 9 --g0-max 2.7 --gamma-max 4");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 82u);
    const auto& h = rows[0];
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const std::size_t total = std::stoul(rows[i][column(h, "n_bound")]) + std::stoul(rows[i][column(h, "n_resonant")]) +
                                  std::stoul(rows[i][column(h, "n_antiresonant")]);
        EXPECT_EQ(total, std::stoul(rows[i][column(h, "n_roots")]));
    }
}

TEST(Binary, FigureTrajectory) {
    const Invocation r = run("fig 3");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("# figure 3"), std::string::npos);
    EXPECT_NE(r.out.find("g0/J = 8.0000000000000004e-01"), std::string::npos);
    const auto rows = csv_rows(r.out);
    const std::size_t gamma = column(rows[0], "gamma");
    EXPECT_EQ(std::stod(rows[1][gamma]), 0.0);
    EXPECT_EQ(std::stod(rows.back()[gamma]), 3.0);
}

TEST(Binary, FigureSevenNormalizesLossValue) {
    const Invocation r = run("fig 7 --points 51");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("'1,1', read as 1.1"), std::string::npos);
    const auto rows = csv_rows(r.out);
    const std::size_t gamma = column(rows[0], "gamma");
    std::vector<double> seen;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double g = std::stod(rows[i][gamma]);
        if (seen.empty() || seen.back() != g) seen.push_back(g);
    }
    EXPECT_EQ(seen, (std::vector<double>{1.1, 1.35}));
}

TEST(Binary, FigureThirteenHasThreeCouplings) {
    const Invocation r = run("fig 13 --points 51");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto rows = csv_rows(r.out);
    const std::size_t curve = column(rows[0], "curve");
    std::vector<std::string> curves;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (curves.empty() || curves.back() != rows[i][curve]) curves.push_back(rows[i][curve]);
    EXPECT_EQ(curves, (std::vector<std::string>{"weak", "moderate", "strong"}));
    EXPECT_NE(column(rows[0], "re_k"), 0u);
}

TEST(Binary, ValidationExitCode) {
    for (const std::string args : {"poles", "poles --g0 -1", "poles --g0 abc", "fig 12", "decay --g0 1 --route x",
                                   "optimal --g0 1 --detuning 0.2", "decay --g0 1 --tmin 0"}) {
        const Invocation r = run(args);
        EXPECT_EQ(r.exit_code, 2) << args;
        const json err = json::parse(r.err);
        EXPECT_EQ(err["error"]["exit_code"], 2) << args;
        EXPECT_TRUE(r.out.empty()) << args;
    }
}

TEST(Binary, NumericalFailureExitCode) {
    // 64 momentum modes recur long before t = 150 without loss.
    const Invocation r = run("verify --g0 0.6 --gamma 0 --nmodes 64 --tmax 150 --points 61");
    EXPECT_EQ(r.exit_code, 3);
    EXPECT_EQ(json::parse(r.err)["error"]["code"], "ToleranceNotMet");
    EXPECT_FALSE(json::parse(r.out)["results"]["pass"].get<bool>());
}
