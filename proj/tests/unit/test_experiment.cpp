#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "shapebias/experiment.hpp"
#include "shapebias/shape_density.hpp"

using namespace shapebias;
using doctest::Approx;

namespace {

struct Run {
    int status;
    std::string output;  // stdout followed by stderr
};

Run run_cli(const std::string& args)
{
    const std::string cmd = std::string(SHAPEBIAS_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    const int raw = pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::vector<std::string> data_lines(const std::string& text)
{
    std::vector<std::string> out;
    for (auto& l : lines(text)) {
        if (!l.empty() && l.front() != '#') out.push_back(l);
    }
    return out;
}

std::string note_value(const std::string& text, const std::string& key)
{
    for (const auto& l : lines(text)) {
        const std::string prefix = "# " + key + "=";
        if (l.rfind(prefix, 0) == 0) return l.substr(prefix.size());
    }
    return {};
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "shapebias_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_SUITE("experiment")
{
    TEST_CASE("sigma grid parsing")
    {
        const auto g = parse_sigma_grid("0.02:0.1:9");
        REQUIRE(g.size() == 9);
        CHECK(g.front() == 0.02);
        CHECK(g.back() == Approx(0.1));
        CHECK(g[4] == Approx(0.06));
        CHECK(parse_sigma_grid("0.5:0.5:1").size() == 1);
        CHECK_THROWS_AS(parse_sigma_grid("0.1:0.2"), ConfigError);
        CHECK_THROWS_AS(parse_sigma_grid("0.2:0.1:3"), ConfigError);
        CHECK_THROWS_AS(parse_sigma_grid("a:0.1:3"), ConfigError);
    }

    TEST_CASE("configuration keys")
    {
        const auto cfg = make_config({{"scenario", "sphere"}, {"template", "1.2"}, {"sigma", "0.1"}, {"seed", "7"},
                                      {"n", "500"}, {"method", "nested"}, {"deterministic", "true"}});
        CHECK(cfg.scenario == Scenario::Sphere);
        CHECK(cfg.template_values == std::vector<double>{1.2});
        CHECK(*cfg.sigma == 0.1);
        CHECK(*cfg.seed == 7u);
        CHECK(cfg.n_samples == 500u);
        CHECK(cfg.correction == Correction::Nested);
        CHECK(cfg.deterministic);
        CHECK_THROWS_AS(make_config({{"colour", "blue"}}), ConfigError);
        CHECK_THROWS_AS(make_config({{"sigma", "-1"}}), ConfigError);
        CHECK_THROWS_AS(make_config({{"n", "ten"}}), ConfigError);
        CHECK_THROWS_AS(make_config({{"scenario", "torus"}}), ConfigError);
    }

    TEST_CASE("config files")
    {
        const auto path = scratch("run.cfg");
        std::ofstream(path) << "# comment\n\nscenario = plane\nsigma=0.2\n";
        const auto values = read_config_file(path);
        CHECK(values.at("scenario") == "plane");
        CHECK(values.at("sigma") == "0.2");
        std::ofstream(path) << "scenario plane\n";
        CHECK_THROWS_AS(read_config_file(path), ConfigError);
        CHECK_THROWS_AS(read_config_file(scratch("missing.cfg")), ConfigError);
    }

    TEST_CASE("CSV writing")
    {
        CsvTable t{"bias-curve", "plane", {"sigma", "bias"}, {{"0.1", "0.005"}}, {"note=1"}};
        std::ostringstream det;
        write_csv(t, det, true);
        CHECK(det.str() == "# schema_version=1 command=bias-curve scenario=plane\n# note=1\nsigma,bias\n0.1,0.005\n");
        std::ostringstream stamped;
        write_csv(t, stamped, false);
        CHECK(stamped.str().find("# generated=") != std::string::npos);
        CHECK(format_number(0.1) == "0.1");
    }

    TEST_CASE("default triangle")
    {
        const auto t = default_triangle();
        CHECK(t.space() == Space::landmarks(3, 2));
        CHECK(t.landmark_matrix().colwise().sum().norm() < 1e-15);
        CHECK(smallest_edge(t) == Approx(std::hypot(0.5, 0.9)));
    }

    TEST_CASE("triangle pipeline without noise")
    {
        const auto res = triangle_pipeline(default_triangle(), 0.0, 50, 3, Correction::None);
        CHECK(res.uncorrected_distance < 1e-8);
    }

    TEST_CASE("CLI: simulate summary agrees with the asymptotic estimate")
    {
        const auto r = run_cli("simulate --scenario plane --template 1 --sigma 0.3 --n 100000 --seed 7 --deterministic");
        REQUIRE(r.status == 0);
        const auto rows = data_lines(r.output);
        REQUIRE(rows.size() == 100002);
        CHECK(rows.front() == "index,shape_coordinate");
        REQUIRE(rows.back().rfind("estimate,", 0) == 0);
        const double estimate = std::stod(rows.back().substr(9));
        const double se = std::stod(note_value(r.output, "standard_error"));
        CHECK(std::abs(estimate - asymptotic_estimate(ExampleSpace::PlaneR2, 1.0, 0.3)) < 3 * se);
    }

    TEST_CASE("CLI: bias curve file")
    {
        const auto out = scratch("curve.csv");
        std::filesystem::remove(out);
        const auto r =
            run_cli("bias-curve --scenario sphere --template 1 --sigma-grid 0.02:0.1:9 --out " + out.string());
        REQUIRE(r.status == 0);
        const auto rows = data_lines(slurp(out));
        REQUIRE(rows.size() == 10);
        CHECK(rows.front() == "sigma,estimate,bias");
    }

    TEST_CASE("CLI: iterative correction of triangles converges quickly")
    {
        const auto r =
            run_cli("correct --method iterative --scenario triangles --sigma 0.5 --n 100000 --seed 7 --deterministic");
        REQUIRE(r.status == 0);
        CHECK(note_value(r.output, "converged") == "1");
        CHECK(std::stoi(note_value(r.output, "iterations")) < 10);
        CHECK(data_lines(r.output).front().rfind("iteration,bias_norm,y0", 0) == 0);
    }

    TEST_CASE("CLI: deterministic output is byte identical")
    {
        const std::string args = "kmeans --template 1,2 --sigma-grid 0.5:1:2 --n 200 --repetitions 2 --seed 11 --deterministic";
        const auto a = run_cli(args);
        const auto b = run_cli(args);
        REQUIRE(a.status == 0);
        CHECK(a.output == b.output);
        CHECK(a.output.find("generated=") == std::string::npos);

        const auto c = run_cli("protein --scenario protein --template 10 --sigma-grid 0.3:1.7:2 --deterministic");
        REQUIRE(c.status == 0);
        CHECK(data_lines(c.output).front() == "sigma,rg2_bias,p_false_positive");
    }

    TEST_CASE("CLI: exit codes")
    {
        CHECK(run_cli("simulate --scenario plane --sigma 0.3 --n 10").status == 2);  // no seed
        CHECK(run_cli("simulate --scenario plane --sigma 0.3 --seed 1 --bogus 1").status == 2);
        CHECK(run_cli("frobnicate").status == 2);
        CHECK(run_cli("bias-curve --scenario plane --template -1 --sigma 0.1").status == 2);
        CHECK(run_cli("estimate --config /nonexistent.cfg").status == 2);

        // Truncation radius beyond pi: the sphere density cannot be formed.
        const auto r = run_cli("bias-curve --scenario sphere --template 1 --sigma 0.8");
        CHECK(r.status == 3);
        CHECK(r.output.find("quadrature") != std::string::npos);
    }

    TEST_CASE("CLI: config file with flag override")
    {
        const auto cfg = scratch("plane.cfg");
        std::ofstream(cfg) << "scenario=plane\ntemplate=1\nsigma=0.9\nsigma_grid=0.02:0.1:3\n";
        const auto r = run_cli("bias-curve --config " + cfg.string() + " --sigma-grid 0.02:0.1:5 --deterministic");
        REQUIRE(r.status == 0);
        CHECK(data_lines(r.output).size() == 6);
    }
}
