// Command-line runner for the shape-bias experiments. Writes one CSV table per invocation.
//
//   shapebias simulate   --scenario plane --template 1 --sigma 0.3 --n 100000 --seed 7
//   shapebias bias-curve --scenario sphere --template 1 --sigma-grid 0.02:0.1:9 --out curve.csv
//   shapebias correct    --method iterative --scenario triangles --sigma 0.5 --n 100000 --seed 7
//
// Exit status: 0 success, 2 bad configuration, 3 numeric failure (the stage is named on stderr).

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shapebias/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Flags {
    std::string config_file;
    std::map<std::string, std::string> values;
    bool deterministic = false;
};

void add_common_flags(CLI::App* cmd, Flags& flags)
{
    cmd->add_option("--config", flags.config_file, "key=value file; flags given on the command line override it");
    const std::vector<std::pair<std::string, std::string>> options{
        {"scenario", "plane, sphere, triangles, kmeans, protein or singularity"},
        {"template", "template parameters: r, theta, comma-separated landmarks, cluster radii or Rg"},
        {"sigma", "noise standard deviation per tangent coordinate"},
        {"sigma-grid", "start:stop:count"},
        {"n", "number of samples"},
        {"seed", "master seed (required for random runs)"},
        {"method", "correction method: iterative or nested"},
        {"out", "output CSV path (default: standard output)"},
        {"dim", "dimension for the singularity scenario"},
        {"n-atoms", "number of atoms for the protein scenario"},
        {"chi-sq", "chi-square threshold for the false-positive probability"},
        {"atoms", "atom coordinate file for the protein scenario"},
        {"repetitions", "Monte Carlo repetitions per sigma (kmeans)"},
        {"max-iter", "bootstrap iteration limit"},
        {"eps", "bootstrap stopping threshold"},
        {"n-nested", "inner replications of the nested bootstrap"},
    };
    for (const auto& [name, help] : options) {
        std::string key = name;
        for (auto& c : key) {
            if (c == '-') c = '_';
        }
        cmd->add_option_function<std::string>(
            "--" + name, [&flags, key](const std::string& v) { flags.values[key] = v; }, help);
    }
    cmd->add_flag("--deterministic", flags.deterministic, "omit the timestamp comment from the CSV");
}

int run(const std::string& command, const Flags& flags)
{
    shapebias::ConfigMap values;
    if (!flags.config_file.empty()) values = shapebias::read_config_file(flags.config_file);
    for (const auto& [key, value] : flags.values) values[key] = value;
    if (flags.deterministic) values["deterministic"] = "true";

    const auto config = shapebias::make_config(values);
    const auto table = shapebias::run_command(command, config);
    if (config.output_path.empty()) {
        shapebias::write_csv(table, std::cout, config.deterministic);
        return 0;
    }
    std::ofstream out(config.output_path);
    if (!out) throw shapebias::ConfigError("cannot write " + config.output_path);
    shapebias::write_csv(table, out, config.deterministic);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Template shape estimation, asymptotic bias and bootstrap correction experiments"};
    app.require_subcommand(1);

    Flags flags;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"simulate", "simulate observations and report registered shape coordinates"},
        {"estimate", "estimate the template from simulated data"},
        {"bias-curve", "asymptotic bias against sigma from the induced density"},
        {"correct", "bootstrap bias correction trace"},
        {"kmeans", "K-means on shapes: separation criterion and accuracy against sigma"},
        {"protein", "radius-of-gyration bias and false-positive probability"},
        {"curvature", "empirical mean curvature of the template orbit"},
    };
    for (const auto& [name, help] : commands) add_common_flags(app.add_subcommand(name, help), flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, flags);
    } catch (const shapebias::ConfigError& e) {
        std::cerr << "shapebias " << command << ": configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const shapebias::StageError& e) {
        std::cerr << "shapebias " << command << ": numeric failure in stage '" << e.stage() << "': " << e.what() << '\n';
        return kExitNumeric;
    } catch (const shapebias::ShapeError& e) {
        std::cerr << "shapebias " << command << ": numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
}
