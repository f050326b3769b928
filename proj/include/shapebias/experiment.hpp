#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "shapebias/bias_correction.hpp"
#include "shapebias/estimation.hpp"
#include "shapebias/manifold.hpp"

namespace shapebias {

enum class Scenario { Plane, Sphere, Triangles, Kmeans, Protein, Singularity };
enum class Correction { None, Iterative, Nested };

const char* to_string(Scenario s);
const char* to_string(Correction c);

// Invalid or incomplete experiment configuration. The CLI maps it to exit status 2.
class ConfigError : public ShapeError {
public:
    using ShapeError::ShapeError;
};

// Numeric failure inside a named pipeline stage. The CLI maps it to exit status 3.
class StageError : public ShapeError {
public:
    StageError(std::string stage, const std::string& what)
        : ShapeError(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

using ConfigMap = std::map<std::string, std::string>;

// Flat key=value file; blank lines and lines starting with '#' are skipped.
ConfigMap read_config_file(const std::filesystem::path& path);
// "start:stop:count", inclusive, evenly spaced.
std::vector<double> parse_sigma_grid(const std::string& text);

struct ExperimentConfig {
    Scenario scenario = Scenario::Plane;
    std::vector<double> template_values;  // r, theta, landmark coordinates, cluster radii or Rg
    std::optional<double> sigma;
    std::vector<double> sigma_grid;
    std::size_t n_samples = 10000;
    std::optional<std::uint64_t> seed;
    Correction correction = Correction::None;
    std::string output_path;  // empty: standard output
    bool deterministic = false;
    int dim = 2;            // singularity scenario: R^dim
    int n_atoms = 85;       // protein scenario
    double chi_sq = 8.0;    // protein scenario
    std::string atoms_file; // protein scenario: Rg from a coordinate file
    int repetitions = 1;    // kmeans scenario
    int max_iter = 20;
    double eps = 1e-4;
    int n_nested = 50;
};

// Known keys: scenario, template, sigma, sigma_grid, n, seed, method, out, deterministic, dim,
// n_atoms, chi_sq, atoms, repetitions, max_iter, eps, n_nested. Throws ConfigError.
ExperimentConfig make_config(const ConfigMap& values);

struct CsvTable {
    std::string command;
    std::string scenario;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> notes;  // extra comment lines
};

inline constexpr int kCsvSchemaVersion = 1;

// Header comments, column names, rows. The timestamp comment is omitted when deterministic.
void write_csv(const CsvTable& table, std::ostream& out, bool deterministic);
std::string format_number(double value);

// Commands: simulate, estimate, bias-curve, correct, kmeans, protein, curvature.
CsvTable run_command(const std::string& command, const ExperimentConfig& config);

// Centered reference triangle used when no template is given.
ManifoldPoint default_triangle();
double smallest_edge(const ManifoldPoint& triangle);

struct TrianglePipelineResult {
    EstimationResult estimate;
    double uncorrected_distance = 0.0;  // orbit distance of the estimate to the template
    double standard_error = 0.0;        // Monte Carlo standard error of that distance at zero bias
    std::optional<BootstrapTrace> trace;
    std::optional<ManifoldPoint> corrected;
    double corrected_distance = 0.0;
};

// Simulates n noisy copies of the template (identity poses), estimates the template and optionally
// corrects the estimate. Works on any space with a group action; landmarks use Kabsch registration.
// bootstrap.n_bootstrap == 0 means one bootstrap sample per datum.
TrianglePipelineResult triangle_pipeline(const ManifoldPoint& templ, double sigma, std::size_t n, std::uint64_t seed,
                                         Correction correction, const BootstrapConfig& bootstrap = {});

}  // namespace shapebias
