#include "shapebias/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>

#include "shapebias/clustering.hpp"
#include "shapebias/group_action.hpp"
#include "shapebias/protein.hpp"
#include "shapebias/shape_density.hpp"

namespace shapebias {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid number for '" + key + "': '" + text + "'");
    }
}

long long parse_integer(const std::string& key, const std::string& text)
{
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer for '" + key + "': '" + text + "'");
    }
}

std::vector<double> parse_list(const std::string& key, const std::string& text)
{
    std::vector<double> values;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) values.push_back(parse_double(key, trim(item)));
    if (values.empty()) throw ConfigError("empty list for '" + key + "'");
    return values;
}

bool parse_bool(const std::string& key, const std::string& text)
{
    if (text == "1" || text == "true" || text == "yes" || text.empty()) return true;
    if (text == "0" || text == "false" || text == "no") return false;
    throw ConfigError("invalid boolean for '" + key + "': '" + text + "'");
}

// Runs one pipeline stage, attaching its name to numeric failures.
template <class F>
auto stage(const char* name, F&& f)
{
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const StageError&) {
        throw;
    } catch (const ShapeError& e) {
        throw StageError(name, e.what());
    }
}

std::uint64_t require_seed(const ExperimentConfig& cfg, const std::string& command)
{
    if (!cfg.seed) throw ConfigError(command + " draws random numbers and needs --seed");
    return *cfg.seed;
}

double require_sigma(const ExperimentConfig& cfg, const std::string& command)
{
    if (!cfg.sigma) throw ConfigError(command + " needs --sigma");
    return *cfg.sigma;
}

std::vector<double> sigmas_of(const ExperimentConfig& cfg, const std::string& command)
{
    if (!cfg.sigma_grid.empty()) return cfg.sigma_grid;
    if (cfg.sigma) return {*cfg.sigma};
    throw ConfigError(command + " needs --sigma or --sigma-grid");
}

double single_template(const ExperimentConfig& cfg, double fallback)
{
    if (cfg.template_values.empty()) return fallback;
    if (cfg.template_values.size() != 1) throw ConfigError("this scenario takes a single template value");
    return cfg.template_values.front();
}

ManifoldPoint triangle_template(const ExperimentConfig& cfg)
{
    const auto& v = cfg.template_values;
    if (v.empty()) return default_triangle();
    if (v.size() != 6 && v.size() != 9) throw ConfigError("triangle template needs 6 (2D) or 9 (3D) coordinates");
    const int m = static_cast<int>(v.size() / 3);
    return ManifoldPoint(Space::landmarks(3, m), Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

// Template point of the scenario. Validation errors are configuration errors.
ManifoldPoint scenario_template(const ExperimentConfig& cfg)
{
    try {
        switch (cfg.scenario) {
        case Scenario::Plane: {
            const double r = single_template(cfg, 1.0);
            if (!(r > 0.0)) throw ConfigError("plane template radius must be positive");
            return plane_point(r);
        }
        case Scenario::Sphere: {
            const double theta = single_template(cfg, 1.0);
            if (!(theta > 0.0 && theta < std::numbers::pi)) throw ConfigError("sphere template must lie in (0, pi)");
            return sphere_point(theta);
        }
        case Scenario::Triangles: return triangle_template(cfg);
        case Scenario::Singularity: return ManifoldPoint::euclidean(Eigen::VectorXd::Zero(cfg.dim));
        default: break;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const ShapeError& e) {
        throw ConfigError(std::string("invalid template: ") + e.what());
    }
    throw ConfigError(std::string("scenario '") + to_string(cfg.scenario) + "' is not supported by this command");
}

// Scalar summary of a point for the plane, sphere and singularity scenarios; orbit distance to the
// template for triangles.
double shape_value(const ExperimentConfig& cfg, const ManifoldPoint& templ, const ManifoldPoint& x)
{
    if (cfg.scenario == Scenario::Triangles) return orbit_distance(templ, x);
    return shape_coordinate(x);
}

double default_sigma(const ExperimentConfig& cfg, const ManifoldPoint& templ, const std::string& command)
{
    if (cfg.sigma) return *cfg.sigma;
    if (cfg.scenario == Scenario::Triangles) return 0.3 * smallest_edge(templ);
    return require_sigma(cfg, command);
}

std::vector<std::string> coordinate_columns(int count)
{
    std::vector<std::string> names;
    for (int i = 0; i < count; ++i) names.push_back("y" + std::to_string(i));
    return names;
}

void append_coords(std::vector<std::string>& row, const ManifoldPoint& p)
{
    for (Eigen::Index i = 0; i < p.coords().size(); ++i) row.push_back(format_number(p.coords()[i]));
}

CsvTable table_for(const std::string& command, const ExperimentConfig& cfg, std::vector<std::string> columns)
{
    CsvTable t;
    t.command = command;
    t.scenario = to_string(cfg.scenario);
    t.columns = std::move(columns);
    return t;
}

// ---------------------------------------------------------------------------------------------

CsvTable run_simulate(const ExperimentConfig& cfg)
{
    const std::string command = "simulate";
    const auto seed = require_seed(cfg, command);
    const ManifoldPoint templ = scenario_template(cfg);
    const double sigma = default_sigma(cfg, templ, command);

    const auto data = stage("simulation", [&] {
        return generate_observations(templ, cfg.n_samples, NoiseModel{sigma, 3.0}, seed);
    });
    const auto estimate = stage("estimation", [&] { return estimate_template(data); });

    CsvTable t = table_for(command, cfg, {"index", "shape_coordinate"});
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double z = shape_value(cfg, templ, data[i]);
        sum += z;
        sum_sq += z * z;
        t.rows.push_back({std::to_string(i), format_number(z)});
    }
    const double value = shape_value(cfg, templ, estimate.template_hat);
    t.rows.push_back({"estimate", format_number(value)});

    const double n = static_cast<double>(data.size());
    const double se = cfg.scenario == Scenario::Triangles
                          ? std::sqrt(estimate.final_cost() / (n * std::max(n - 1.0, 1.0)))
                          : std::sqrt(std::max(0.0, sum_sq / n - (sum / n) * (sum / n)) / std::max(n - 1.0, 1.0));
    t.notes.push_back("sigma=" + format_number(sigma));
    t.notes.push_back("standard_error=" + format_number(se));
    return t;
}

CsvTable run_estimate(const ExperimentConfig& cfg)
{
    const std::string command = "estimate";
    const auto seed = require_seed(cfg, command);
    const ManifoldPoint templ = scenario_template(cfg);
    const double sigma = default_sigma(cfg, templ, command);

    CsvTable t = table_for(command, cfg, {"quantity", "value"});
    if (cfg.scenario == Scenario::Triangles) {
        const auto result = stage("triangle pipeline", [&] {
            return triangle_pipeline(templ, sigma, cfg.n_samples, seed, Correction::None);
        });
        t.rows.push_back({"sigma", format_number(sigma)});
        t.rows.push_back({"orbit_distance_to_template", format_number(result.uncorrected_distance)});
        t.rows.push_back({"standard_error", format_number(result.standard_error)});
        t.rows.push_back({"outer_iterations", std::to_string(result.estimate.cost_trace.size())});
        t.rows.push_back({"final_cost", format_number(result.estimate.final_cost())});
        t.rows.push_back({"converged", result.estimate.converged ? "1" : "0"});
        for (Eigen::Index i = 0; i < result.estimate.template_hat.coords().size(); ++i) {
            t.rows.push_back({"y" + std::to_string(i), format_number(result.estimate.template_hat.coords()[i])});
        }
        return t;
    }

    const auto data = stage("simulation", [&] {
        return generate_observations(templ, cfg.n_samples, NoiseModel{sigma, 3.0}, seed);
    });
    const auto result = stage("estimation", [&] { return estimate_template(data); });
    const double z0 = shape_coordinate(templ);
    const double z = shape_coordinate(result.template_hat);
    const double n = static_cast<double>(data.size());
    t.rows.push_back({"sigma", format_number(sigma)});
    t.rows.push_back({"template", format_number(z0)});
    t.rows.push_back({"estimate", format_number(z)});
    t.rows.push_back({"bias", format_number(z - z0)});
    t.rows.push_back({"standard_error", format_number(std::sqrt(result.final_cost() / (n * std::max(n - 1.0, 1.0))))});
    t.rows.push_back({"outer_iterations", std::to_string(result.cost_trace.size())});
    t.rows.push_back({"converged", result.converged ? "1" : "0"});
    return t;
}

CsvTable run_bias_curve(const ExperimentConfig& cfg)
{
    const std::string command = "bias-curve";
    const auto sigmas = sigmas_of(cfg, command);
    CsvTable t = table_for(command, cfg, {"sigma", "estimate", "bias"});

    if (cfg.scenario == Scenario::Singularity) {
        for (double s : sigmas) {
            const double b = stage("singularity bias", [&] { return singularity_bias(cfg.dim, s); });
            t.rows.push_back({format_number(s), format_number(b), format_number(b)});
        }
        return t;
    }
    if (cfg.scenario != Scenario::Plane && cfg.scenario != Scenario::Sphere) {
        throw ConfigError("bias-curve supports the plane, sphere and singularity scenarios");
    }
    const double z0 = shape_coordinate(scenario_template(cfg));
    const ExampleSpace space = cfg.scenario == Scenario::Plane ? ExampleSpace::PlaneR2 : ExampleSpace::SphereS2;
    const BiasCurve curve = stage("quadrature", [&] { return bias_curve(space, z0, sigmas); });
    for (std::size_t i = 0; i < curve.sigmas.size(); ++i) {
        t.rows.push_back(
            {format_number(curve.sigmas[i]), format_number(curve.estimates[i]), format_number(curve.biases[i])});
    }
    return t;
}

CsvTable run_correct(const ExperimentConfig& cfg)
{
    const std::string command = "correct";
    const auto seed = require_seed(cfg, command);
    if (cfg.correction == Correction::None) throw ConfigError("correct needs --method iterative or --method nested");
    const ManifoldPoint templ = scenario_template(cfg);
    if (cfg.scenario == Scenario::Singularity) throw ConfigError("correct does not support the singularity scenario");
    const double sigma = default_sigma(cfg, templ, command);

    BootstrapConfig boot;
    boot.max_iter = cfg.max_iter;
    boot.eps = cfg.eps;
    boot.n_nested = cfg.n_nested;
    boot.n_bootstrap = cfg.n_samples;

    auto columns = std::vector<std::string>{"iteration", "bias_norm"};
    const auto coords = coordinate_columns(static_cast<int>(templ.coords().size()));
    columns.insert(columns.end(), coords.begin(), coords.end());
    CsvTable t = table_for(command, cfg, columns);

    // The plane and sphere go through the same simulate-estimate-correct pipeline as triangles.
    const auto result = stage("correction", [&] {
        return triangle_pipeline(templ, sigma, cfg.n_samples, seed, cfg.correction, boot);
    });

    if (result.trace) {
        const auto& trace = *result.trace;
        for (std::size_t k = 0; k < trace.estimates.size(); ++k) {
            std::vector<std::string> row{std::to_string(k),
                                         k < trace.bias_vectors.size() ? format_number(trace.bias_vectors[k].norm()) : ""};
            append_coords(row, trace.estimates[k]);
            t.rows.push_back(std::move(row));
        }
        t.notes.push_back("converged=" + std::string(trace.converged ? "1" : "0"));
        t.notes.push_back("iterations=" + std::to_string(trace.iterations));
    } else {
        std::vector<std::string> first{"0", ""};
        append_coords(first, result.estimate.template_hat);
        t.rows.push_back(std::move(first));
        std::vector<std::string> second{"1", format_number(distance(result.estimate.template_hat, *result.corrected))};
        append_coords(second, *result.corrected);
        t.rows.push_back(std::move(second));
    }
    t.notes.push_back("sigma=" + format_number(sigma));
    t.notes.push_back("uncorrected_orbit_distance=" + format_number(result.uncorrected_distance));
    t.notes.push_back("corrected_orbit_distance=" + format_number(result.corrected_distance));
    t.notes.push_back("standard_error=" + format_number(result.standard_error));
    return t;
}

CsvTable run_kmeans(const ExperimentConfig& cfg)
{
    const std::string command = "kmeans";
    const auto seed = require_seed(cfg, command);
    if (cfg.scenario != Scenario::Kmeans && cfg.scenario != Scenario::Plane) {
        throw ConfigError("kmeans supports the kmeans (plane clusters) scenario");
    }
    const std::vector<double> radii = cfg.template_values.empty() ? std::vector<double>{1.0, 2.0} : cfg.template_values;
    if (radii.size() < 2 || radii.size() > 8) throw ConfigError("kmeans needs between 2 and 8 cluster radii");
    for (double r : radii) {
        if (!(r > 0.0)) throw ConfigError("cluster radii must be positive");
    }
    const auto sigmas = sigmas_of(cfg, command);
    const int k = static_cast<int>(radii.size());

    CsvTable t = table_for(command, cfg, {"sigma", "D", "accuracy"});
    for (std::size_t s = 0; s < sigmas.size(); ++s) {
        double d_sum = 0.0;
        double acc_sum = 0.0;
        for (int rep = 0; rep < cfg.repetitions; ++rep) {
            std::vector<ManifoldPoint> data;
            std::vector<int> truth;
            stage("simulation", [&] {
                for (int j = 0; j < k; ++j) {
                    const auto stream = derive_seed(seed, {s, static_cast<std::uint64_t>(rep), static_cast<std::uint64_t>(j)});
                    auto part = generate_observations(plane_point(radii[static_cast<std::size_t>(j)]), cfg.n_samples,
                                                      NoiseModel{sigmas[s], 3.0}, stream, {PoseModel::Uniform, false});
                    data.insert(data.end(), part.begin(), part.end());
                    truth.insert(truth.end(), part.size(), j);
                }
                return 0;
            });
            const auto result = stage("clustering", [&] {
                return kmeans_shapes(data, k, derive_seed(seed, {s, static_cast<std::uint64_t>(rep), 1000}));
            });
            d_sum += result.criterion_d;
            acc_sum += assignment_accuracy(result.assignments, truth, k);
        }
        t.rows.push_back({format_number(sigmas[s]), format_number(d_sum / cfg.repetitions),
                          format_number(acc_sum / cfg.repetitions)});
    }
    return t;
}

CsvTable run_protein(const ExperimentConfig& cfg)
{
    const std::string command = "protein";
    if (cfg.scenario != Scenario::Protein) throw ConfigError("protein needs --scenario protein");
    const auto sigmas = sigmas_of(cfg, command);
    double rg = single_template(cfg, 10.0);
    int n_atoms = cfg.n_atoms;
    if (!cfg.atoms_file.empty()) {
        const AtomCloud cloud = stage("atom file", [&] { return read_atom_file(cfg.atoms_file); });
        rg = radius_of_gyration(cloud);
        n_atoms = cloud.size();
    }
    if (!(rg > 0.0)) throw ConfigError("radius of gyration must be positive");

    CsvTable t = table_for(command, cfg, {"sigma", "rg2_bias", "p_false_positive"});
    for (double s : sigmas) {
        const double bias = stage("protein metrics", [&] { return rg_squared_bias(s, n_atoms); });
        const auto fp = stage("protein metrics", [&] { return false_positive_probability(rg, s, cfg.chi_sq); });
        t.rows.push_back({format_number(s), format_number(bias), format_number(fp.p)});
    }
    t.notes.push_back("rg=" + format_number(rg));
    t.notes.push_back("n_atoms=" + std::to_string(n_atoms));
    t.notes.push_back("chi_sq=" + format_number(cfg.chi_sq));
    return t;
}

CsvTable run_curvature(const ExperimentConfig& cfg)
{
    const std::string command = "curvature";
    const auto seed = require_seed(cfg, command);
    if (cfg.scenario != Scenario::Plane && cfg.scenario != Scenario::Sphere) {
        throw ConfigError("curvature supports the plane and sphere scenarios");
    }
    const ManifoldPoint templ = scenario_template(cfg);
    const double z0 = shape_coordinate(templ);
    const ExampleSpace space = cfg.scenario == Scenario::Plane ? ExampleSpace::PlaneR2 : ExampleSpace::SphereS2;
    // Unit vector of increasing shape coordinate at the template.
    Eigen::VectorXd direction = templ.coords().normalized();
    if (cfg.scenario == Scenario::Sphere) direction = Eigen::Vector3d(std::cos(z0), 0.0, -std::sin(z0));

    CsvTable t = table_for(command, cfg, {"sigma", "empirical_h", "analytic_h"});
    const auto sigmas = sigmas_of(cfg, command);
    for (std::size_t s = 0; s < sigmas.size(); ++s) {
        const auto h = stage("curvature", [&] {
            return estimate_mean_curvature_empirical(templ, sigmas[s], cfg.n_samples, derive_seed(seed, {s}));
        });
        t.rows.push_back({format_number(sigmas[s]), format_number(h.components().dot(direction)),
                          format_number(mean_curvature_analytic(space, z0))});
    }
    return t;
}

}  // namespace

const char* to_string(Scenario s)
{
    switch (s) {
    case Scenario::Plane: return "plane";
    case Scenario::Sphere: return "sphere";
    case Scenario::Triangles: return "triangles";
    case Scenario::Kmeans: return "kmeans";
    case Scenario::Protein: return "protein";
    case Scenario::Singularity: return "singularity";
    }
    return "unknown";
}

const char* to_string(Correction c)
{
    switch (c) {
    case Correction::None: return "none";
    case Correction::Iterative: return "iterative";
    case Correction::Nested: return "nested";
    }
    return "unknown";
}

ConfigMap read_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    ConfigMap values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
        }
        values[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
    }
    return values;
}

std::vector<double> parse_sigma_grid(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ':')) parts.push_back(trim(item));
    if (parts.size() != 3) throw ConfigError("sigma grid must be start:stop:count, got '" + text + "'");
    const double start = parse_double("sigma_grid", parts[0]);
    const double stop = parse_double("sigma_grid", parts[1]);
    const long long count = parse_integer("sigma_grid", parts[2]);
    if (count < 1 || !(start > 0.0) || stop < start || (count == 1 && stop != start) || (count > 1 && stop == start)) {
        throw ConfigError("sigma grid needs 0 < start <= stop and a count >= 1 giving increasing values");
    }
    std::vector<double> grid;
    for (long long i = 0; i < count; ++i) {
        grid.push_back(count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return grid;
}

ExperimentConfig make_config(const ConfigMap& values)
{
    ExperimentConfig cfg;
    for (const auto& [key, value] : values) {
        if (key == "scenario") {
            if (value == "plane") cfg.scenario = Scenario::Plane;
            else if (value == "sphere") cfg.scenario = Scenario::Sphere;
            else if (value == "triangles") cfg.scenario = Scenario::Triangles;
            else if (value == "kmeans") cfg.scenario = Scenario::Kmeans;
            else if (value == "protein") cfg.scenario = Scenario::Protein;
            else if (value == "singularity") cfg.scenario = Scenario::Singularity;
            else throw ConfigError("unknown scenario '" + value + "'");
        } else if (key == "template") {
            cfg.template_values = parse_list(key, value);
        } else if (key == "sigma") {
            cfg.sigma = parse_double(key, value);
            if (*cfg.sigma < 0.0) throw ConfigError("sigma must be >= 0");
        } else if (key == "sigma_grid" || key == "sigma-grid") {
            cfg.sigma_grid = parse_sigma_grid(value);
        } else if (key == "n") {
            const auto n = parse_integer(key, value);
            if (n < 1) throw ConfigError("n must be positive");
            cfg.n_samples = static_cast<std::size_t>(n);
        } else if (key == "seed") {
            const auto seed = parse_integer(key, value);
            if (seed < 0) throw ConfigError("seed must be nonnegative");
            cfg.seed = static_cast<std::uint64_t>(seed);
        } else if (key == "method") {
            if (value == "iterative") cfg.correction = Correction::Iterative;
            else if (value == "nested") cfg.correction = Correction::Nested;
            else if (value == "none") cfg.correction = Correction::None;
            else throw ConfigError("unknown method '" + value + "'");
        } else if (key == "out") {
            cfg.output_path = value;
        } else if (key == "deterministic") {
            cfg.deterministic = parse_bool(key, value);
        } else if (key == "dim") {
            cfg.dim = static_cast<int>(parse_integer(key, value));
            if (cfg.dim < 2) throw ConfigError("dim must be at least 2");
        } else if (key == "n_atoms") {
            cfg.n_atoms = static_cast<int>(parse_integer(key, value));
            if (cfg.n_atoms < 2) throw ConfigError("n_atoms must be at least 2");
        } else if (key == "chi_sq") {
            cfg.chi_sq = parse_double(key, value);
            if (!(cfg.chi_sq > 0.0)) throw ConfigError("chi_sq must be positive");
        } else if (key == "atoms") {
            cfg.atoms_file = value;
        } else if (key == "repetitions") {
            cfg.repetitions = static_cast<int>(parse_integer(key, value));
            if (cfg.repetitions < 1) throw ConfigError("repetitions must be positive");
        } else if (key == "max_iter") {
            cfg.max_iter = static_cast<int>(parse_integer(key, value));
            if (cfg.max_iter < 1) throw ConfigError("max_iter must be positive");
        } else if (key == "eps") {
            cfg.eps = parse_double(key, value);
            if (!(cfg.eps > 0.0)) throw ConfigError("eps must be positive");
        } else if (key == "n_nested") {
            cfg.n_nested = static_cast<int>(parse_integer(key, value));
            if (cfg.n_nested < 1) throw ConfigError("n_nested must be positive");
        } else {
            throw ConfigError("unknown configuration key '" + key + "'");
        }
    }
    return cfg;
}

std::string format_number(double value)
{
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.12g", value);
    return buffer;
}

void write_csv(const CsvTable& table, std::ostream& out, bool deterministic)
{
    out << "# schema_version=" << kCsvSchemaVersion << " command=" << table.command << " scenario=" << table.scenario
        << '\n';
    if (!deterministic) {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        out << "# generated=" << stamp << '\n';
    }
    for (const auto& note : table.notes) out << "# " << note << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

CsvTable run_command(const std::string& command, const ExperimentConfig& config)
{
    if (command == "simulate") return run_simulate(config);
    if (command == "estimate") return run_estimate(config);
    if (command == "bias-curve") return run_bias_curve(config);
    if (command == "correct") return run_correct(config);
    if (command == "kmeans") return run_kmeans(config);
    if (command == "protein") return run_protein(config);
    if (command == "curvature") return run_curvature(config);
    throw ConfigError("unknown command '" + command + "'");
}

ManifoldPoint default_triangle()
{
    Eigen::MatrixXd x(3, 2);
    x << 0.0, 0.0, 1.2, 0.0, 0.5, 0.9;
    x.rowwise() -= x.colwise().mean();
    return ManifoldPoint::landmarks(x);
}

double smallest_edge(const ManifoldPoint& triangle)
{
    if (triangle.space().kind() != SpaceKind::Landmarks || triangle.space().landmark_count() != 3) {
        throw ContractViolation("smallest_edge: expects a 3-landmark configuration");
    }
    const Eigen::MatrixXd x = triangle.landmark_matrix();
    return std::min({(x.row(0) - x.row(1)).norm(), (x.row(1) - x.row(2)).norm(), (x.row(0) - x.row(2)).norm()});
}

TrianglePipelineResult triangle_pipeline(const ManifoldPoint& templ, double sigma, std::size_t n, std::uint64_t seed,
                                         Correction correction, const BootstrapConfig& bootstrap)
{
    if (templ.space().kind() == SpaceKind::Landmarks && is_group_fixed(templ)) {
        throw DegenerateOrbitError("triangle_pipeline: degenerate template");
    }
    const auto data = generate_observations(templ, n, NoiseModel{sigma, bootstrap.truncation_multiplier},
                                            derive_seed(seed, {0}));
    TrianglePipelineResult result{estimate_template(data, bootstrap.estimation), 0.0, 0.0, std::nullopt, std::nullopt,
                                  0.0};
    const double nd = static_cast<double>(n);
    result.uncorrected_distance = orbit_distance(templ, result.estimate.template_hat);
    result.standard_error = std::sqrt(result.estimate.final_cost() / (nd * std::max(nd - 1.0, 1.0)));
    result.corrected_distance = result.uncorrected_distance;
    if (correction == Correction::None) return result;

    BootstrapConfig cfg = bootstrap;
    cfg.sigma = sigma;
    if (cfg.n_bootstrap == 0) cfg.n_bootstrap = n;
    cfg.master_seed = derive_seed(seed, {1});
    if (correction == Correction::Iterative) {
        auto corrected = iterative_bootstrap(result.estimate.template_hat, cfg);
        result.corrected = std::move(corrected.corrected);
        result.trace = std::move(corrected.trace);
    } else {
        result.corrected = nested_bootstrap(data, cfg).corrected;
    }
    result.corrected_distance = orbit_distance(templ, *result.corrected);
    return result;
}

}  // namespace shapebias
