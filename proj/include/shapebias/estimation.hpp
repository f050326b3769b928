#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "shapebias/group_action.hpp"
#include "shapebias/manifold.hpp"

namespace shapebias {

enum class Initialization { FirstDatum, FrechetOfRaw };

struct EstimationConfig {
    int max_outer_iter = 100;
    double cost_tol = 1e-10;  // relative cost decrease that ends the alternation
    double frechet_tol = kFrechetTolerance;
    int frechet_max_iter = kFrechetMaxIterations;
    Initialization init = Initialization::FirstDatum;

    void validate() const;
};

struct EstimationResult {
    ManifoldPoint template_hat;
    std::vector<GroupElement> registrations;  // g_i with g_i . X_i registered to template_hat
    std::vector<double> cost_trace;           // cost after each outer iteration
    bool converged = false;
    int non_unique_registrations = 0;  // registrations flagged non-unique in the final pass

    double final_cost() const { return cost_trace.empty() ? 0.0 : cost_trace.back(); }
};

// Alternates registration of every datum to the current estimate and the Frechet mean of the
// registered data, starting from X_1 (or from `initial` when given). Stops when the relative
// cost decrease falls below cfg.cost_tol or after cfg.max_outer_iter passes.
EstimationResult estimate_template(std::span<const ManifoldPoint> data, const EstimationConfig& cfg = {},
                                   const std::optional<ManifoldPoint>& initial = std::nullopt);

// sum_i d(y, g_i . X_i)^2
double cost(const ManifoldPoint& y, std::span<const GroupElement> gs, std::span<const ManifoldPoint> data);

enum class PoseModel { Identity, Uniform };

struct GenerationOptions {
    PoseModel poses = PoseModel::Identity;
    // Pairs consecutive samples as (eps, -eps). Halves the variance of first-order effects.
    bool antithetic = false;
};

// Draws X_i = Exp(g_i . Y, eps_i) with eps_i a truncated tangent Gaussian. The i-th sample depends
// on (seed, i) only; sample blocks are generated in parallel.
std::vector<ManifoldPoint> generate_observations(const ManifoldPoint& templ, std::size_t n, const NoiseModel& noise,
                                                 std::uint64_t seed, const GenerationOptions& options = {});

// Noise coefficients of generate_observations, one row per sample. Rejection sampling is done on
// the standardized draw, so for a fixed seed these are sigma times a sigma-independent matrix.
Eigen::MatrixXd generate_noise_coefficients(int intrinsic_dim, std::size_t n, const NoiseModel& noise,
                                            std::uint64_t seed, bool antithetic = false);

}  // namespace shapebias
