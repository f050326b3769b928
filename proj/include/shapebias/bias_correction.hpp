#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "shapebias/estimation.hpp"
#include "shapebias/manifold.hpp"

namespace shapebias {

enum class ReplicationMode {
    MonteCarlo,  // simulate n_bootstrap observations and run estimate_template
    Analytic,    // n -> infinity limit from the induced density (plane, sphere and R^m only)
};

struct BootstrapConfig {
    std::size_t n_bootstrap = 10000;  // samples per replication; 0 means "same as the data" in nested_bootstrap
    double sigma = 0.0;               // known noise level
    double truncation_multiplier = 3.0;
    int max_iter = 20;
    double eps = 1e-4;  // stop when |Log_{Y_{k+1}} Y_k| < eps
    int n_nested = 50;
    std::uint64_t master_seed = 0;
    PoseModel poses = PoseModel::Identity;
    ReplicationMode replication = ReplicationMode::MonteCarlo;
    // Reuse the same noise draws in every iteration so that the fixed-point map is deterministic.
    bool common_random_numbers = true;
    // Simulate noise in (eps, -eps) pairs; cancels the first-order Monte Carlo error of a replication.
    bool antithetic = true;
    EstimationConfig estimation;

    void validate() const;
    NoiseModel noise() const { return {sigma, truncation_multiplier}; }
};

struct BootstrapTrace {
    std::vector<ManifoldPoint> estimates;      // Y_0, Y_1, ...
    std::vector<TangentVector> bias_vectors;   // Bias_k at Y_k
    std::vector<double> step_norms;            // |Log_{Y_{k+1}} Y_k|
    bool converged = false;
    int iterations = 0;
};

struct IterativeResult {
    ManifoldPoint corrected;
    BootstrapTrace trace;
};

struct NestedResult {
    ManifoldPoint corrected;
    ManifoldPoint initial;       // Y_0 = estimate_template(data)
    TangentVector bias;          // Log_{Y_0} Y_0*
    TangentVector bias_of_bias;  // at Y_0
};

// Estimate obtained from data simulated at `templ`, registered onto templ.
ManifoldPoint bootstrap_replication(const ManifoldPoint& templ, const BootstrapConfig& cfg, std::uint64_t seed);

// Fixed-point iteration Y_{k+1} = Exp_{Y_0}(-Pi_{Y_k -> Y_0} Bias_k).
IterativeResult iterative_bootstrap(const ManifoldPoint& y_hat0, const BootstrapConfig& cfg);

// One bootstrap for the bias plus an inner bootstrap for the bias of the bias. The inner
// replications are combined by their Frechet mean.
NestedResult nested_bootstrap(std::span<const ManifoldPoint> data, const BootstrapConfig& cfg);

// -2 / sigma^2 * Log_y(replication): a Monte Carlo estimate of the mean curvature vector of the
// orbit through y. Uses antithetic noise pairs.
TangentVector estimate_mean_curvature_empirical(const ManifoldPoint& y, double sigma, std::size_t n,
                                                std::uint64_t seed, double truncation_multiplier = 3.0);

}  // namespace shapebias
