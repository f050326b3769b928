#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "shapebias/estimation.hpp"
#include "shapebias/manifold.hpp"

namespace shapebias {

struct ReseedEvent {
    int iteration;
    int cluster;
    std::size_t datum;  // index of the point that became the new centroid
};

struct ClusterResult {
    std::vector<int> assignments;
    std::vector<ManifoldPoint> centroids;
    double criterion_d = 0.0;
    std::vector<double> j_trace;  // J(c, mu) after each assignment step
    std::vector<ReseedEvent> reseed_events;
    bool converged = false;
    int iterations = 0;
};

// K-means on the shape space: assignment by orbit distance, centroid update by one template
// estimation per cluster started at the current centroid. Farthest-point seeding from `seed`.
ClusterResult kmeans_shapes(std::span<const ManifoldPoint> data, int k, std::uint64_t seed, int max_iter = 100,
                            const EstimationConfig& estimation = {});

// Builds a result from known labels (each cluster's centroid is its template estimate).
ClusterResult cluster_from_labels(std::span<const ManifoldPoint> data, std::span<const int> labels, int k,
                                  const EstimationConfig& estimation = {});

// J(c, mu) = sum_i d_Q(X_i, mu_{c_i})^2
double kmeans_objective(std::span<const ManifoldPoint> data, std::span<const int> assignments,
                        std::span<const ManifoldPoint> centroids);

// min over cluster pairs of d_Q(mu_i, mu_j), divided by the largest cluster diameter
// (max pairwise orbit distance within a cluster). A zero diameter gives +infinity.
double separation_criterion(const ClusterResult& result, std::span<const ManifoldPoint> data);

// min over cluster pairs of d_Q(mu_i, mu_j) / sigma: the diameter replaced by the noise scale.
double separation_criterion_noise_scaled(const ClusterResult& result, double sigma);

// Fraction of points whose label matches the truth, maximized over label permutations (k <= 8).
double assignment_accuracy(std::span<const int> assignments, std::span<const int> truth, int k);

}  // namespace shapebias
