#include "shapebias/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "shapebias/group_action.hpp"
#include "shapebias/parallel.hpp"

namespace shapebias {

namespace {

struct Assignment {
    std::vector<int> labels;
    std::vector<double> distances;
};

Assignment assign(std::span<const ManifoldPoint> data, std::span<const ManifoldPoint> centroids)
{
    Assignment a{std::vector<int>(data.size()), std::vector<double>(data.size())};
    parallel_for(data.size(), [&](std::size_t i) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < centroids.size(); ++j) {
            const double d = orbit_distance(centroids[j], data[i]);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(j);
            }
        }
        a.labels[i] = best;
        a.distances[i] = best_d;
    });
    return a;
}

std::vector<std::vector<ManifoldPoint>> members_by_cluster(std::span<const ManifoldPoint> data,
                                                          std::span<const int> labels, int k)
{
    std::vector<std::vector<ManifoldPoint>> members(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < data.size(); ++i) members[static_cast<std::size_t>(labels[i])].push_back(data[i]);
    return members;
}

std::vector<ManifoldPoint> farthest_point_seeds(std::span<const ManifoldPoint> data, int k, std::uint64_t seed)
{
    RngStream rng(seed);
    const std::size_t n = data.size();
    std::vector<std::size_t> chosen{rng.index(n)};
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    while (chosen.size() < static_cast<std::size_t>(k)) {
        const ManifoldPoint& last = data[chosen.back()];
        parallel_for(n, [&](std::size_t i) { nearest[i] = std::min(nearest[i], orbit_distance(last, data[i])); });
        std::size_t best = n;
        double best_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
            if (nearest[i] > best_d) {
                best_d = nearest[i];
                best = i;
            }
        }
        chosen.push_back(best);
    }
    std::vector<ManifoldPoint> centroids;
    for (auto i : chosen) centroids.push_back(data[i]);
    return centroids;
}

double cluster_diameter(const std::vector<const ManifoldPoint*>& members)
{
    const std::size_t n = members.size();
    if (n == 0) return 0.0;
    const Space& space = members.front()->space();
    const bool scalar_quotient = space.kind() == SpaceKind::Euclidean ||
                                 (space.kind() == SpaceKind::Sphere && space.dim() == 2);
    if (scalar_quotient) {
        // The orbit distance is |z_i - z_j| in the shape coordinate, so the diameter is its range.
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto* x : members) {
            const double z = shape_coordinate(*x);
            lo = std::min(lo, z);
            hi = std::max(hi, z);
        }
        return hi - lo;
    }
    std::vector<double> row_max(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) row_max[i] = std::max(row_max[i], orbit_distance(*members[i], *members[j]));
    });
    return *std::max_element(row_max.begin(), row_max.end());
}

double min_centroid_gap(const ClusterResult& result)
{
    const auto& c = result.centroids;
    if (c.size() < 2) throw DomainError("separation criterion needs at least 2 clusters");
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = i + 1; j < c.size(); ++j) gap = std::min(gap, orbit_distance(c[i], c[j]));
    }
    return gap;
}

}  // namespace

double kmeans_objective(std::span<const ManifoldPoint> data, std::span<const int> assignments,
                        std::span<const ManifoldPoint> centroids)
{
    if (assignments.size() != data.size()) throw ContractViolation("kmeans_objective: length mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double d = orbit_distance(centroids[static_cast<std::size_t>(assignments[i])], data[i]);
        total += d * d;
    }
    return total;
}

ClusterResult kmeans_shapes(std::span<const ManifoldPoint> data, int k, std::uint64_t seed, int max_iter,
                            const EstimationConfig& estimation)
{
    if (k < 1) throw DomainError("kmeans_shapes: k must be positive");
    if (data.size() < static_cast<std::size_t>(k)) throw DomainError("kmeans_shapes: fewer data than clusters");
    if (max_iter < 1) throw DomainError("kmeans_shapes: max_iter must be positive");

    ClusterResult result;
    result.centroids = farthest_point_seeds(data, k, seed);
    std::vector<int> previous;

    for (int iter = 0; iter < max_iter; ++iter) {
        Assignment a = assign(data, result.centroids);

        std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
        for (int label : a.labels) ++sizes[static_cast<std::size_t>(label)];
        for (int j = 0; j < k; ++j) {
            if (sizes[static_cast<std::size_t>(j)] != 0) continue;
            // Move the worst-fit point of a cluster that can spare it.
            std::size_t worst = data.size();
            for (std::size_t i = 0; i < data.size(); ++i) {
                if (sizes[static_cast<std::size_t>(a.labels[i])] < 2) continue;
                if (worst == data.size() || a.distances[i] > a.distances[worst]) worst = i;
            }
            --sizes[static_cast<std::size_t>(a.labels[worst])];
            ++sizes[static_cast<std::size_t>(j)];
            a.labels[worst] = j;
            a.distances[worst] = 0.0;
            result.centroids[static_cast<std::size_t>(j)] = data[worst];
            result.reseed_events.push_back({iter, j, worst});
        }

        double j_value = 0.0;
        for (double d : a.distances) j_value += d * d;
        result.j_trace.push_back(j_value);
        result.assignments = a.labels;
        result.iterations = iter + 1;
        if (a.labels == previous) {
            result.converged = true;
            break;
        }
        previous = std::move(a.labels);

        const auto members = members_by_cluster(data, previous, k);
        for (int j = 0; j < k; ++j) {
            const auto idx = static_cast<std::size_t>(j);
            result.centroids[idx] = estimate_template(members[idx], estimation, result.centroids[idx]).template_hat;
        }
    }
    result.criterion_d = k >= 2 ? separation_criterion(result, data) : std::numeric_limits<double>::quiet_NaN();
    return result;
}

ClusterResult cluster_from_labels(std::span<const ManifoldPoint> data, std::span<const int> labels, int k,
                                  const EstimationConfig& estimation)
{
    if (labels.size() != data.size()) throw ContractViolation("cluster_from_labels: length mismatch");
    for (int label : labels) {
        if (label < 0 || label >= k) throw DomainError("cluster_from_labels: label out of range");
    }
    ClusterResult result;
    result.assignments.assign(labels.begin(), labels.end());
    const auto members = members_by_cluster(data, labels, k);
    for (const auto& m : members) {
        if (m.empty()) throw DomainError("cluster_from_labels: empty cluster");
        result.centroids.push_back(estimate_template(m, estimation).template_hat);
    }
    result.j_trace.push_back(kmeans_objective(data, result.assignments, result.centroids));
    result.converged = true;
    result.criterion_d = k >= 2 ? separation_criterion(result, data) : std::numeric_limits<double>::quiet_NaN();
    return result;
}

double separation_criterion(const ClusterResult& result, std::span<const ManifoldPoint> data)
{
    const double gap = min_centroid_gap(result);
    if (result.assignments.size() != data.size()) throw ContractViolation("separation_criterion: length mismatch");
    std::vector<std::vector<const ManifoldPoint*>> members(result.centroids.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        members[static_cast<std::size_t>(result.assignments[i])].push_back(&data[i]);
    }
    double diameter = 0.0;
    for (const auto& m : members) diameter = std::max(diameter, cluster_diameter(m));
    if (diameter == 0.0) return std::numeric_limits<double>::infinity();
    return gap / diameter;
}

double separation_criterion_noise_scaled(const ClusterResult& result, double sigma)
{
    if (!(sigma > 0.0)) throw DomainError("separation_criterion_noise_scaled: sigma must be positive");
    return min_centroid_gap(result) / sigma;
}

double assignment_accuracy(std::span<const int> assignments, std::span<const int> truth, int k)
{
    if (assignments.size() != truth.size() || truth.empty()) throw ContractViolation("assignment_accuracy: length mismatch");
    if (k < 1 || k > 8) throw DomainError("assignment_accuracy: k must be in [1, 8]");
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t best = 0;
    do {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            if (perm[static_cast<std::size_t>(assignments[i])] == truth[i]) ++hits;
        }
        best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(truth.size());
}

}  // namespace shapebias
