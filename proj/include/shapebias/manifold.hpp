#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shapebias/errors.hpp"
#include "shapebias/random.hpp"

namespace shapebias {

enum class SpaceKind { Euclidean, Sphere, Landmarks };

// One of the supported object spaces M.
//   Euclidean(m):    R^m
//   Sphere(m):       unit sphere S^m embedded in R^(m+1)
//   Landmarks(k, m): k landmarks in R^m, stored row-major as k*m reals
class Space {
public:
    static Space euclidean(int dim);
    static Space sphere(int dim);
    static Space landmarks(int count, int dim);

    SpaceKind kind() const { return kind_; }
    int dim() const { return dim_; }
    int landmark_count() const { return count_; }
    int ambient_dim() const;
    int intrinsic_dim() const;
    bool is_flat() const { return kind_ != SpaceKind::Sphere; }

    std::string describe() const;

    bool operator==(const Space&) const = default;

private:
    Space(SpaceKind kind, int dim, int count) : kind_(kind), dim_(dim), count_(count) {}

    SpaceKind kind_;
    int dim_;
    int count_;
};

class ManifoldPoint {
public:
    // Validates coordinate count, finiteness and (for spheres) unit norm within 1e-12.
    ManifoldPoint(Space space, Eigen::VectorXd coords);

    static ManifoldPoint euclidean(Eigen::VectorXd coords);
    // Normalizes the input onto the sphere; throws DomainError for a zero vector.
    static ManifoldPoint on_sphere(const Eigen::VectorXd& direction);
    // One landmark per row.
    static ManifoldPoint landmarks(const Eigen::MatrixXd& configuration);

    const Space& space() const { return space_; }
    const Eigen::VectorXd& coords() const { return coords_; }
    Eigen::MatrixXd landmark_matrix() const;

private:
    Space space_;
    Eigen::VectorXd coords_;
};

class TangentVector {
public:
    // Validates dimensions, finiteness and (for spheres) orthogonality to the base within 1e-10.
    TangentVector(ManifoldPoint base, Eigen::VectorXd components);

    static TangentVector zero(const ManifoldPoint& base);

    const ManifoldPoint& base() const { return base_; }
    const Eigen::VectorXd& components() const { return components_; }
    double norm() const { return components_.norm(); }

    TangentVector scaled(double factor) const;
    TangentVector operator-() const { return scaled(-1.0); }
    TangentVector operator+(const TangentVector& other) const;
    TangentVector operator-(const TangentVector& other) const;

private:
    ManifoldPoint base_;
    Eigen::VectorXd components_;
};

// Isotropic tangent Gaussian with per-coordinate standard deviation sigma, truncated at
// truncation_multiplier * sigma * sqrt(intrinsic dimension). An infinite multiplier
// disables truncation. sigma == 0 is accepted and means "no noise".
struct NoiseModel {
    double sigma = 0.0;
    double truncation_multiplier = 3.0;

    void validate() const;
    double truncation_radius(int intrinsic_dim) const;
};

// Running-example helpers: the plane point at radius r and polar angle, and the S^2 point at
// colatitude theta and longitude phi (theta = 0 is the pole (0, 0, 1)).
ManifoldPoint plane_point(double r, double angle = 0.0);
ManifoldPoint sphere_point(double theta, double phi = 0.0);
// Shape coordinate of the running examples: radius for Euclidean points, colatitude for S^2.
double shape_coordinate(const ManifoldPoint& p);

bool same_point(const ManifoldPoint& a, const ManifoldPoint& b, double tol = 1e-12);

ManifoldPoint exp_map(const ManifoldPoint& p, const TangentVector& v);
TangentVector log_map(const ManifoldPoint& p, const ManifoldPoint& q);
double distance(const ManifoldPoint& p, const ManifoldPoint& q);
double squared_distance(const ManifoldPoint& p, const ManifoldPoint& q);
// Transport along the minimizing geodesic from v.base() to `to`. Identity on flat spaces.
TangentVector parallel_transport(const TangentVector& v, const ManifoldPoint& to);

// Draws intrinsic Gaussian coefficients, rejection-resampling until inside the truncation ball.
Eigen::VectorXd draw_noise_coefficients(int intrinsic_dim, const NoiseModel& noise, RngStream& rng);
// Maps intrinsic coefficients to a tangent vector at p through a fixed orthonormal frame.
// Flat spaces use the coordinate frame; S^m transports the frame at the pole e_m along the
// connecting geodesic, so the same coefficients give nearby vectors at nearby base points.
TangentVector tangent_from_coefficients(const ManifoldPoint& p, const Eigen::VectorXd& coefficients);
TangentVector sample_tangent_gaussian(const ManifoldPoint& p, const NoiseModel& noise, RngStream& rng);
ManifoldPoint sample_gaussian(const ManifoldPoint& p, const NoiseModel& noise, RngStream& rng);

inline constexpr double kFrechetTolerance = 1e-10;
inline constexpr int kFrechetMaxIterations = 200;

class FrechetConvergenceError : public ConvergenceError {
public:
    FrechetConvergenceError(const std::string& what, ManifoldPoint last)
        : ConvergenceError(what), last_iterate(std::move(last)) {}

    ManifoldPoint last_iterate;
};

// Karcher flow with unit step. Exact arithmetic mean on flat spaces.
ManifoldPoint frechet_mean(std::span<const ManifoldPoint> points, double tol = kFrechetTolerance,
                           int max_iter = kFrechetMaxIterations);

// Euclidean norm of the Riemannian gradient of half the mean squared distance at mu.
double frechet_gradient_norm(std::span<const ManifoldPoint> points, const ManifoldPoint& mu);

}  // namespace shapebias
