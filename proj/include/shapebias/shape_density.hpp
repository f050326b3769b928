#pragma once

#include <vector>

namespace shapebias {

// The two running examples, each reduced to a scalar shape coordinate:
//   PlaneR2   R^2 under SO(2), shape coordinate r = |x| in [0, inf)
//   SphereS2  S^2 under rotations about the pole axis, shape coordinate colatitude theta in [0, pi]
enum class ExampleSpace { PlaneR2, SphereS2 };

// Noise kernel used for the sphere density.
//   TangentPushforward  the generative model: truncated tangent Gaussian pushed through Exp
//   Intrinsic           exp(-d^2 / 2 sigma^2) in the geodesic distance, untruncated
enum class SphereKernel { TangentPushforward, Intrinsic };

const char* to_string(ExampleSpace space);

// Density of |X| for X ~ N(y e_1, sigma^2 I_m) in R^m (noncentral chi; Rice when m = 2).
double induced_density_euclidean(double r, double template_radius, double sigma, int m);
double induced_density_plane(double r, double template_radius, double sigma);

// Density of the colatitude of X on S^2 when the template sits at colatitude template_theta.
// Normalization is computed once per instance.
class SphereDensity {
public:
    SphereDensity(double template_theta, double sigma, SphereKernel kernel = SphereKernel::TangentPushforward,
                  double truncation_multiplier = 3.0);

    double operator()(double theta) const;
    double cdf(double theta) const;
    double mean() const;
    // Interval outside of which the density vanishes.
    double support_lower() const { return lower_; }
    double support_upper() const { return upper_; }
    double normalization() const { return normalization_; }

private:
    // sin(theta) * integral over longitude of the kernel, before normalization.
    double unnormalized(double theta) const;
    double integrate_unnormalized(double a, double b, bool weight_by_theta) const;
    std::vector<double> breakpoints(double a, double b) const;

    double theta0_;
    double sigma_;
    SphereKernel kernel_;
    double truncation_;  // tangent radius; infinite for the intrinsic kernel
    double lower_;
    double upper_;
    double normalization_;
};

double induced_density_sphere(double theta, double template_theta, double sigma,
                              SphereKernel kernel = SphereKernel::TangentPushforward);

// E[shape coordinate] under the induced density: the n -> infinity limit of the estimator.
// The plane uses the untruncated Rice law.
double asymptotic_estimate(ExampleSpace space, double template_coordinate, double sigma,
                           SphereKernel kernel = SphereKernel::TangentPushforward);
// E|X| for X ~ N(y e_1, sigma^2 I_m).
double asymptotic_estimate_euclidean(int m, double template_radius, double sigma);

struct BiasCurve {
    ExampleSpace space = ExampleSpace::PlaneR2;
    double template_coordinate = 0.0;
    std::vector<double> sigmas;
    std::vector<double> estimates;
    std::vector<double> biases;  // estimate - template, signed along the shape coordinate
};

BiasCurve bias_curve(ExampleSpace space, double template_coordinate, const std::vector<double>& sigma_grid,
                     SphereKernel kernel = SphereKernel::TangentPushforward);

// Bias of the estimator at the singular template Y = 0 of R^m: the chi mean sqrt(2) G((m+1)/2) / G(m/2) sigma.
double singularity_bias(int m, double sigma);

// Component of the orbit's mean curvature vector H along the increasing shape coordinate:
// -1/r on the plane, -cot(theta) on the sphere. H points toward the nearest singularity, and the
// asymptotic bias is -sigma^2 / 2 * H.
double mean_curvature_analytic(ExampleSpace space, double template_coordinate);
// |H| of a round hypersphere of radius R in R^m: (m - 1) / R.
double hypersphere_mean_curvature(int m, double radius);

// Distance of the template to the nearest singular orbit (0 for the plane, the poles for the sphere).
double distance_to_singularity(ExampleSpace space, double template_coordinate);

// Least-squares c in bias ~ c sigma^2. Requires at least 4 points, all with
// sigma <= 0.3 * distance_to_singularity.
double fit_quadratic_coefficient(const BiasCurve& curve);

}  // namespace shapebias
