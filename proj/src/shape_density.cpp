#include "shapebias/shape_density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "shapebias/errors.hpp"

namespace shapebias {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr unsigned kMaxDepth = 15;
constexpr double kRelativeTolerance = 1e-11;
constexpr int kLongitudePanels = 4;
// Beyond this many standard deviations the intrinsic kernel is below 1e-31.
constexpr double kIntrinsicCutoff = 12.0;

template <class F>
double integrate(F&& f, double a, double b, const char* what)
{
    if (!(b > a)) return 0.0;
    double error = 0.0;
    double l1 = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, kMaxDepth, kRelativeTolerance, &error, &l1);
    if (!std::isfinite(value) || error > 1e-6 * l1 + 1e-12) {
        throw QuadratureError(std::string(what) + ": adaptive quadrature did not reach tolerance (error " +
                              std::to_string(error) + " of " + std::to_string(l1) + ")");
    }
    return value;
}

// Composite 30-point Gauss-Legendre rule for smooth integrands.
template <class F>
double integrate_smooth(F&& f, double a, double b)
{
    const double h = (b - a) / kLongitudePanels;
    double total = 0.0;
    for (int i = 0; i < kLongitudePanels; ++i) {
        total += boost::math::quadrature::gauss<double, 30>::integrate(f, a + i * h, a + (i + 1) * h);
    }
    return total;
}

// I_nu(x) exp(-x) for x >= 0, finite for every x.
double scaled_bessel_i(double nu, double x)
{
    if (x < 600.0) return boost::math::cyl_bessel_i(nu, x) * std::exp(-x);
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 6; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (k * 8.0 * x);
        sum += term;
    }
    return sum / std::sqrt(2.0 * kPi * x);
}

void require_sigma(double sigma, const char* what)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError(std::string(what) + ": sigma must be positive");
}

// Geodesic distance on S^2 between colatitudes a and b at longitude difference phi.
double haversine_distance(double a, double b, double phi)
{
    const double s1 = std::sin(0.5 * (a - b));
    const double s2 = std::sin(0.5 * phi);
    const double h = std::clamp(s1 * s1 + std::sin(a) * std::sin(b) * s2 * s2, 0.0, 1.0);
    return 2.0 * std::asin(std::sqrt(h));
}

}  // namespace

const char* to_string(ExampleSpace space) { return space == ExampleSpace::PlaneR2 ? "plane" : "sphere"; }

double induced_density_euclidean(double r, double template_radius, double sigma, int m)
{
    require_sigma(sigma, "induced_density_euclidean");
    if (m < 2) throw DomainError("induced_density_euclidean: dimension must be at least 2");
    if (!(r >= 0.0) || !(template_radius >= 0.0) || !std::isfinite(r) || !std::isfinite(template_radius)) {
        throw DomainError("induced_density_euclidean: radii must be finite and nonnegative");
    }
    if (r == 0.0) return 0.0;
    const double s2 = sigma * sigma;
    const double half_m = 0.5 * m;
    if (template_radius == 0.0) {
        // Chi law with m degrees of freedom.
        const double log_f = (m - 1) * std::log(r) - r * r / (2.0 * s2) - (half_m - 1.0) * std::log(2.0) -
                             std::lgamma(half_m) - m * std::log(sigma);
        return std::exp(log_f);
    }
    const double y = template_radius;
    const double nu = half_m - 1.0;
    const double x = r * y / s2;
    return (r / s2) * std::pow(r / y, nu) * std::exp(-(r - y) * (r - y) / (2.0 * s2)) * scaled_bessel_i(nu, x);
}

double induced_density_plane(double r, double template_radius, double sigma)
{
    if (!(template_radius > 0.0)) throw DomainError("induced_density_plane: template radius must be positive");
    return induced_density_euclidean(r, template_radius, sigma, 2);
}

double asymptotic_estimate_euclidean(int m, double template_radius, double sigma)
{
    require_sigma(sigma, "asymptotic_estimate_euclidean");
    if (m < 2) throw DomainError("asymptotic_estimate_euclidean: dimension must be at least 2");
    if (!(template_radius >= 0.0)) throw DomainError("asymptotic_estimate_euclidean: negative template radius");
    if (template_radius == 0.0) return singularity_bias(m, sigma);
    const double y = template_radius;
    const double lower = std::max(0.0, y - 12.0 * sigma);
    const double upper = y + (12.0 + std::sqrt(static_cast<double>(m))) * sigma;
    auto f = [&](double r) { return r * induced_density_euclidean(r, y, sigma, m); };
    // Split at the template so the peak lies on a panel boundary.
    const double mid = std::clamp(y, lower, upper);
    return integrate(f, lower, mid, "asymptotic_estimate") + integrate(f, mid, upper, "asymptotic_estimate");
}

// ---------------------------------------------------------------------------------------------

SphereDensity::SphereDensity(double template_theta, double sigma, SphereKernel kernel, double truncation_multiplier)
    : theta0_(template_theta), sigma_(sigma), kernel_(kernel)
{
    require_sigma(sigma, "SphereDensity");
    if (!(template_theta > 0.0 && template_theta < kPi)) {
        throw DomainError("SphereDensity: template colatitude must lie in (0, pi)");
    }
    if (kernel == SphereKernel::TangentPushforward) {
        if (!(truncation_multiplier > 0.0)) throw DomainError("SphereDensity: truncation multiplier must be positive");
        truncation_ = truncation_multiplier * std::numbers::sqrt2 * sigma;
        if (!(truncation_ < kPi)) {
            throw DomainError("SphereDensity: truncation radius reaches the cut locus; use a smaller sigma");
        }
        lower_ = std::max(0.0, theta0_ - truncation_);
        upper_ = std::min(kPi, theta0_ + truncation_);
    } else {
        truncation_ = kIntrinsicCutoff * sigma < kPi ? kIntrinsicCutoff * sigma : std::numeric_limits<double>::infinity();
        lower_ = std::max(0.0, theta0_ - truncation_);
        upper_ = std::min(kPi, theta0_ + truncation_);
    }
    normalization_ = integrate_unnormalized(lower_, upper_, false);
    if (!(normalization_ > 0.0)) throw QuadratureError("SphereDensity: vanishing normalization");
}

double SphereDensity::unnormalized(double theta) const
{
    const double s2 = sigma_ * sigma_;
    auto k = [&](double d) {
        const double g = std::exp(-d * d / (2.0 * s2));
        if (kernel_ == SphereKernel::Intrinsic) return g;
        // Jacobian of Exp on the unit sphere: area element sin(t) dt versus t dt in the tangent plane.
        return d < 1e-8 ? g : g * d / std::sin(d);
    };

    const double st = std::sin(theta);
    if (st <= 0.0) return 0.0;
    double phi_max = kPi;
    if (std::isfinite(truncation_)) {
        const double c = (std::cos(truncation_) - std::cos(theta) * std::cos(theta0_)) / (st * std::sin(theta0_));
        if (c >= 1.0) return 0.0;
        if (c > -1.0) phi_max = std::acos(c);
    }
    auto inner = [&](double phi) { return k(haversine_distance(theta, theta0_, phi)); };
    // The integrand is analytic in phi on [0, phi_max]: the kernel depends on d^2 only.
    return st * 2.0 * integrate_smooth(inner, 0.0, phi_max);
}

std::vector<double> SphereDensity::breakpoints(double a, double b) const
{
    std::vector<double> points{a, b, theta0_};
    if (std::isfinite(truncation_)) {
        // Colatitudes where the truncation disc starts to cover a whole latitude circle.
        points.push_back(truncation_ - theta0_);
        points.push_back(2.0 * kPi - truncation_ - theta0_);
    }
    std::vector<double> kept;
    for (double p : points) {
        if (p >= a && p <= b) kept.push_back(p);
    }
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    return kept;
}

double SphereDensity::integrate_unnormalized(double a, double b, bool weight_by_theta) const
{
    const auto points = breakpoints(a, b);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        total += integrate(
            [&](double t) { return (weight_by_theta ? t : 1.0) * unnormalized(t); }, points[i], points[i + 1],
            "SphereDensity");
    }
    return total;
}

double SphereDensity::operator()(double theta) const
{
    if (!(theta >= 0.0 && theta <= kPi)) throw DomainError("SphereDensity: colatitude outside [0, pi]");
    if (theta < lower_ || theta > upper_) return 0.0;
    return unnormalized(theta) / normalization_;
}

double SphereDensity::cdf(double theta) const
{
    if (theta <= lower_) return 0.0;
    if (theta >= upper_) return 1.0;
    return std::clamp(integrate_unnormalized(lower_, theta, false) / normalization_, 0.0, 1.0);
}

double SphereDensity::mean() const { return integrate_unnormalized(lower_, upper_, true) / normalization_; }

double induced_density_sphere(double theta, double template_theta, double sigma, SphereKernel kernel)
{
    return SphereDensity(template_theta, sigma, kernel)(theta);
}

// ---------------------------------------------------------------------------------------------

double asymptotic_estimate(ExampleSpace space, double template_coordinate, double sigma, SphereKernel kernel)
{
    if (space == ExampleSpace::PlaneR2) {
        if (!(template_coordinate > 0.0)) throw DomainError("asymptotic_estimate: plane template must be positive");
        return asymptotic_estimate_euclidean(2, template_coordinate, sigma);
    }
    return SphereDensity(template_coordinate, sigma, kernel).mean();
}

BiasCurve bias_curve(ExampleSpace space, double template_coordinate, const std::vector<double>& sigma_grid,
                     SphereKernel kernel)
{
    if (sigma_grid.empty()) throw DomainError("bias_curve: empty sigma grid");
    for (std::size_t i = 0; i < sigma_grid.size(); ++i) {
        if (!(sigma_grid[i] > 0.0) || (i > 0 && !(sigma_grid[i] > sigma_grid[i - 1]))) {
            throw DomainError("bias_curve: sigma grid must be positive and strictly increasing");
        }
    }
    BiasCurve curve;
    curve.space = space;
    curve.template_coordinate = template_coordinate;
    curve.sigmas = sigma_grid;
    for (double s : sigma_grid) {
        const double estimate = asymptotic_estimate(space, template_coordinate, s, kernel);
        curve.estimates.push_back(estimate);
        curve.biases.push_back(estimate - template_coordinate);
    }
    return curve;
}

double singularity_bias(int m, double sigma)
{
    if (m < 2) throw DomainError("singularity_bias: dimension must be at least 2");
    if (!(sigma >= 0.0)) throw DomainError("singularity_bias: negative sigma");
    return std::numbers::sqrt2 * std::exp(std::lgamma(0.5 * (m + 1)) - std::lgamma(0.5 * m)) * sigma;
}

double distance_to_singularity(ExampleSpace space, double template_coordinate)
{
    if (space == ExampleSpace::PlaneR2) return template_coordinate;
    return std::min(template_coordinate, kPi - template_coordinate);
}

double mean_curvature_analytic(ExampleSpace space, double template_coordinate)
{
    if (space == ExampleSpace::PlaneR2) {
        if (!(template_coordinate > 0.0)) throw DegenerateOrbitError("mean_curvature_analytic: r = 0 is singular");
        return -1.0 / template_coordinate;
    }
    if (!(template_coordinate > 0.0 && template_coordinate < kPi)) {
        throw DegenerateOrbitError("mean_curvature_analytic: the poles are singular");
    }
    return -std::cos(template_coordinate) / std::sin(template_coordinate);
}

double hypersphere_mean_curvature(int m, double radius)
{
    if (m < 2 || !(radius > 0.0)) throw DomainError("hypersphere_mean_curvature: need m >= 2 and radius > 0");
    return (m - 1) / radius;
}

double fit_quadratic_coefficient(const BiasCurve& curve)
{
    if (curve.sigmas.size() < 4 || curve.biases.size() != curve.sigmas.size()) {
        throw DomainError("fit_quadratic_coefficient: need at least 4 (sigma, bias) pairs");
    }
    const double limit = 0.3 * distance_to_singularity(curve.space, curve.template_coordinate);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < curve.sigmas.size(); ++i) {
        const double s2 = curve.sigmas[i] * curve.sigmas[i];
        if (curve.sigmas[i] > limit * (1.0 + 1e-12)) {
            throw DomainError("fit_quadratic_coefficient: sigma " + std::to_string(curve.sigmas[i]) +
                              " is too large for the small-noise regime");
        }
        num += curve.biases[i] * s2;
        den += s2 * s2;
    }
    return num / den;
}

}  // namespace shapebias
