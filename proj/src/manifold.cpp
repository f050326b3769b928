#include "shapebias/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace shapebias {

namespace {

constexpr double kUnitNormTolerance = 1e-12;
constexpr double kTangentTolerance = 1e-10;
constexpr double kAntipodalMargin = 1e-12;

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

void require_same_space(const Space& a, const Space& b, const char* op)
{
    if (!(a == b)) {
        throw ContractViolation(std::string(op) + ": space mismatch (" + a.describe() + " vs " + b.describe() + ")");
    }
}

// Log on the unit sphere on raw coordinates. Angle via atan2 so small distances keep full precision.
Eigen::VectorXd sphere_log(const Eigen::VectorXd& p, const Eigen::VectorXd& q)
{
    const double c = p.dot(q);
    if (c < -1.0 + kAntipodalMargin) throw CutLocusError("log: antipodal sphere points");
    Eigen::VectorXd u = q - c * p;
    u -= p.dot(u) * p;
    const double s = u.norm();
    if (s == 0.0) return Eigen::VectorXd::Zero(p.size());
    const double angle = std::atan2(s, c);
    return (angle / s) * u;
}

double sphere_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q)
{
    const double c = std::clamp(p.dot(q), -1.0, 1.0);
    const double s = (q - c * p).norm();
    return std::atan2(s, c);
}

Eigen::VectorXd sphere_exp(const Eigen::VectorXd& p, const Eigen::VectorXd& v)
{
    const double n = v.norm();
    if (n == 0.0) return p;
    Eigen::VectorXd x = std::cos(n) * p + (std::sin(n) / n) * v;
    x /= x.norm();
    return x;
}

Eigen::VectorXd sphere_transport(const Eigen::VectorXd& p, const Eigen::VectorXd& q, const Eigen::VectorXd& v)
{
    const double c = p.dot(q);
    if (c < -1.0 + kAntipodalMargin) throw CutLocusError("parallel_transport: antipodal sphere points");
    Eigen::VectorXd w = v - (q.dot(v) / (1.0 + c)) * (p + q);
    w -= q.dot(w) * q;
    return w;
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Space

Space Space::euclidean(int dim)
{
    if (dim < 1) throw DomainError("Euclidean dimension must be >= 1");
    return Space(SpaceKind::Euclidean, dim, 1);
}

Space Space::sphere(int dim)
{
    if (dim < 1) throw DomainError("sphere dimension must be >= 1");
    return Space(SpaceKind::Sphere, dim, 1);
}

Space Space::landmarks(int count, int dim)
{
    if (count < 1 || dim < 1) throw DomainError("landmark count and dimension must be >= 1");
    return Space(SpaceKind::Landmarks, dim, count);
}

int Space::ambient_dim() const
{
    switch (kind_) {
    case SpaceKind::Euclidean: return dim_;
    case SpaceKind::Sphere: return dim_ + 1;
    case SpaceKind::Landmarks: return dim_ * count_;
    }
    return 0;
}

int Space::intrinsic_dim() const
{
    return kind_ == SpaceKind::Sphere ? dim_ : ambient_dim();
}

std::string Space::describe() const
{
    std::ostringstream os;
    switch (kind_) {
    case SpaceKind::Euclidean: os << "Euclidean(" << dim_ << ")"; break;
    case SpaceKind::Sphere: os << "Sphere(" << dim_ << ")"; break;
    case SpaceKind::Landmarks: os << "Landmarks(" << count_ << "x" << dim_ << ")"; break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------------------------
// ManifoldPoint / TangentVector

ManifoldPoint::ManifoldPoint(Space space, Eigen::VectorXd coords) : space_(space), coords_(std::move(coords))
{
    if (coords_.size() != space_.ambient_dim()) {
        throw ContractViolation("ManifoldPoint: " + space_.describe() + " expects " +
                                std::to_string(space_.ambient_dim()) + " coordinates, got " +
                                std::to_string(coords_.size()));
    }
    if (!all_finite(coords_)) throw DomainError("ManifoldPoint: non-finite coordinate");
    if (space_.kind() == SpaceKind::Sphere && std::abs(coords_.norm() - 1.0) > kUnitNormTolerance) {
        throw DomainError("ManifoldPoint: sphere point is not unit norm");
    }
}

ManifoldPoint ManifoldPoint::euclidean(Eigen::VectorXd coords)
{
    const auto dim = static_cast<int>(coords.size());
    return ManifoldPoint(Space::euclidean(dim), std::move(coords));
}

ManifoldPoint ManifoldPoint::on_sphere(const Eigen::VectorXd& direction)
{
    if (!all_finite(direction)) throw DomainError("on_sphere: non-finite coordinate");
    const double n = direction.norm();
    if (n == 0.0) throw DomainError("on_sphere: zero vector has no direction");
    return ManifoldPoint(Space::sphere(static_cast<int>(direction.size()) - 1), direction / n);
}

ManifoldPoint ManifoldPoint::landmarks(const Eigen::MatrixXd& configuration)
{
    const auto k = static_cast<int>(configuration.rows());
    const auto m = static_cast<int>(configuration.cols());
    Eigen::VectorXd flat(k * m);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < m; ++j) flat[i * m + j] = configuration(i, j);
    }
    return ManifoldPoint(Space::landmarks(k, m), std::move(flat));
}

Eigen::MatrixXd ManifoldPoint::landmark_matrix() const
{
    const int k = space_.kind() == SpaceKind::Landmarks ? space_.landmark_count() : 1;
    const int m = space_.kind() == SpaceKind::Landmarks ? space_.dim() : static_cast<int>(coords_.size());
    Eigen::MatrixXd out(k, m);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < m; ++j) out(i, j) = coords_[i * m + j];
    }
    return out;
}

TangentVector::TangentVector(ManifoldPoint base, Eigen::VectorXd components)
    : base_(std::move(base)), components_(std::move(components))
{
    if (components_.size() != base_.coords().size()) {
        throw ContractViolation("TangentVector: component count does not match base point");
    }
    if (!all_finite(components_)) throw DomainError("TangentVector: non-finite component");
    if (base_.space().kind() == SpaceKind::Sphere &&
        std::abs(base_.coords().dot(components_)) > kTangentTolerance * std::max(1.0, components_.norm())) {
        throw DomainError("TangentVector: sphere tangent is not orthogonal to its base");
    }
}

TangentVector TangentVector::zero(const ManifoldPoint& base)
{
    return TangentVector(base, Eigen::VectorXd::Zero(base.coords().size()));
}

TangentVector TangentVector::scaled(double factor) const
{
    return TangentVector(base_, factor * components_);
}

TangentVector TangentVector::operator+(const TangentVector& other) const
{
    if (!same_point(base_, other.base_)) throw ContractViolation("TangentVector +: different base points");
    return TangentVector(base_, components_ + other.components_);
}

TangentVector TangentVector::operator-(const TangentVector& other) const
{
    if (!same_point(base_, other.base_)) throw ContractViolation("TangentVector -: different base points");
    return TangentVector(base_, components_ - other.components_);
}

void NoiseModel::validate() const
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("NoiseModel: sigma must be finite and >= 0");
    if (!(truncation_multiplier > 0.0)) throw DomainError("NoiseModel: truncation multiplier must be > 0");
}

double NoiseModel::truncation_radius(int intrinsic_dim) const
{
    return truncation_multiplier * sigma * std::sqrt(static_cast<double>(intrinsic_dim));
}

// ---------------------------------------------------------------------------------------------
// Running-example helpers

ManifoldPoint plane_point(double r, double angle)
{
    Eigen::Vector2d x(r * std::cos(angle), r * std::sin(angle));
    return ManifoldPoint::euclidean(x);
}

ManifoldPoint sphere_point(double theta, double phi)
{
    Eigen::Vector3d x(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
    x /= x.norm();
    return ManifoldPoint(Space::sphere(2), x);
}

double shape_coordinate(const ManifoldPoint& p)
{
    const auto& x = p.coords();
    switch (p.space().kind()) {
    case SpaceKind::Euclidean: return x.norm();
    case SpaceKind::Sphere: {
        const auto n = x.size() - 1;
        return std::atan2(x.head(n).norm(), x[n]);
    }
    case SpaceKind::Landmarks: break;
    }
    throw ContractViolation("shape_coordinate: defined for Euclidean and sphere points only");
}

bool same_point(const ManifoldPoint& a, const ManifoldPoint& b, double tol)
{
    return a.space() == b.space() && (a.coords() - b.coords()).lpNorm<Eigen::Infinity>() <= tol;
}

// ---------------------------------------------------------------------------------------------
// Riemannian primitives

ManifoldPoint exp_map(const ManifoldPoint& p, const TangentVector& v)
{
    if (!same_point(p, v.base())) throw ContractViolation("exp: tangent vector is not based at p");
    if (p.space().kind() == SpaceKind::Sphere) {
        return ManifoldPoint(p.space(), sphere_exp(p.coords(), v.components()));
    }
    return ManifoldPoint(p.space(), p.coords() + v.components());
}

TangentVector log_map(const ManifoldPoint& p, const ManifoldPoint& q)
{
    require_same_space(p.space(), q.space(), "log");
    if (p.space().kind() == SpaceKind::Sphere) return TangentVector(p, sphere_log(p.coords(), q.coords()));
    return TangentVector(p, q.coords() - p.coords());
}

double distance(const ManifoldPoint& p, const ManifoldPoint& q)
{
    require_same_space(p.space(), q.space(), "distance");
    if (p.space().kind() == SpaceKind::Sphere) return sphere_distance(p.coords(), q.coords());
    return (q.coords() - p.coords()).norm();
}

double squared_distance(const ManifoldPoint& p, const ManifoldPoint& q)
{
    require_same_space(p.space(), q.space(), "distance");
    if (p.space().kind() == SpaceKind::Sphere) {
        const double d = sphere_distance(p.coords(), q.coords());
        return d * d;
    }
    return (q.coords() - p.coords()).squaredNorm();
}

TangentVector parallel_transport(const TangentVector& v, const ManifoldPoint& to)
{
    require_same_space(v.base().space(), to.space(), "parallel_transport");
    if (to.space().kind() == SpaceKind::Sphere) {
        return TangentVector(to, sphere_transport(v.base().coords(), to.coords(), v.components()));
    }
    return TangentVector(to, v.components());
}

// ---------------------------------------------------------------------------------------------
// Sampling

Eigen::VectorXd draw_noise_coefficients(int intrinsic_dim, const NoiseModel& noise, RngStream& rng)
{
    noise.validate();
    const double radius = noise.truncation_multiplier * std::sqrt(static_cast<double>(intrinsic_dim));
    Eigen::VectorXd z(intrinsic_dim);
    for (;;) {
        for (int i = 0; i < intrinsic_dim; ++i) z[i] = rng.normal();
        if (!std::isfinite(radius) || z.norm() <= radius) break;
    }
    return noise.sigma * z;
}

TangentVector tangent_from_coefficients(const ManifoldPoint& p, const Eigen::VectorXd& coefficients)
{
    const Space& space = p.space();
    if (coefficients.size() != space.intrinsic_dim()) {
        throw ContractViolation("tangent_from_coefficients: expected " + std::to_string(space.intrinsic_dim()) +
                                " coefficients");
    }
    if (space.kind() != SpaceKind::Sphere) return TangentVector(p, coefficients);

    const int m = space.dim();
    const Eigen::VectorXd& x = p.coords();
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m + 1);
    e.head(m) = coefficients;
    if (1.0 + x[m] > kAntipodalMargin) {
        Eigen::VectorXd pole = Eigen::VectorXd::Zero(m + 1);
        pole[m] = 1.0;
        e -= (x.dot(e) / (1.0 + x[m])) * (pole + x);
    }
    e -= x.dot(e) * x;
    return TangentVector(p, e);
}

TangentVector sample_tangent_gaussian(const ManifoldPoint& p, const NoiseModel& noise, RngStream& rng)
{
    return tangent_from_coefficients(p, draw_noise_coefficients(p.space().intrinsic_dim(), noise, rng));
}

ManifoldPoint sample_gaussian(const ManifoldPoint& p, const NoiseModel& noise, RngStream& rng)
{
    return exp_map(p, sample_tangent_gaussian(p, noise, rng));
}

// ---------------------------------------------------------------------------------------------
// Frechet mean

namespace {

Eigen::VectorXd mean_log(std::span<const ManifoldPoint> points, const Eigen::VectorXd& mu)
{
    Eigen::VectorXd g = Eigen::VectorXd::Zero(mu.size());
    for (const auto& x : points) g += sphere_log(mu, x.coords());
    g /= static_cast<double>(points.size());
    g -= mu.dot(g) * mu;
    return g;
}

}  // namespace

double frechet_gradient_norm(std::span<const ManifoldPoint> points, const ManifoldPoint& mu)
{
    if (points.empty()) throw DomainError("frechet_gradient_norm: empty input");
    for (const auto& x : points) require_same_space(mu.space(), x.space(), "frechet_gradient_norm");
    if (mu.space().kind() == SpaceKind::Sphere) return mean_log(points, mu.coords()).norm();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(mu.coords().size());
    for (const auto& x : points) g += x.coords() - mu.coords();
    return (g / static_cast<double>(points.size())).norm();
}

ManifoldPoint frechet_mean(std::span<const ManifoldPoint> points, double tol, int max_iter)
{
    if (points.empty()) throw DomainError("frechet_mean: empty input");
    if (!(tol > 0.0) || max_iter < 1) throw DomainError("frechet_mean: tol and max_iter must be positive");
    const Space& space = points.front().space();
    for (const auto& x : points) require_same_space(space, x.space(), "frechet_mean");

    const auto n = static_cast<double>(points.size());
    if (space.is_flat()) {
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(space.ambient_dim());
        for (const auto& x : points) sum += x.coords();
        return ManifoldPoint(space, sum / n);
    }

    Eigen::VectorXd extrinsic = Eigen::VectorXd::Zero(space.ambient_dim());
    for (const auto& x : points) extrinsic += x.coords();
    Eigen::VectorXd mu = extrinsic.norm() > 1e-12 ? Eigen::VectorXd(extrinsic / extrinsic.norm())
                                                  : points.front().coords();
    for (int iter = 0; iter < max_iter; ++iter) {
        const Eigen::VectorXd g = mean_log(points, mu);
        if (g.norm() < tol) return ManifoldPoint(space, mu);
        mu = sphere_exp(mu, g);
    }
    if (mean_log(points, mu).norm() < tol) return ManifoldPoint(space, mu);
    throw FrechetConvergenceError("frechet_mean: no convergence after " + std::to_string(max_iter) + " iterations",
                                  ManifoldPoint(space, mu));
}

}  // namespace shapebias
