#include "shapebias/group_action.hpp"

#include <cmath>
#include <numbers>

namespace shapebias {

namespace {

constexpr double kRotationTolerance = 1e-10;
constexpr double kFixedPointTolerance = 1e-12;

std::pair<int, int> landmark_shape(const Space& space)
{
    if (space.kind() == SpaceKind::Landmarks) return {space.landmark_count(), space.dim()};
    return {1, space.dim()};
}

void require_compatible(const GroupElement& g, const Space& space)
{
    const bool ok = std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, GroupElement::PlanarAngle>) {
                return space.kind() == SpaceKind::Euclidean && space.dim() == 2;
            } else if constexpr (std::is_same_v<T, GroupElement::AxialAngle>) {
                return space.kind() == SpaceKind::Sphere && space.dim() == 2;
            } else {
                return (space.kind() == SpaceKind::Landmarks || space.kind() == SpaceKind::Euclidean) &&
                       v.matrix.rows() == space.dim();
            }
        },
        g.value());
    if (!ok) throw ContractViolation("group element is not compatible with " + space.describe());
}

void require_group_space(const Space& space)
{
    const bool ok = (space.kind() == SpaceKind::Euclidean && space.dim() >= 2) ||
                    (space.kind() == SpaceKind::Sphere && space.dim() == 2) || space.kind() == SpaceKind::Landmarks;
    if (!ok) throw ContractViolation("no rotation action defined on " + space.describe());
}

Eigen::VectorXd rotate_rows(const Eigen::VectorXd& coords, const Eigen::MatrixXd& r, int k, int m)
{
    Eigen::VectorXd out(coords.size());
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < m; ++j) {
            double s = 0.0;
            for (int l = 0; l < m; ++l) s += coords[i * m + l] * r(l, j);
            out[i * m + j] = s;
        }
    }
    return out;
}

// X^T Y for row-major landmark coordinates.
Eigen::MatrixXd cross_covariance(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int k, int m)
{
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < k; ++i) {
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) a(r, c) += x[i * m + r] * y[i * m + c];
        }
    }
    return a;
}

Eigen::MatrixXd planar_matrix(double theta)
{
    // Row convention: (1, 0) * R = (cos, sin).
    Eigen::MatrixXd r(2, 2);
    r << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    return r;
}

struct KabschSolution {
    Eigen::MatrixXd rotation;
    bool unique;
};

// R in SO(m) maximizing tr(R^T A).
KabschSolution kabsch(const Eigen::MatrixXd& a)
{
    const auto m = a.rows();
    if (m == 1) return {Eigen::MatrixXd::Identity(1, 1), true};
    if (m == 2) {
        const double cs = a(0, 0) + a(1, 1);
        const double sn = a(0, 1) - a(1, 0);
        const bool unique = std::hypot(cs, sn) > 1e-9 * std::max(a.norm(), 1e-300);
        return {planar_matrix(std::atan2(sn, cs)), unique};
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::MatrixXd& u = svd.matrixU();
    const Eigen::MatrixXd& v = svd.matrixV();
    Eigen::VectorXd d = Eigen::VectorXd::Ones(m);
    d[m - 1] = (u * v.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    const auto& s = svd.singularValues();
    const bool unique = s[m - 1] >= 1e-9 * s[0] && s[0] > 0.0;
    return {u * d.asDiagonal() * v.transpose(), unique};
}

// Rotation R (row convention) with x R parallel to y, acting in the plane spanned by x and y.
Eigen::MatrixXd align_direction(const Eigen::VectorXd& x, const Eigen::VectorXd& y)
{
    const auto m = x.size();
    const Eigen::VectorXd a = x.normalized();
    const Eigen::VectorXd yh = y.normalized();
    const double cos_a = std::clamp(a.dot(yh), -1.0, 1.0);
    Eigen::VectorXd b = yh - cos_a * a;
    double sin_a = b.norm();
    if (sin_a < 1e-15) {
        if (cos_a > 0.0) return Eigen::MatrixXd::Identity(m, m);
        // Antiparallel: rotate by pi in any plane containing a.
        Eigen::Index axis = 0;
        a.cwiseAbs().minCoeff(&axis);
        b = Eigen::VectorXd::Unit(m, axis) - a[axis] * a;
        b.normalize();
        sin_a = 0.0;
    } else {
        b /= sin_a;
    }
    const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(m, m) + sin_a * (b * a.transpose() - a * b.transpose()) +
                              (cos_a - 1.0) * (a * a.transpose() + b * b.transpose());
    return q.transpose();
}

double longitude(const Eigen::VectorXd& x) { return std::atan2(x[1], x[0]); }

}  // namespace

double normalize_angle(double radians)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double a = std::remainder(radians, two_pi);
    if (a <= -std::numbers::pi) a += two_pi;
    return a;
}

GroupElement GroupElement::planar(double theta)
{
    if (!std::isfinite(theta)) throw DomainError("PlanarAngle: non-finite angle");
    return GroupElement(PlanarAngle{normalize_angle(theta)});
}

GroupElement GroupElement::axial(double phi)
{
    if (!std::isfinite(phi)) throw DomainError("AxialAngle: non-finite angle");
    return GroupElement(AxialAngle{normalize_angle(phi)});
}

GroupElement GroupElement::rotation(Eigen::MatrixXd matrix)
{
    if (matrix.rows() != matrix.cols() || matrix.rows() < 1) throw DomainError("RotationMatrix: must be square");
    if (!matrix.allFinite()) throw DomainError("RotationMatrix: non-finite entry");
    const auto m = matrix.rows();
    if ((matrix.transpose() * matrix - Eigen::MatrixXd::Identity(m, m)).lpNorm<Eigen::Infinity>() > kRotationTolerance) {
        throw DomainError("RotationMatrix: not orthogonal");
    }
    if (std::abs(matrix.determinant() - 1.0) > kRotationTolerance) throw DomainError("RotationMatrix: determinant is not +1");
    return GroupElement(RotationMatrix{std::move(matrix)});
}

double GroupElement::angle() const
{
    if (const auto* p = std::get_if<PlanarAngle>(&value_)) return p->theta;
    if (const auto* a = std::get_if<AxialAngle>(&value_)) return a->phi;
    throw ContractViolation("GroupElement::angle: element is a rotation matrix");
}

const Eigen::MatrixXd& GroupElement::matrix() const
{
    if (const auto* r = std::get_if<RotationMatrix>(&value_)) return r->matrix;
    throw ContractViolation("GroupElement::matrix: element is an angle");
}

GroupElement identity(const Space& space)
{
    require_group_space(space);
    if (space.kind() == SpaceKind::Euclidean && space.dim() == 2) return GroupElement::planar(0.0);
    if (space.kind() == SpaceKind::Sphere) return GroupElement::axial(0.0);
    return GroupElement::rotation(Eigen::MatrixXd::Identity(space.dim(), space.dim()));
}

GroupElement compose(const GroupElement& g1, const GroupElement& g2)
{
    if (g1.is_planar() && g2.is_planar()) return GroupElement::planar(g1.angle() + g2.angle());
    if (g1.is_axial() && g2.is_axial()) return GroupElement::axial(g1.angle() + g2.angle());
    if (g1.is_matrix() && g2.is_matrix() && g1.matrix().rows() == g2.matrix().rows()) {
        // Rows are right-multiplied: x R2 R1.
        return GroupElement::rotation(g2.matrix() * g1.matrix());
    }
    throw ContractViolation("compose: group elements of different kinds");
}

GroupElement inverse(const GroupElement& g)
{
    if (g.is_planar()) return GroupElement::planar(-g.angle());
    if (g.is_axial()) return GroupElement::axial(-g.angle());
    return GroupElement::rotation(g.matrix().transpose());
}

GroupElement random_group_element(const Space& space, RngStream& rng)
{
    require_group_space(space);
    const double angle = (2.0 * rng.uniform() - 1.0) * std::numbers::pi;
    if (space.kind() == SpaceKind::Euclidean && space.dim() == 2) return GroupElement::planar(angle);
    if (space.kind() == SpaceKind::Sphere) return GroupElement::axial(angle);

    const int m = space.dim();
    Eigen::MatrixXd z(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) z(i, j) = rng.normal();
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < m; ++j) {
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    }
    if (q.determinant() < 0.0) q.col(0) *= -1.0;
    return GroupElement::rotation(std::move(q));
}

ManifoldPoint act(const GroupElement& g, const ManifoldPoint& x)
{
    require_compatible(g, x.space());
    const auto& c = x.coords();
    if (g.is_planar() || g.is_axial()) {
        const double cs = std::cos(g.angle());
        const double sn = std::sin(g.angle());
        Eigen::VectorXd out = c;
        out[0] = cs * c[0] - sn * c[1];
        out[1] = sn * c[0] + cs * c[1];
        if (x.space().kind() == SpaceKind::Sphere) out /= out.norm();
        return ManifoldPoint(x.space(), std::move(out));
    }
    const auto [k, m] = landmark_shape(x.space());
    return ManifoldPoint(x.space(), rotate_rows(c, g.matrix(), k, m));
}

bool is_group_fixed(const ManifoldPoint& x)
{
    const Space& space = x.space();
    require_group_space(space);
    const auto& c = x.coords();
    switch (space.kind()) {
    case SpaceKind::Euclidean: return c.norm() < kFixedPointTolerance;
    case SpaceKind::Sphere: return c.head(2).norm() < kFixedPointTolerance;
    case SpaceKind::Landmarks: {
        const int m = space.dim();
        if (m == 1) return false;
        const Eigen::MatrixXd y = x.landmark_matrix();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(y);
        const auto& s = svd.singularValues();
        const double scale = std::max(1.0, s.size() > 0 ? s[0] : 0.0);
        int rank = 0;
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            if (s[i] > kFixedPointTolerance * scale) ++rank;
        }
        return rank < m - 1;
    }
    }
    return false;
}

Registration register_point(const ManifoldPoint& templ, const ManifoldPoint& x)
{
    if (!(templ.space() == x.space())) throw ContractViolation("register: space mismatch");
    const Space& space = x.space();
    require_group_space(space);
    if (is_group_fixed(templ)) {
        throw DegenerateOrbitError("register: template " + space.describe() + " lies on a singular orbit");
    }

    const auto& y = templ.coords();
    const auto& xc = x.coords();
    switch (space.kind()) {
    case SpaceKind::Euclidean: {
        if (xc.norm() < kFixedPointTolerance) return {identity(space), x, false};
        if (space.dim() == 2) {
            auto g = GroupElement::planar(std::atan2(y[1], y[0]) - std::atan2(xc[1], xc[0]));
            auto reg = act(g, x);
            return {std::move(g), std::move(reg), true};
        }
        auto g = GroupElement::rotation(align_direction(xc, y));
        auto reg = act(g, x);
        return {std::move(g), std::move(reg), true};
    }
    case SpaceKind::Sphere: {
        if (xc.head(2).norm() < kFixedPointTolerance) return {identity(space), x, false};
        auto g = GroupElement::axial(longitude(y) - longitude(xc));
        auto reg = act(g, x);
        return {std::move(g), std::move(reg), true};
    }
    case SpaceKind::Landmarks: {
        const int k = space.landmark_count();
        const int m = space.dim();
        auto solution = kabsch(cross_covariance(xc, y, k, m));
        ManifoldPoint reg(space, rotate_rows(xc, solution.rotation, k, m));
        return {GroupElement::rotation(std::move(solution.rotation)), std::move(reg), solution.unique};
    }
    }
    throw ContractViolation("register: unsupported space");
}

double orbit_distance(const ManifoldPoint& y, const ManifoldPoint& x)
{
    if (!(y.space() == x.space())) throw ContractViolation("orbit_distance: space mismatch");
    const Space& space = y.space();
    require_group_space(space);
    switch (space.kind()) {
    case SpaceKind::Euclidean: return std::abs(y.coords().norm() - x.coords().norm());
    case SpaceKind::Sphere: return std::abs(shape_coordinate(y) - shape_coordinate(x));
    case SpaceKind::Landmarks: {
        const int k = space.landmark_count();
        const int m = space.dim();
        const auto& yc = y.coords();
        const auto& xc = x.coords();
        const auto solution = kabsch(cross_covariance(xc, yc, k, m));
        double sum = 0.0;
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < m; ++j) {
                double s = 0.0;
                for (int l = 0; l < m; ++l) s += xc[i * m + l] * solution.rotation(l, j);
                const double diff = yc[i * m + j] - s;
                sum += diff * diff;
            }
        }
        return std::sqrt(sum);
    }
    }
    throw ContractViolation("orbit_distance: unsupported space");
}

}  // namespace shapebias
