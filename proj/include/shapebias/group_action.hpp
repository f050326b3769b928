#pragma once

#include <variant>

#include <Eigen/Dense>

#include "shapebias/manifold.hpp"
#include "shapebias/random.hpp"

namespace shapebias {

// Wraps an angle into (-pi, pi].
double normalize_angle(double radians);

// A rotation acting isometrically on one of the supported spaces.
//   PlanarAngle    acts on Euclidean(2)
//   AxialAngle     acts on Sphere(2), rotating about the pole axis
//   RotationMatrix acts on Landmarks(k x m) (each landmark row right-multiplied) and on Euclidean(m)
class GroupElement {
public:
    struct PlanarAngle {
        double theta;
    };
    struct AxialAngle {
        double phi;
    };
    struct RotationMatrix {
        Eigen::MatrixXd matrix;
    };
    using Variant = std::variant<PlanarAngle, AxialAngle, RotationMatrix>;

    static GroupElement planar(double theta);
    static GroupElement axial(double phi);
    // Throws DomainError unless the matrix is square, orthogonal and of determinant +1 within 1e-10.
    static GroupElement rotation(Eigen::MatrixXd matrix);

    const Variant& value() const { return value_; }
    bool is_planar() const { return std::holds_alternative<PlanarAngle>(value_); }
    bool is_axial() const { return std::holds_alternative<AxialAngle>(value_); }
    bool is_matrix() const { return std::holds_alternative<RotationMatrix>(value_); }
    // Angle of a PlanarAngle or AxialAngle element.
    double angle() const;
    const Eigen::MatrixXd& matrix() const;

private:
    explicit GroupElement(Variant v) : value_(std::move(v)) {}

    Variant value_;
};

GroupElement identity(const Space& space);
// act(compose(g1, g2), x) == act(g1, act(g2, x)).
GroupElement compose(const GroupElement& g1, const GroupElement& g2);
GroupElement inverse(const GroupElement& g);
// Haar-uniform rotation compatible with the space.
GroupElement random_group_element(const Space& space, RngStream& rng);

ManifoldPoint act(const GroupElement& g, const ManifoldPoint& x);

// True when every rotation fixes x (origin, sphere pole, landmarks of rank < m-1), i.e. x lies
// on a singular orbit where registration is not defined.
bool is_group_fixed(const ManifoldPoint& x);

struct Registration {
    GroupElement g;
    ManifoldPoint registered;  // g . x
    bool unique = true;        // false when the optimal rotation is not unique
};

// argmin over g of d(template, g . x), in closed form:
//   Euclidean(2)  rotate x onto the ray of the template
//   Sphere(2)     rotate the longitude of x onto the template's longitude
//   Landmarks     Kabsch (SVD of X^T Y with determinant sign correction)
// Throws DegenerateOrbitError when the template is fixed by the whole group.
Registration register_point(const ManifoldPoint& templ, const ManifoldPoint& x);

// Quotient distance inf_g d(y, g . x). Symmetric; also defined when y or x is group-fixed.
double orbit_distance(const ManifoldPoint& y, const ManifoldPoint& x);

}  // namespace shapebias
