#include <cmath>
#include <numbers>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "shapebias/group_action.hpp"

using namespace shapebias;
using doctest::Approx;

namespace {

const double kPi = std::numbers::pi;

Eigen::MatrixXd triangle()
{
    Eigen::MatrixXd t(3, 2);
    t << -0.5, -0.3, 0.7, -0.3, -0.2, 0.6;
    return t;
}

}  // namespace

TEST_SUITE("group_action")
{
    TEST_CASE("normalize_angle wraps into (-pi, pi]")
    {
        CHECK(normalize_angle(kPi) == Approx(kPi));
        CHECK(normalize_angle(-kPi) == Approx(kPi));
        CHECK(normalize_angle(3 * kPi / 2) == Approx(-kPi / 2));
        CHECK(normalize_angle(0.25 + 8 * kPi) == Approx(0.25));
    }

    TEST_CASE("act examples")
    {
        const auto x = act(GroupElement::planar(kPi / 2), ManifoldPoint::euclidean(Eigen::Vector2d(1, 0)));
        CHECK((x.coords() - Eigen::Vector2d(0, 1)).norm() < 1e-15);

        const auto pole = sphere_point(0.0);
        CHECK(same_point(act(GroupElement::axial(1.3), pole), pole));

        const auto t = ManifoldPoint::landmarks(triangle());
        CHECK(act(identity(t.space()), t).coords() == t.coords());

        const auto s = act(GroupElement::axial(0.5), sphere_point(1.0, 0.2));
        CHECK(same_point(s, sphere_point(1.0, 0.7), 1e-14));
    }

    TEST_CASE("act rejects incompatible elements")
    {
        CHECK_THROWS_AS(act(GroupElement::axial(1.0), ManifoldPoint::euclidean(Eigen::Vector2d(1, 0))),
                        ContractViolation);
        CHECK_THROWS_AS(act(GroupElement::planar(1.0), sphere_point(0.5)), ContractViolation);
        CHECK_THROWS_AS(act(GroupElement::rotation(Eigen::MatrixXd::Identity(3, 3)), ManifoldPoint::landmarks(triangle())),
                        ContractViolation);
        Eigen::MatrixXd reflection = Eigen::MatrixXd::Identity(2, 2);
        reflection(1, 1) = -1;
        CHECK_THROWS_AS(GroupElement::rotation(reflection), DomainError);
    }

    TEST_CASE("compose, inverse, identity")
    {
        const auto half = compose(GroupElement::planar(kPi / 2), GroupElement::planar(kPi / 2));
        CHECK(half.is_planar());
        CHECK(std::abs(normalize_angle(half.angle() - kPi)) < 1e-15);

        gen::Gen g(4);
        for (int i = 0; i < 40; ++i) {
            const Space space = gen::group_space(g);
            const auto a = gen::group_element(g, space);
            const auto b = gen::group_element(g, space);
            const auto x = gen::point(g, space);
            const auto id = compose(a, inverse(a));
            CHECK(distance(act(id, x), x) < 1e-12);
            CHECK(distance(act(compose(a, b), x), act(a, act(b, x))) < 1e-12);
        }
    }

    TEST_CASE("random group elements are valid and seeded")
    {
        RngStream r1(5);
        RngStream r2(5);
        const auto a = random_group_element(Space::landmarks(4, 3), r1);
        const auto b = random_group_element(Space::landmarks(4, 3), r2);
        CHECK(a.matrix() == b.matrix());
        CHECK(a.matrix().determinant() == Approx(1.0));
        CHECK((a.matrix().transpose() * a.matrix() - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    }

    TEST_CASE("group-fixed points")
    {
        CHECK(is_group_fixed(ManifoldPoint::euclidean(Eigen::Vector2d(0, 0))));
        CHECK(is_group_fixed(sphere_point(0.0)));
        CHECK(is_group_fixed(sphere_point(kPi)));
        CHECK_FALSE(is_group_fixed(sphere_point(0.3)));
        CHECK_FALSE(is_group_fixed(ManifoldPoint::landmarks(triangle())));
        CHECK(is_group_fixed(ManifoldPoint::landmarks(Eigen::MatrixXd::Zero(3, 2))));
        Eigen::MatrixXd collinear(4, 3);
        collinear << 0, 0, 0, 1, 1, 1, 2, 2, 2, -1, -1, -1;
        CHECK(is_group_fixed(ManifoldPoint::landmarks(collinear)));
    }

    TEST_CASE("registration examples")
    {
        const auto reg = register_point(ManifoldPoint::euclidean(Eigen::Vector2d(1, 0)),
                                        ManifoldPoint::euclidean(Eigen::Vector2d(0, 2)));
        CHECK((reg.registered.coords() - Eigen::Vector2d(2, 0)).norm() < 1e-15);
        CHECK(reg.unique);

        const auto s = register_point(sphere_point(1.0, 0.4), sphere_point(0.2, -2.0));
        CHECK(same_point(s.registered, sphere_point(0.2, 0.4), 1e-14));

        CHECK_THROWS_AS(register_point(ManifoldPoint::euclidean(Eigen::Vector2d(0, 0)),
                                       ManifoldPoint::euclidean(Eigen::Vector2d(1, 0))),
                        DegenerateOrbitError);
        CHECK_THROWS_AS(register_point(sphere_point(0.0), sphere_point(1.0)), DegenerateOrbitError);
    }

    TEST_CASE("Kabsch recovers a rotated configuration")
    {
        gen::Gen g(12);
        for (int i = 0; i < 50; ++i) {
            Eigen::MatrixXd y = Eigen::MatrixXd::NullaryExpr(5, 3, [&] { return g.normal(); });
            const Eigen::Matrix3d r = gen::rotation3(g);
            const auto templ = ManifoldPoint::landmarks(y);
            const auto x = ManifoldPoint::landmarks(y * r);
            const auto reg = register_point(templ, x);
            CHECK(distance(reg.registered, templ) < 1e-9);
            CHECK(orbit_distance(templ, x) < 1e-9);
        }
        const auto t = ManifoldPoint::landmarks(triangle());
        const auto rotated = act(GroupElement::planar(0.0), ManifoldPoint::euclidean(Eigen::Vector2d(1, 0)));
        CHECK(rotated.coords()[0] == 1.0);
        Eigen::Matrix2d r;
        r << std::cos(2.0), std::sin(2.0), -std::sin(2.0), std::cos(2.0);
        CHECK(distance(register_point(t, ManifoldPoint::landmarks(triangle() * r)).registered, t) < 1e-12);
    }

    TEST_CASE("non-unique Kabsch optimum is flagged")
    {
        // Template and datum orthogonal in the sense X^T Y = 0: every planar rotation is optimal.
        Eigen::MatrixXd y(2, 2);
        y << 1, 0, -1, 0;
        Eigen::MatrixXd x(2, 2);
        x << 1, 0, 1, 0;
        const auto reg = register_point(ManifoldPoint::landmarks(y), ManifoldPoint::landmarks(x));
        CHECK_FALSE(reg.unique);
    }

    TEST_CASE("orbit distance examples")
    {
        CHECK(orbit_distance(ManifoldPoint::euclidean(Eigen::Vector2d(1, 0)),
                             ManifoldPoint::euclidean(Eigen::Vector2d(0, 2))) == Approx(1.0));
        CHECK(orbit_distance(sphere_point(0.4, 1.0), sphere_point(1.3, -2.5)) == Approx(0.9).epsilon(1e-13));
        CHECK(orbit_distance(sphere_point(0.0), sphere_point(0.7, 2.0)) == Approx(0.7).epsilon(1e-13));
        CHECK(orbit_distance(ManifoldPoint::euclidean(Eigen::Vector3d(0, 0, 0)),
                             ManifoldPoint::euclidean(Eigen::Vector3d(1, 2, 2))) == Approx(3.0));
    }

    TEST_CASE("orbit distance matches a rotation grid search")
    {
        gen::Gen g(99);
        for (int i = 0; i < 25; ++i) {
            Eigen::MatrixXd y = Eigen::MatrixXd::NullaryExpr(4, 2, [&] { return g.normal(); });
            Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(4, 2, [&] { return g.normal(); });
            const double od = orbit_distance(ManifoldPoint::landmarks(y), ManifoldPoint::landmarks(x));
            const double grid = oracle::planar_rotation_grid_min(y, x);
            CHECK(od <= grid + 1e-12);
            CHECK(grid - od <= oracle::planar_grid_resolution(x));
        }
    }
}
