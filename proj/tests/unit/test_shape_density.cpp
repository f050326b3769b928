#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "oracles.hpp"
#include "shapebias/manifold.hpp"
#include "shapebias/shape_density.hpp"

using namespace shapebias;
using doctest::Approx;

namespace {

const double kPi = std::numbers::pi;

std::vector<double> grid(double a, double b, int n)
{
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
    return g;
}

}  // namespace

TEST_SUITE("shape_density")
{
    TEST_CASE("plane density basics")
    {
        CHECK(induced_density_plane(0.0, 1.0, 0.3) == 0.0);
        CHECK_THROWS_AS(induced_density_plane(-1.0, 1.0, 0.3), DomainError);
        CHECK_THROWS_AS(induced_density_plane(1.0, 0.0, 0.3), DomainError);
        CHECK_THROWS_AS(induced_density_plane(1.0, 1.0, 0.0), DomainError);
        using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
        const double mass = GK::integrate([](double r) { return induced_density_plane(r, 1.0, 0.3); }, 0.0, 5.0, 10, 1e-12);
        CHECK(mass == Approx(1.0).epsilon(1e-10));
        // Rayleigh law at the singular template.
        CHECK(induced_density_euclidean(0.5, 0.0, 1.0, 2) == Approx(0.5 * std::exp(-0.125)).epsilon(1e-14));
        // Large arguments of the Bessel factor stay finite.
        CHECK(std::isfinite(induced_density_plane(100.0, 100.0, 0.01)));
        CHECK(induced_density_plane(100.0, 100.0, 0.01) == Approx(1.0 / (0.01 * std::sqrt(2 * kPi))).epsilon(1e-4));
    }

    TEST_CASE("plane asymptotic estimate is the Rice mean")
    {
        for (double y : {0.5, 1.0, 2.0}) {
            for (double s : {0.05, 0.3, 1.0}) {
                CHECK(asymptotic_estimate(ExampleSpace::PlaneR2, y, s) == Approx(oracle::rice_mean(y, s)).epsilon(1e-10));
            }
        }
        CHECK(asymptotic_estimate(ExampleSpace::PlaneR2, 1.0, 1e-3) == Approx(1.0).epsilon(1e-6));
    }

    TEST_CASE("noncentral chi mean in R^m")
    {
        CHECK(asymptotic_estimate_euclidean(2, 1.0, 0.3) == Approx(oracle::rice_mean(1.0, 0.3)).epsilon(1e-10));
        // Closed form at m = 3: E|X| = sigma sqrt(2/pi) e^{-y^2/2s^2} + (y + s^2/y) erf(y / (s sqrt 2)).
        const double y = 1.2;
        const double s = 1.0;
        const double expected = s * std::sqrt(2 / kPi) * std::exp(-y * y / (2 * s * s)) +
                                (y + s * s / y) * std::erf(y / (s * std::sqrt(2.0)));
        CHECK(asymptotic_estimate_euclidean(3, y, s) == Approx(expected).epsilon(1e-10));
        CHECK(asymptotic_estimate_euclidean(10, 0.0, 1.0) == Approx(singularity_bias(10, 1.0)).epsilon(1e-10));
    }

    TEST_CASE("sphere density normalizes and vanishes outside the support")
    {
        const SphereDensity f(1.0, 0.3);
        CHECK(f.cdf(f.support_upper()) == Approx(1.0).epsilon(1e-9));
        CHECK(f.cdf(f.support_lower()) == Approx(0.0).scale(1.0).epsilon(1e-12));
        CHECK(f(f.support_upper() + 0.01) == 0.0);
        const SphereDensity narrow(1.5, 0.1);
        CHECK(narrow.support_lower() > 0.0);
        CHECK(narrow(narrow.support_lower() - 0.01) == 0.0);
        CHECK(narrow(1.5) > 0.0);
        CHECK_THROWS_AS(f(-0.1), DomainError);
        // Mass of the tangent-truncated Gaussian: 2 pi sigma^2 (1 - e^{-T^2 / 2 sigma^2}) with T = 3 sqrt(2) sigma.
        CHECK(f.normalization() == Approx(2 * kPi * 0.09 * (1 - std::exp(-9.0))).epsilon(1e-8));
        CHECK_THROWS_AS(SphereDensity(1.0, 0.8), DomainError);
    }

    TEST_CASE("sphere mean agrees with tangent polar integration")
    {
        for (double th : {0.4, 1.0, 2.0}) {
            for (double s : {0.05, 0.2, 0.3}) {
                if (3 * std::sqrt(2.0) * s >= kPi) continue;
                CHECK(asymptotic_estimate(ExampleSpace::SphereS2, th, s) ==
                      Approx(oracle::sphere_tangent_mean(th, s)).epsilon(1e-8));
            }
        }
    }

    TEST_CASE("sphere at the equator has no bias")
    {
        for (double s : {0.1, 0.3}) {
            CHECK(std::abs(asymptotic_estimate(ExampleSpace::SphereS2, kPi / 2, s) - kPi / 2) < 1e-9);
            CHECK(std::abs(asymptotic_estimate(ExampleSpace::SphereS2, kPi / 2, s, SphereKernel::Intrinsic) - kPi / 2) <
                  1e-9);
        }
    }

    TEST_CASE("equatorial symmetry and repulsion from singularities")
    {
        const SphereDensity eq(kPi / 2, 0.25);
        for (double d : {0.05, 0.2, 0.5, 0.9}) CHECK(std::abs(eq(kPi / 2 + d) - eq(kPi / 2 - d)) < 1e-8);
        const auto sig = grid(0.05, 0.3, 6);
        for (double b : bias_curve(ExampleSpace::PlaneR2, 1.0, sig).biases) CHECK(b > 0.0);
        for (double b : bias_curve(ExampleSpace::SphereS2, 1.0, sig).biases) CHECK(b > 0.0);
        for (double b : bias_curve(ExampleSpace::SphereS2, 2.2, sig).biases) CHECK(b < 0.0);
    }

    TEST_CASE("the two sphere kernels agree for small sigma")
    {
        const double a = asymptotic_estimate(ExampleSpace::SphereS2, 1.0, 0.05);
        const double b = asymptotic_estimate(ExampleSpace::SphereS2, 1.0, 0.05, SphereKernel::Intrinsic);
        CHECK(std::abs(a - b) < 0.1 * std::abs(a - 1.0));
    }

    TEST_CASE("bias curves and quadratic fits")
    {
        const auto sig = grid(0.02, 0.1, 9);
        const auto plane = bias_curve(ExampleSpace::PlaneR2, 1.0, sig);
        REQUIRE(plane.biases.size() == 9);
        CHECK(fit_quadratic_coefficient(plane) == Approx(0.5).epsilon(0.1));

        const auto sphere = bias_curve(ExampleSpace::SphereS2, 1.0, sig);
        const double target = 0.5 / std::tan(1.0);
        CHECK(fit_quadratic_coefficient(sphere) == Approx(target).epsilon(0.1));

        const auto equator = bias_curve(ExampleSpace::SphereS2, kPi / 2, sig);
        CHECK(std::abs(fit_quadratic_coefficient(equator)) < 0.02);
    }

    TEST_CASE("quadratic fit preconditions")
    {
        const auto curve = bias_curve(ExampleSpace::PlaneR2, 1.0, {0.1, 0.2, 0.3});
        CHECK_THROWS_AS(fit_quadratic_coefficient(curve), DomainError);
        const auto far = bias_curve(ExampleSpace::PlaneR2, 1.0, {0.1, 0.2, 0.3, 0.5});
        CHECK_THROWS_AS(fit_quadratic_coefficient(far), DomainError);
    }

    TEST_CASE("mean curvature")
    {
        CHECK(std::abs(mean_curvature_analytic(ExampleSpace::PlaneR2, 1.0)) == Approx(1.0));
        CHECK(std::abs(mean_curvature_analytic(ExampleSpace::SphereS2, kPi / 2)) < 1e-15);
        const double h = std::abs(mean_curvature_analytic(ExampleSpace::SphereS2, 1.0));
        CHECK(h == Approx(oracle::latitude_geodesic_curvature(1.0)).epsilon(1e-6));
        CHECK(h == Approx(0.6421).epsilon(1e-4));
        CHECK(hypersphere_mean_curvature(2, 1.0) == 1.0);
        CHECK(hypersphere_mean_curvature(3, 2.0) == 1.0);
        CHECK(distance_to_singularity(ExampleSpace::SphereS2, 2.5) == Approx(kPi - 2.5));
        CHECK_THROWS_AS(mean_curvature_analytic(ExampleSpace::PlaneR2, 0.0), DegenerateOrbitError);
        CHECK_THROWS_AS(mean_curvature_analytic(ExampleSpace::SphereS2, 0.0), DegenerateOrbitError);
    }

    TEST_CASE("singularity bias")
    {
        CHECK(singularity_bias(2, 1.0) == Approx(std::sqrt(kPi / 2)));
        CHECK(singularity_bias(3, 2.0) == Approx(2.0 * 2.0 * std::sqrt(2.0 / kPi)));
        CHECK_THROWS_AS(singularity_bias(1, 1.0), DomainError);
    }
}
