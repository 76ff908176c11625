#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "qflow/grid.hpp"

using namespace qflow;

TEST_CASE("midpoint rule, n=2 on [0,1]") {
    const Grid g = build_grid(2, 1.0, QuadRule::UniformMidpoint);
    REQUIRE(g.size() == 2);
    CHECK(g.nodes[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g.nodes[1] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(g.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g.weights[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("weights integrate the constant 1 to z_max") {
    for (const QuadRule rule : {QuadRule::GaussLegendreComposite, QuadRule::UniformMidpoint}) {
        for (const std::size_t n : {2u, 7u, 50u, 123u, 1500u}) {
            const Grid g = build_grid(n, 30.0, rule);
            double sum = 0.0;
            for (const double w : g.weights) sum += w;
            CHECK(std::abs(sum - 30.0) < 1e-10);
        }
    }
}

TEST_CASE("nodes strictly increasing inside (0, z_max)") {
    for (const QuadRule rule : {QuadRule::GaussLegendreComposite, QuadRule::UniformMidpoint}) {
        const Grid g = build_grid(95, 12.0, rule);
        CHECK(g.nodes.front() > 0.0);
        CHECK(g.nodes.back() < 12.0);
        for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.nodes[i] > g.nodes[i - 1]);
        for (const double w : g.weights) CHECK(w > 0.0);
    }
}

TEST_CASE("polynomial exactness of composite Gauss-Legendre") {
    const double z_max = 3.0;
    const Grid g = build_grid(20, z_max);
    double integral = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        integral += g.weights[i] * g.nodes[i] * g.nodes[i];
    CHECK(integral == doctest::Approx(z_max * z_max * z_max / 3.0).epsilon(1e-14));
}

TEST_CASE("exp(-z) on [0,10] with 20 panels of 10 nodes") {
    const Grid g = build_grid(200, 10.0);
    double integral = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        integral += g.weights[i] * std::exp(-g.nodes[i]);
    CHECK(std::abs(integral - (1.0 - std::exp(-10.0))) < 1e-12);
}

TEST_CASE("quadrature_norm") {
    const Grid g = build_grid(200, 20.0);

    SUBCASE("zero samples") {
        std::vector<std::complex<double>> f(g.size(), 0.0);
        CHECK(quadrature_norm(std::span<const std::complex<double>>(f), g) == 0.0);
    }
    SUBCASE("constant 1 gives z_max") {
        std::vector<std::complex<double>> f(g.size(), 1.0);
        CHECK(std::abs(quadrature_norm(std::span<const std::complex<double>>(f), g) - 20.0) <
              1e-10);
    }
    SUBCASE("sqrt(2) exp(-z) is normalized") {
        std::vector<std::complex<double>> f(g.size());
        for (std::size_t i = 0; i < g.size(); ++i)
            f[i] = std::sqrt(2.0) * std::exp(-g.nodes[i]);
        CHECK(std::abs(quadrature_norm(std::span<const std::complex<double>>(f), g) - 1.0) <
              1e-10);
    }
    SUBCASE("length mismatch is a shape error") {
        std::vector<double> f(g.size() + 1, 1.0);
        CHECK_THROWS_AS(quadrature_norm(std::span<const double>(f), g), shape_error);
    }
}

TEST_CASE("refinement convergence at the rule's order") {
    // Midpoint is order 2: doubling n shrinks the error of int |f|^2 by ~4.
    // Use f = exp(-z) so the boundary derivative terms do not cancel.
    const double exact = 0.5 * (1.0 - std::exp(-6.0));
    auto norm_error = [&](std::size_t n) {
        const Grid g = build_grid(n, 3.0, QuadRule::UniformMidpoint);
        double integral = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double f = std::exp(-g.nodes[i]);
            integral += g.weights[i] * f * f;
        }
        return std::abs(integral - exact);
    };
    CHECK(norm_error(16) < norm_error(8) / 3.0);
    CHECK(norm_error(32) < norm_error(16) / 3.0);

    // Gauss-Legendre panels hit machine precision immediately on this integrand.
    const Grid g = build_grid(40, 3.0);
    double integral = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double f = std::exp(-g.nodes[i]);
        integral += g.weights[i] * f * f;
    }
    CHECK(std::abs(integral - exact) < 1e-14);
}

TEST_CASE("parameter-domain errors") {
    CHECK_THROWS_AS(build_grid(1, 1.0), domain_error);
    CHECK_THROWS_AS(build_grid(10, 0.0), domain_error);
    CHECK_THROWS_AS(build_grid(10, -2.0), domain_error);
}
