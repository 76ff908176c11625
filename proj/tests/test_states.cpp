#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "qflow/params.hpp"
#include "qflow/states.hpp"

using namespace qflow;

namespace {

double dimensionless_norm(const DimensionlessState& s) {
    return quadrature_norm(std::span<const std::complex<double>>(s.f), s.grid);
}

}  // namespace

TEST_CASE("built-in states have unit norm on their grids") {
    CHECK(std::abs(state_norm(momentum_gaussian(3.0, 1.0)) - 1.0) < 1e-8);
    CHECK(std::abs(state_norm(momentum_exponential(1.0)) - 1.0) < 1e-8);
    CHECK(std::abs(state_norm(position_gaussian(-5.0, 1.0, 3.0)) - 1.0) < 1e-8);
    CHECK(std::abs(state_norm(chopped_beam(1.0, 50.0)) - 1.0) < 1e-8);
}

TEST_CASE("momentum support is non-negative, position support non-positive") {
    const MomentumState phi = momentum_gaussian(3.0, 1.0);
    for (const double p : phi.momenta) CHECK(p >= 0.0);
    const PositionState psi = position_gaussian(-5.0, 1.0, 3.0);
    for (const double x : psi.positions) CHECK(x <= 0.0);
}

TEST_CASE("f_from_phi preserves the quadrature norm") {
    const BackflowParams params(1.3, 0.8, 0.6, 0.2, 1.7);
    const MomentumState phi = momentum_gaussian(2.5, 0.8);
    const DimensionlessState f = f_from_phi(phi, params);
    CHECK(std::abs(dimensionless_norm(f) - 1.0) < 1e-10);
}

TEST_CASE("f_from_phi modulus is the quarter-power scale times |phi|") {
    const BackflowParams params(2.0, 1.0, 1.0, 0.0, 2.0);
    const MomentumState phi = momentum_exponential(1.5);
    const DimensionlessState f = f_from_phi(phi, params);
    const double amp = std::pow(4.0 * params.planck * params.mass / params.window_width(), 0.25);
    for (std::size_t i = 0; i < phi.size(); ++i)
        CHECK(std::abs(f.f[i]) == doctest::Approx(amp * std::abs(phi.samples[i])).epsilon(1e-12));
}

TEST_CASE("f_from_phi phase at g = 0, T1 = 0") {
    const BackflowParams params(1.0, 1.0, 0.0, 0.0, 2.0);
    const MomentumState phi = momentum_gaussian(2.0, 0.7);
    const DimensionlessState f = f_from_phi(phi, params);
    const double amp = std::pow(4.0 / 2.0, 0.25);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double p = phi.momenta[i];
        const std::complex<double> expected =
            amp * std::exp(std::complex<double>(0.0, -params.window_end * p * p / 4.0)) *
            phi.samples[i];
        CHECK(std::abs(f.f[i] - expected) < 1e-12);
    }
}

TEST_CASE("f_from_psi preserves norm and maps x <= 0 onto ascending z") {
    const ReentryParams params(1.1, 0.9, 0.4, 0.8, 2.3);
    const PositionState psi = position_gaussian(-4.0, 0.8, 2.0, params.planck);
    const DimensionlessState f = f_from_psi(psi, params);
    CHECK(std::abs(dimensionless_norm(f) - 1.0) < 1e-10);
    for (std::size_t i = 1; i < f.grid.size(); ++i) CHECK(f.grid.nodes[i] > f.grid.nodes[i - 1]);
    CHECK(f.grid.nodes.front() >= 0.0);
}

TEST_CASE("f_from_psi phase at ell = 0") {
    const ReentryParams params(1.0, 1.0, 0.0, 1.0, 2.0);
    const PositionState psi = chopped_beam(1.0, 10.0, 100);
    const DimensionlessState f = f_from_psi(psi, params);
    const double inv_sum = 1.0 / params.window_start + 1.0 / params.window_end;
    const double amp = std::pow(4.0 * params.planck / (params.mass * params.inverse_time_span()), 0.25);
    const double q = 0.5 * std::sqrt(params.mass * params.inverse_time_span() / params.planck);
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        const double x = -f.grid.nodes[i] / q;
        // find the matching source sample
        std::size_t j = 0;
        double best = 1e300;
        for (std::size_t k = 0; k < psi.size(); ++k) {
            if (std::abs(psi.positions[k] - x) < best) {
                best = std::abs(psi.positions[k] - x);
                j = k;
            }
        }
        const std::complex<double> expected =
            amp * std::exp(std::complex<double>(0.0, 0.25 * inv_sum * x * x)) * psi.samples[j];
        CHECK(std::abs(f.f[i] - expected) < 1e-10);
    }
}

TEST_CASE("round trips f -> phi -> f and f -> psi -> f") {
    const Grid grid = build_grid(200, 20.0);
    const DimensionlessState f = dimensionless_gaussian(grid, 1.5, 0.6);

    const BackflowParams bf(1.2, 0.9, 0.7, 0.3, 1.8);
    const DimensionlessState f2 = f_from_phi(phi_from_f(f, bf), bf);
    for (std::size_t i = 0; i < f.f.size(); ++i) {
        CHECK(std::abs(f2.f[i] - f.f[i]) < 1e-12);
        CHECK(std::abs(f2.grid.nodes[i] - grid.nodes[i]) < 1e-12);
    }

    const ReentryParams re(1.2, 0.9, 0.5, 0.7, 2.4);
    const DimensionlessState f3 = f_from_psi(psi_from_f(f, re), re);
    for (std::size_t i = 0; i < f.f.size(); ++i) {
        CHECK(std::abs(f3.f[i] - f.f[i]) < 1e-12);
        CHECK(std::abs(f3.grid.nodes[i] - grid.nodes[i]) < 1e-12);
    }
}

TEST_CASE("transform unitarity for random states") {
    std::mt19937 rng(29);
    std::normal_distribution<double> nd;
    const Grid grid = build_grid(150, 15.0);
    for (int k = 0; k < 10; ++k) {
        DimensionlessState f{{}, grid};
        f.f.resize(grid.size());
        for (auto& c : f.f) c = {nd(rng), nd(rng)};
        const double nrm = dimensionless_norm(f);
        for (auto& c : f.f) c /= std::sqrt(nrm);

        const BackflowParams bf(1.0, 1.0, 0.5, 0.1, 1.1);
        CHECK(std::abs(state_norm(phi_from_f(f, bf)) - 1.0) < 1e-10);
        const ReentryParams re(1.0, 1.0, 0.5, 0.5, 2.0);
        CHECK(std::abs(state_norm(psi_from_f(f, re)) - 1.0) < 1e-10);
    }
}

TEST_CASE("dimensionless families are unit norm") {
    const Grid grid = build_grid(200, 25.0);
    CHECK(std::abs(dimensionless_norm(dimensionless_gaussian(grid, 1.0, 0.5)) - 1.0) < 1e-12);
    CHECK(std::abs(dimensionless_norm(dimensionless_exponential(grid)) - 1.0) < 1e-12);
}
