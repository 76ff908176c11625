#ifndef QFLOW_GRID_HPP
#define QFLOW_GRID_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qflow/errors.hpp"

namespace qflow {

enum class QuadRule {
    GaussLegendreComposite,
    UniformMidpoint,
};

inline std::string to_string(QuadRule rule) {
    switch (rule) {
        case QuadRule::GaussLegendreComposite: return "gauss-legendre-composite";
        case QuadRule::UniformMidpoint: return "uniform-midpoint";
    }
    return "unknown";
}

inline QuadRule quad_rule_from_string(const std::string& name) {
    if (name == "gauss-legendre-composite") return QuadRule::GaussLegendreComposite;
    if (name == "uniform-midpoint") return QuadRule::UniformMidpoint;
    throw domain_error("unknown quadrature rule: " + name);
}

/// Quadrature nodes and weights on the truncated half-line [0, z_max].
/// Open rules only: 0 < nodes[0], nodes[n-1] < z_max, weights sum to z_max.
struct Grid {
    std::vector<double> nodes;
    std::vector<double> weights;
    double z_max = 0.0;
    QuadRule rule = QuadRule::GaussLegendreComposite;

    std::size_t size() const noexcept { return nodes.size(); }
};

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_k.
inline void gauss_legendre_reference(std::size_t k, std::vector<double>& x,
                                     std::vector<double>& w) {
    x.assign(k, 0.0);
    w.assign(k, 0.0);
    const std::size_t half = (k + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        double root = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                               (static_cast<double>(k) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Legendre recurrence up to degree k.
            double p0 = 1.0, p1 = root;
            for (std::size_t j = 2; j <= k; ++j) {
                const double pj = ((2.0 * static_cast<double>(j) - 1.0) * root * p1 -
                                   (static_cast<double>(j) - 1.0) * p0) /
                                  static_cast<double>(j);
                p0 = p1;
                p1 = pj;
            }
            dp = static_cast<double>(k) * (root * p1 - p0) / (root * root - 1.0);
            const double step = p1 / dp;
            root -= step;
            if (std::abs(step) < 1e-15) break;
        }
        x[i] = -root;
        x[k - 1 - i] = root;
        const double wi = 2.0 / ((1.0 - root * root) * dp * dp);
        w[i] = wi;
        w[k - 1 - i] = wi;
    }
    if (k == 1) {
        x[0] = 0.0;
        w[0] = 2.0;
    }
}

constexpr std::size_t kPanelNodes = 10;

}  // namespace detail

/// Builds an n-node open quadrature grid on [0, z_max].
///
/// Gauss-Legendre is composite with 10-node panels; when n is not a multiple
/// of 10 the last panel takes the remainder.
inline Grid build_grid(std::size_t n, double z_max,
                       QuadRule rule = QuadRule::GaussLegendreComposite) {
    if (n < 2) throw domain_error("build_grid: need n >= 2, got " + std::to_string(n));
    if (!(z_max > 0.0)) throw domain_error("build_grid: need z_max > 0");

    Grid grid;
    grid.z_max = z_max;
    grid.rule = rule;
    grid.nodes.reserve(n);
    grid.weights.reserve(n);

    if (rule == QuadRule::UniformMidpoint) {
        const double h = z_max / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            grid.nodes.push_back((static_cast<double>(i) + 0.5) * h);
            grid.weights.push_back(h);
        }
        return grid;
    }

    std::vector<std::size_t> panel_sizes(n / detail::kPanelNodes, detail::kPanelNodes);
    if (const std::size_t rem = n % detail::kPanelNodes; rem != 0) panel_sizes.push_back(rem);

    const double h = z_max / static_cast<double>(panel_sizes.size());
    std::vector<double> x, w;
    for (std::size_t p = 0; p < panel_sizes.size(); ++p) {
        detail::gauss_legendre_reference(panel_sizes[p], x, w);
        const double a = static_cast<double>(p) * h;
        for (std::size_t i = 0; i < panel_sizes[p]; ++i) {
            grid.nodes.push_back(a + 0.5 * h * (x[i] + 1.0));
            grid.weights.push_back(0.5 * h * w[i]);
        }
    }
    return grid;
}

/// Discrete norm sum_i w_i |f(z_i)|^2.
inline double quadrature_norm(std::span<const std::complex<double>> f, const Grid& grid) {
    if (f.size() != grid.size())
        throw shape_error("quadrature_norm: " + std::to_string(f.size()) + " samples on a " +
                          std::to_string(grid.size()) + "-node grid");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += grid.weights[i] * std::norm(f[i]);
    return s;
}

inline double quadrature_norm(std::span<const double> f, const Grid& grid) {
    if (f.size() != grid.size())
        throw shape_error("quadrature_norm: " + std::to_string(f.size()) + " samples on a " +
                          std::to_string(grid.size()) + "-node grid");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += grid.weights[i] * f[i] * f[i];
    return s;
}

}  // namespace qflow

#endif  // QFLOW_GRID_HPP
