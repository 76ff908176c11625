#ifndef QFLOW_EIGENPROBLEM_HPP
#define QFLOW_EIGENPROBLEM_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qflow/errors.hpp"
#include "qflow/grid.hpp"

namespace qflow {

/// Kernel of the half-line eigenvalue problem,
///   -(1/pi) sin[(z + z' + alpha)(z - z')] / (z - z'),
/// with the analytic limit -(2z + alpha)/pi on the diagonal.
inline double kernel_entry(double z, double z_prime, double alpha) {
    const double diff = z - z_prime;
    const double eps_diag = 1e-9 * (1.0 + z);
    if (std::abs(diff) < eps_diag) {
        return -(z + z_prime + alpha) / std::numbers::pi;
    }
    return -std::sin((z + z_prime + alpha) * diff) / (std::numbers::pi * diff);
}

/// Nystrom discretization, symmetrized by sqrt-weights:
/// A_ij = sqrt(w_i) K(z_i, z_j) sqrt(w_j). Same spectrum as K diag(w).
struct KernelMatrix {
    double alpha = 0.0;
    Grid grid;
    Eigen::MatrixXd entries;
};

inline KernelMatrix build_kernel(const Grid& grid, double alpha) {
    if (!(alpha >= 0.0)) throw domain_error("build_kernel: alpha must be >= 0");
    const auto n = static_cast<Eigen::Index>(grid.size());
    KernelMatrix km{alpha, grid, Eigen::MatrixXd(n, n)};
    std::vector<double> sw(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) sw[i] = std::sqrt(grid.weights[i]);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double zi = grid.nodes[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = sw[static_cast<std::size_t>(i)] *
                             kernel_entry(zi, grid.nodes[static_cast<std::size_t>(j)], alpha) *
                             sw[static_cast<std::size_t>(j)];
            km.entries(i, j) = v;
            km.entries(j, i) = v;
        }
    }
    return km;
}

/// Largest eigenvalue and the optimal dimensionless state on the grid.
struct EigenResult {
    double lambda_max = 0.0;
    std::vector<double> f;  // unit quadrature norm, largest-|f| component positive
    double alpha = 0.0;
    Grid grid;
    double residual = 0.0;  // ||A v - lambda v|| / |lambda|
};

inline EigenResult solve_largest(const KernelMatrix& matrix) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix.entries);
    if (solver.info() != Eigen::Success)
        throw solver_error("solve_largest: eigensolver failed to converge", 30);

    const Eigen::Index n = matrix.entries.rows();
    const double lambda = solver.eigenvalues()(n - 1);
    Eigen::VectorXd v = solver.eigenvectors().col(n - 1);

    const double residual = (matrix.entries * v - lambda * v).norm() /
                            std::max(std::abs(lambda), 1e-300);

    EigenResult result;
    result.lambda_max = lambda;
    result.alpha = matrix.alpha;
    result.grid = matrix.grid;
    result.residual = residual;
    result.f.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        result.f[static_cast<std::size_t>(i)] =
            v(i) / std::sqrt(matrix.grid.weights[static_cast<std::size_t>(i)]);

    // Gauge: the largest-magnitude sample of f is positive.
    std::size_t imax = 0;
    for (std::size_t i = 1; i < result.f.size(); ++i)
        if (std::abs(result.f[i]) > std::abs(result.f[imax])) imax = i;
    if (result.f[imax] < 0.0)
        for (double& x : result.f) x = -x;

    const double nrm = quadrature_norm(std::span<const double>(result.f), matrix.grid);
    const double scale = 1.0 / std::sqrt(nrm);
    for (double& x : result.f) x *= scale;
    return result;
}

/// Maximal classically-forbidden probability transfer at the given
/// dimensionless parameter (alpha for backflow, beta for reentry).
inline EigenResult max_probability(double alpha, const Grid& grid) {
    return solve_largest(build_kernel(grid, alpha));
}

namespace detail {

inline double largest_eigenvalue_only(const Grid& grid, double alpha) {
    const KernelMatrix km = build_kernel(grid, alpha);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(km.entries, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw solver_error("largest_eigenvalue_only: eigensolver failed to converge", 30);
    return solver.eigenvalues()(km.entries.rows() - 1);
}

inline int rule_order(QuadRule rule) {
    return rule == QuadRule::UniformMidpoint ? 2 : 2 * static_cast<int>(kPanelNodes);
}

}  // namespace detail

struct GridSpec {
    std::size_t n;
    double z_max;
};

struct CbmRow {
    std::size_t n;
    double z_max;
    double lambda_coarse;      // at n/2 nodes
    double lambda_fine;        // at n nodes
    double lambda_richardson;  // Richardson-extrapolated in n
};

struct CbmEstimate {
    double value = 0.0;
    double error = 0.0;
    double exponent = 0.0;  // fitted power q of the z_max tail lambda_inf + c/z_max^q
    bool degenerate = false;
    std::vector<CbmRow> table;
};

/// Estimates the free-space constant lambda_max(alpha = 0) by a two-stage
/// extrapolation: Richardson in node count at fixed z_max, then a fitted
/// power law in z_max. The error estimate is the larger of the fit residual
/// and the last raw increment.
inline CbmEstimate estimate_cbm(std::span<const GridSpec> specs,
                                QuadRule rule = QuadRule::GaussLegendreComposite) {
    if (specs.size() < 3)
        throw domain_error("estimate_cbm: need at least 3 grid configurations");

    CbmEstimate est;
    for (const GridSpec& spec : specs) {
        CbmRow row{};
        row.n = spec.n;
        row.z_max = spec.z_max;
        row.lambda_coarse =
            detail::largest_eigenvalue_only(build_grid(std::max<std::size_t>(spec.n / 2, 2), spec.z_max, rule), 0.0);
        row.lambda_fine = detail::largest_eigenvalue_only(build_grid(spec.n, spec.z_max, rule), 0.0);
        const double factor = std::pow(2.0, detail::rule_order(rule)) - 1.0;
        row.lambda_richardson = row.lambda_fine + (row.lambda_fine - row.lambda_coarse) / factor;
        est.table.push_back(row);
    }

    std::vector<double> lam, zmax;
    for (const CbmRow& r : est.table) {
        lam.push_back(r.lambda_richardson);
        zmax.push_back(r.z_max);
    }
    const std::size_t k = lam.size();

    // Degenerate: no spread in the data.
    double spread = 0.0;
    for (std::size_t i = 1; i < k; ++i) spread = std::max(spread, std::abs(lam[i] - lam[0]));
    if (spread < 1e-15 * std::abs(lam[0])) {
        est.value = lam.back();
        est.error = 0.0;
        est.degenerate = true;
        est.exponent = 0.0;
        return est;
    }

    // Increments must not change sign, otherwise the power-law model is out.
    const double first_inc = lam[1] - lam[0];
    for (std::size_t i = 1; i + 1 < k; ++i) {
        if ((lam[i + 1] - lam[i]) * first_inc <= 0.0)
            throw extrapolation_error("estimate_cbm: non-monotone eigenvalue sequence", lam);
    }
    for (std::size_t i = 1; i < k; ++i) {
        if (!(zmax[i] > zmax[i - 1]))
            throw extrapolation_error("estimate_cbm: z_max sequence must increase", lam);
    }

    // Fit lambda(z_max) = lambda_inf + c * z_max^-q; for a given q the
    // (lambda_inf, c) pair is a linear least-squares solve, so scan q.
    auto fit_for_q = [&](double q, double& lambda_inf, double& c) {
        double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const double x = std::pow(zmax[i], -q);
            s1 += 1.0;
            sx += x;
            sxx += x * x;
            sy += lam[i];
            sxy += x * lam[i];
        }
        const double det = s1 * sxx - sx * sx;
        c = (s1 * sxy - sx * sy) / det;
        lambda_inf = (sy - c * sx) / s1;
        double rss = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double r = lam[i] - (lambda_inf + c * std::pow(zmax[i], -q));
            rss += r * r;
        }
        return rss;
    };

    double best_q = 1.0, best_rss = std::numeric_limits<double>::infinity();
    double li = 0.0, cc = 0.0;
    // Coarse scan then golden-section refinement.
    for (double q = 0.1; q <= 8.0; q += 0.05) {
        const double rss = fit_for_q(q, li, cc);
        if (rss < best_rss) {
            best_rss = rss;
            best_q = q;
        }
    }
    {
        double a = std::max(0.05, best_q - 0.05), b = std::min(8.05, best_q + 0.05);
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = fit_for_q(x1, li, cc), f2 = fit_for_q(x2, li, cc);
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) {
                b = x2; x2 = x1; f2 = f1;
                x1 = b - gr * (b - a);
                f1 = fit_for_q(x1, li, cc);
            } else {
                a = x1; x1 = x2; f1 = f2;
                x2 = a + gr * (b - a);
                f2 = fit_for_q(x2, li, cc);
            }
        }
        best_q = 0.5 * (a + b);
        best_rss = fit_for_q(best_q, li, cc);
    }

    est.value = li;
    est.exponent = best_q;
    const double last_increment = std::abs(lam[k - 1] - lam[k - 2]);
    est.error = std::max(std::sqrt(best_rss), last_increment);
    return est;
}

struct SweepRow {
    double alpha;
    double lambda_max;
};

/// One eigensolve per alpha; input must be sorted ascending.
inline std::vector<SweepRow> sweep_alpha(std::span<const double> alphas, const Grid& grid) {
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] >= 0.0)) throw domain_error("sweep_alpha: alphas must be >= 0");
        if (i > 0 && !(alphas[i] > alphas[i - 1]))
            throw domain_error("sweep_alpha: alphas must be strictly ascending");
    }
    std::vector<SweepRow> rows;
    rows.reserve(alphas.size());
    for (const double a : alphas)
        rows.push_back({a, detail::largest_eigenvalue_only(grid, a)});
    return rows;
}

struct ExpFit {
    double prefactor;
    double rate;
    double residual_norm;
};

/// Least-squares fit of ln(lambda) = ln(c) - r * alpha.
inline ExpFit fit_exponential(std::span<const SweepRow> table) {
    if (table.size() < 3) throw domain_error("fit_exponential: need at least 3 rows");
    for (const SweepRow& row : table)
        if (!(row.lambda_max > 0.0))
            throw domain_error("fit_exponential: lambda_max must be positive");

    double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (const SweepRow& row : table) {
        const double x = row.alpha, y = std::log(row.lambda_max);
        s1 += 1.0;
        sx += x;
        sxx += x * x;
        sy += y;
        sxy += x * y;
    }
    const double det = s1 * sxx - sx * sx;
    if (std::abs(det) < 1e-300)
        throw domain_error("fit_exponential: degenerate alpha values");
    const double slope = (s1 * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / s1;

    ExpFit fit{std::exp(intercept), -slope, 0.0};
    double rss = 0.0;
    for (const SweepRow& row : table) {
        const double r = std::log(row.lambda_max) - (intercept + slope * row.alpha);
        rss += r * r;
    }
    fit.residual_norm = std::sqrt(rss);
    return fit;
}

}  // namespace qflow

#endif  // QFLOW_EIGENPROBLEM_HPP
