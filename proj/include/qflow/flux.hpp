#ifndef QFLOW_FLUX_HPP
#define QFLOW_FLUX_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qflow/errors.hpp"
#include "qflow/integrate.hpp"
#include "qflow/params.hpp"
#include "qflow/states.hpp"

namespace qflow {

inline constexpr double kTailMassThreshold = 1e-10;

enum class Scenario { Backflow, Reentry };

inline std::string to_string(Scenario s) {
    return s == Scenario::Backflow ? "backflow" : "reentry";
}

namespace detail {

template <typename State>
void check_tail(const State& s) {
    if (s.tail_mass > kTailMassThreshold)
        throw truncation_error("state grid loses probability mass " +
                                   std::to_string(s.tail_mass) + " beyond its cutoff",
                               s.tail_mass);
}

}  // namespace detail

/// Probability flux J(0, t) of a positive-momentum packet under constant
/// force. The (p + p' + m g t)(p - p') exponent separates, so the double
/// quadrature collapses to two weighted sums.
inline double flux_backflow(const MomentumState& state, const BackflowParams& params, double t) {
    if (!(t >= 0.0)) throw domain_error("flux_backflow: t must be >= 0");
    detail::check_tail(state);

    const double m = params.mass, hbar = params.planck, g = params.acceleration;
    std::complex<double> a{0.0, 0.0}, b{0.0, 0.0};
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double p = state.momenta[i];
        const double gamma = t / (2.0 * hbar * m) * (p * p + m * g * t * p);
        const std::complex<double> c =
            state.weights[i] * state.samples[i] * std::exp(std::complex<double>(0.0, -gamma));
        a += c;
        b += (p + m * g * t) * c;
    }
    return (std::conj(a) * b).real() / (2.0 * std::numbers::pi * hbar * m);
}

/// Probability flux J(ell, t) of a freely expanding packet initially on
/// x <= 0; same separation trick with (2 ell - x - x')(x - x').
inline double flux_reentry(const PositionState& state, const ReentryParams& params, double t) {
    if (!(t > 0.0)) throw domain_error("flux_reentry: t must be > 0");
    detail::check_tail(state);

    const double m = params.mass, hbar = params.planck, ell = params.observation_point;
    std::complex<double> a{0.0, 0.0}, b{0.0, 0.0};
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double x = state.positions[i];
        const double gamma = m / (2.0 * hbar * t) * (2.0 * ell * x - x * x);
        const std::complex<double> c =
            state.weights[i] * state.samples[i] * std::exp(std::complex<double>(0.0, -gamma));
        a += c;
        b += (ell - x) * c;
    }
    return m * (std::conj(a) * b).real() / (2.0 * std::numbers::pi * hbar * t * t);
}

/// Probability transfer P = -int_{T1}^{T2} J(0,t) dt via the closed-form
/// time-integrated kernel.
inline double prob_backflow(const MomentumState& state, const BackflowParams& params) {
    detail::check_tail(state);
    const double m = params.mass, hbar = params.planck, g = params.acceleration;
    const double t1 = params.window_start, t2 = params.window_end;
    const std::size_t n = state.size();
    const std::complex<double> i_unit{0.0, 1.0};

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pi_ = state.momenta[i];
        // Diagonal: the p' -> p limit of the kernel.
        const double diag =
            -(params.window_width() / (2.0 * std::numbers::pi * hbar * m)) *
            (pi_ + m * g * params.mid_time());
        total += state.weights[i] * state.weights[i] * std::norm(state.samples[i]) * diag;
        for (std::size_t j = 0; j < i; ++j) {
            const double pj = state.momenta[j];
            const double diff = pi_ - pj;
            std::complex<double> kij;
            if (std::abs(diff) < 1e-9 * (1.0 + pi_)) {
                kij = -(params.window_width() / (2.0 * std::numbers::pi * hbar * m)) *
                      (0.5 * (pi_ + pj) + m * g * params.mid_time());
            } else {
                const double th2 = t2 / (2.0 * hbar * m) * (pi_ + pj + m * g * t2) * diff;
                const double th1 = t1 / (2.0 * hbar * m) * (pi_ + pj + m * g * t1) * diff;
                kij = i_unit / (2.0 * std::numbers::pi) *
                      (std::exp(std::complex<double>(0.0, th2)) -
                       std::exp(std::complex<double>(0.0, th1))) /
                      diff;
            }
            // Hermitian kernel: the (i,j) and (j,i) terms combine to 2 Re.
            total += 2.0 * state.weights[i] * state.weights[j] *
                     (std::conj(state.samples[i]) * kij * state.samples[j]).real();
        }
    }
    return total;
}

/// Reentry probability transfer via the time-integrated kernel; endpoint
/// order (value at tau1 minus value at tau2) makes the right-to-left
/// transfer positive.
inline double prob_reentry(const PositionState& state, const ReentryParams& params) {
    detail::check_tail(state);
    const double m = params.mass, hbar = params.planck, ell = params.observation_point;
    const double tau1 = params.window_start, tau2 = params.window_end;
    const std::size_t n = state.size();
    const std::complex<double> i_unit{0.0, 1.0};

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = state.positions[i];
        const double diag = -(m * (ell - xi) / (2.0 * std::numbers::pi * hbar)) *
                            params.inverse_time_span();
        total += state.weights[i] * state.weights[i] * std::norm(state.samples[i]) * diag;
        for (std::size_t j = 0; j < i; ++j) {
            const double xj = state.positions[j];
            const double diff = xi - xj;
            std::complex<double> kij;
            if (std::abs(diff) < 1e-9 * (1.0 + std::abs(xi))) {
                kij = -(m * (ell - 0.5 * (xi + xj)) / (2.0 * std::numbers::pi * hbar)) *
                      params.inverse_time_span();
            } else {
                const double s = (2.0 * ell - xi - xj) * diff;
                const double ph1 = m / (2.0 * hbar * tau1) * s;
                const double ph2 = m / (2.0 * hbar * tau2) * s;
                kij = i_unit / (2.0 * std::numbers::pi) *
                      (std::exp(std::complex<double>(0.0, ph1)) -
                       std::exp(std::complex<double>(0.0, ph2))) /
                      diff;
            }
            total += 2.0 * state.weights[i] * state.weights[j] *
                     (std::conj(state.samples[i]) * kij * state.samples[j]).real();
        }
    }
    return total;
}

/// Oracle route: P = -int J dt by adaptive quadrature in t.
inline double prob_backflow_time_route(const MomentumState& state, const BackflowParams& params,
                                       double tol = 1e-10) {
    return -adaptive_simpson(
        [&](double t) { return flux_backflow(state, params, t); }, params.window_start,
        params.window_end, tol);
}

/// Oracle route for reentry, integrated uniformly in nu = 1/t where the
/// integrand stops oscillating.
inline double prob_reentry_time_route(const PositionState& state, const ReentryParams& params,
                                      double tol = 1e-10) {
    const double nu_lo = 1.0 / params.window_end;
    const double nu_hi = 1.0 / params.window_start;
    return -adaptive_simpson(
        [&](double nu) {
            return flux_reentry(state, params, 1.0 / nu) / (nu * nu);
        },
        nu_lo, nu_hi, tol);
}

/// Time-sampled flux with its window-integrated probability transfer.
struct FluxSeries {
    Scenario scenario;
    std::vector<double> times;
    std::vector<double> values;
    double integrated_transfer = 0.0;
};

inline FluxSeries flux_series_backflow(const MomentumState& state, const BackflowParams& params,
                                       std::span<const double> times) {
    FluxSeries series{Scenario::Backflow, {times.begin(), times.end()}, {}, 0.0};
    series.values.reserve(times.size());
    for (const double t : times) series.values.push_back(flux_backflow(state, params, t));
    series.integrated_transfer = prob_backflow_time_route(state, params);
    return series;
}

inline FluxSeries flux_series_reentry(const PositionState& state, const ReentryParams& params,
                                      std::span<const double> times) {
    FluxSeries series{Scenario::Reentry, {times.begin(), times.end()}, {}, 0.0};
    series.values.reserve(times.size());
    for (const double t : times) series.values.push_back(flux_reentry(state, params, t));
    series.integrated_transfer = prob_reentry_time_route(state, params);
    return series;
}

/// Side-by-side evaluation of the same dimensionless state through both
/// physical problems.
struct EquivalenceReport {
    double backflow_probability = 0.0;
    double reentry_probability = 0.0;
    double difference = 0.0;
    double relative_difference = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

inline EquivalenceReport equivalence_check(const DimensionlessState& f, const BackflowParams& bf,
                                           const ReentryParams& re, double tolerance = 1e-6) {
    const double alpha = alpha_from(bf);
    const double beta = beta_from(re);
    if (std::abs(alpha - beta) > 1e-10 * std::max(1.0, alpha))
        throw domain_error("equivalence_check: alpha and beta differ");
    const double nrm = quadrature_norm(std::span<const std::complex<double>>(f.f), f.grid);
    if (std::abs(nrm - 1.0) > 1e-8)
        throw domain_error("equivalence_check: f must have unit quadrature norm");

    EquivalenceReport report;
    report.tolerance = tolerance;
    report.backflow_probability = prob_backflow(phi_from_f(f, bf), bf);
    report.reentry_probability = prob_reentry(psi_from_f(f, re), re);
    report.difference = report.backflow_probability - report.reentry_probability;
    report.relative_difference =
        std::abs(report.difference) /
        std::max({std::abs(report.backflow_probability), std::abs(report.reentry_probability),
                  1e-12});
    report.pass = report.relative_difference < tolerance;
    return report;
}

}  // namespace qflow

#endif  // QFLOW_FLUX_HPP
