#ifndef QFLOW_STATES_HPP
#define QFLOW_STATES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <vector>

#include "qflow/eigenproblem.hpp"
#include "qflow/errors.hpp"
#include "qflow/grid.hpp"
#include "qflow/params.hpp"

namespace qflow {

/// Momentum-space wave function phi(p) sampled on p >= 0.
/// tail_mass is the analytic probability beyond the grid cutoff, when known.
struct MomentumState {
    std::vector<std::complex<double>> samples;
    std::vector<double> momenta;
    std::vector<double> weights;
    double tail_mass = 0.0;

    std::size_t size() const noexcept { return samples.size(); }
};

/// Position-space wave function psi(x) sampled on x <= 0.
struct PositionState {
    std::vector<std::complex<double>> samples;
    std::vector<double> positions;
    std::vector<double> weights;
    double tail_mass = 0.0;

    std::size_t size() const noexcept { return samples.size(); }
};

/// Dimensionless half-line state f(z) on a quadrature grid.
struct DimensionlessState {
    std::vector<std::complex<double>> f;
    Grid grid;
};

inline double state_norm(const MomentumState& s) {
    double n = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) n += s.weights[i] * std::norm(s.samples[i]);
    return n;
}

inline double state_norm(const PositionState& s) {
    double n = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) n += s.weights[i] * std::norm(s.samples[i]);
    return n;
}

namespace detail {

template <typename State>
void renormalize(State& s) {
    const double n = state_norm(s);
    if (!(n > 0.0)) throw domain_error("state has zero norm on its grid");
    const double scale = 1.0 / std::sqrt(n);
    for (auto& c : s.samples) c *= scale;
}

}  // namespace detail

// ---- Built-in state families -------------------------------------------

/// Gaussian in momentum, truncated to [0, p_max] and renormalized on the grid.
inline MomentumState momentum_gaussian(double p0, double sigma, std::size_t n = 400,
                                       double p_max = 0.0) {
    if (!(sigma > 0.0)) throw domain_error("momentum_gaussian: sigma must be > 0");
    if (p_max <= 0.0) p_max = p0 + 12.0 * sigma;
    const Grid g = build_grid(n, p_max);
    MomentumState s;
    s.momenta = g.nodes;
    s.weights = g.weights;
    s.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (g.nodes[i] - p0) / (2.0 * sigma);
        s.samples[i] = std::exp(-d * d);
    }
    const double denom = std::erfc(-p0 / (sigma * std::sqrt(2.0)));
    s.tail_mass = std::erfc((p_max - p0) / (sigma * std::sqrt(2.0))) / denom;
    detail::renormalize(s);
    return s;
}

/// phi(p) = sqrt(2/sigma) exp(-p/sigma), truncated to [0, p_max].
inline MomentumState momentum_exponential(double sigma, std::size_t n = 400,
                                          double p_max = 0.0) {
    if (!(sigma > 0.0)) throw domain_error("momentum_exponential: sigma must be > 0");
    if (p_max <= 0.0) p_max = 14.0 * sigma;
    const Grid g = build_grid(n, p_max);
    MomentumState s;
    s.momenta = g.nodes;
    s.weights = g.weights;
    s.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        s.samples[i] = std::sqrt(2.0 / sigma) * std::exp(-g.nodes[i] / sigma);
    s.tail_mass = std::exp(-2.0 * p_max / sigma);
    detail::renormalize(s);
    return s;
}

/// Gaussian in position centered at x0 < 0 with mean momentum p0, truncated
/// to [-extent, 0].
inline PositionState position_gaussian(double x0, double sigma, double p0, double planck = 1.0,
                                       std::size_t n = 400, double extent = 0.0) {
    if (!(sigma > 0.0)) throw domain_error("position_gaussian: sigma must be > 0");
    if (!(x0 <= 0.0)) throw domain_error("position_gaussian: x0 must be <= 0");
    if (extent <= 0.0) extent = -x0 + 12.0 * sigma;
    const Grid g = build_grid(n, extent);
    PositionState s;
    s.positions.resize(n);
    s.weights = g.weights;
    s.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = -g.nodes[i];
        s.positions[i] = x;
        const double d = (x - x0) / (2.0 * sigma);
        s.samples[i] = std::exp(std::complex<double>(-d * d, p0 * x / planck));
    }
    const double denom = std::erfc(x0 / (sigma * std::sqrt(2.0)));
    s.tail_mass = std::erfc((x0 + extent) / (sigma * std::sqrt(2.0))) / denom;
    detail::renormalize(s);
    return s;
}

/// Chopped monochromatic beam psi(x) = exp(ikx)/sqrt(L) on [-L, 0].
inline PositionState chopped_beam(double k, double length, std::size_t n = 800) {
    if (!(length > 0.0)) throw domain_error("chopped_beam: length must be > 0");
    const Grid g = build_grid(n, length);
    PositionState s;
    s.positions.resize(n);
    s.weights = g.weights;
    s.samples.resize(n);
    const double amp = 1.0 / std::sqrt(length);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = -g.nodes[i];
        s.positions[i] = x;
        s.samples[i] = amp * std::exp(std::complex<double>(0.0, k * x));
    }
    s.tail_mass = 0.0;  // compact support
    detail::renormalize(s);
    return s;
}

// ---- Dimensionless state families --------------------------------------

inline DimensionlessState dimensionless_gaussian(const Grid& grid, double z0, double sigma) {
    if (!(sigma > 0.0)) throw domain_error("dimensionless_gaussian: sigma must be > 0");
    DimensionlessState s{{}, grid};
    s.f.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = (grid.nodes[i] - z0) / (2.0 * sigma);
        s.f[i] = std::exp(-d * d);
    }
    const double nrm = quadrature_norm(std::span<const std::complex<double>>(s.f), grid);
    for (auto& c : s.f) c /= std::sqrt(nrm);
    return s;
}

inline DimensionlessState dimensionless_exponential(const Grid& grid, double scale = 1.0) {
    if (!(scale > 0.0)) throw domain_error("dimensionless_exponential: scale must be > 0");
    DimensionlessState s{{}, grid};
    s.f.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        s.f[i] = std::exp(-grid.nodes[i] / scale);
    const double nrm = quadrature_norm(std::span<const std::complex<double>>(s.f), grid);
    for (auto& c : s.f) c /= std::sqrt(nrm);
    return s;
}

inline DimensionlessState dimensionless_from_eigen(const EigenResult& r) {
    DimensionlessState s{{}, r.grid};
    s.f.assign(r.f.begin(), r.f.end());
    return s;
}

// ---- Physical <-> dimensionless maps ------------------------------------

namespace detail {

inline double momentum_scale(const BackflowParams& p) {
    // z = momentum_scale * p
    return 0.5 * std::sqrt(p.window_width() / (p.planck * p.mass));
}

inline double backflow_phase(const BackflowParams& p, double momentum) {
    // f = amp * exp(-i * backflow_phase(p)) * phi
    const double t1 = p.window_start, t2 = p.window_end;
    return (t1 + t2) / (4.0 * p.planck * p.mass) * momentum * momentum +
           p.acceleration * (t1 * t1 + t2 * t2) / (4.0 * p.planck) * momentum;
}

inline double backflow_amplitude(const BackflowParams& p) {
    return std::pow(4.0 * p.planck * p.mass / p.window_width(), 0.25);
}

inline double position_scale(const ReentryParams& p) {
    // z = -position_scale * x
    return 0.5 * std::sqrt(p.mass * p.inverse_time_span() / p.planck);
}

inline double reentry_phase(const ReentryParams& p, double x) {
    // f = amp * exp(+i * reentry_phase(p)) * psi
    const double inv_sum = 1.0 / p.window_start + 1.0 / p.window_end;
    return p.mass / (4.0 * p.planck) * inv_sum * (x - 2.0 * p.observation_point) * x;
}

inline double reentry_amplitude(const ReentryParams& p) {
    return std::pow(4.0 * p.planck / (p.mass * p.inverse_time_span()), 0.25);
}

}  // namespace detail

/// Maps phi(p) to the dimensionless f(z); unitary, so the quadrature norm
/// is preserved exactly by the Jacobian.
inline DimensionlessState f_from_phi(const MomentumState& state, const BackflowParams& params) {
    const double s = detail::momentum_scale(params);
    const double amp = detail::backflow_amplitude(params);
    DimensionlessState out;
    out.grid.rule = QuadRule::GaussLegendreComposite;
    out.grid.z_max = s * (state.momenta.back() + 0.5 * state.weights.back());
    out.grid.nodes.resize(state.size());
    out.grid.weights.resize(state.size());
    out.f.resize(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        out.grid.nodes[i] = s * state.momenta[i];
        out.grid.weights[i] = s * state.weights[i];
        out.f[i] = amp *
                   std::exp(std::complex<double>(0.0, -detail::backflow_phase(params, state.momenta[i]))) *
                   state.samples[i];
    }
    return out;
}

/// Inverse of f_from_phi on the same grid.
inline MomentumState phi_from_f(const DimensionlessState& state, const BackflowParams& params) {
    const double s = detail::momentum_scale(params);
    const double amp = detail::backflow_amplitude(params);
    MomentumState out;
    out.momenta.resize(state.grid.size());
    out.weights.resize(state.grid.size());
    out.samples.resize(state.grid.size());
    for (std::size_t i = 0; i < state.grid.size(); ++i) {
        const double p = state.grid.nodes[i] / s;
        out.momenta[i] = p;
        out.weights[i] = state.grid.weights[i] / s;
        out.samples[i] =
            state.f[i] / amp *
            std::exp(std::complex<double>(0.0, detail::backflow_phase(params, p)));
    }
    return out;
}

/// Maps psi(x) on x <= 0 to the dimensionless f(z); z-grid comes out sorted
/// ascending (x = 0 maps to z = 0, the far left maps to large z).
inline DimensionlessState f_from_psi(const PositionState& state, const ReentryParams& params) {
    const double q = detail::position_scale(params);
    const double amp = detail::reentry_amplitude(params);
    std::vector<std::size_t> order(state.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return -q * state.positions[a] < -q * state.positions[b];
    });

    DimensionlessState out;
    out.grid.rule = QuadRule::GaussLegendreComposite;
    out.grid.nodes.resize(state.size());
    out.grid.weights.resize(state.size());
    out.f.resize(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        const std::size_t j = order[i];
        const double x = state.positions[j];
        out.grid.nodes[i] = -q * x;
        out.grid.weights[i] = q * state.weights[j];
        out.f[i] = amp *
                   std::exp(std::complex<double>(0.0, detail::reentry_phase(params, x))) *
                   state.samples[j];
    }
    out.grid.z_max = out.grid.nodes.back() + 0.5 * out.grid.weights.back();
    return out;
}

/// Inverse of f_from_psi; positions come out descending from near 0.
inline PositionState psi_from_f(const DimensionlessState& state, const ReentryParams& params) {
    const double q = detail::position_scale(params);
    const double amp = detail::reentry_amplitude(params);
    PositionState out;
    out.positions.resize(state.grid.size());
    out.weights.resize(state.grid.size());
    out.samples.resize(state.grid.size());
    for (std::size_t i = 0; i < state.grid.size(); ++i) {
        const double x = -state.grid.nodes[i] / q;
        out.positions[i] = x;
        out.weights[i] = state.grid.weights[i] / q;
        out.samples[i] =
            state.f[i] / amp *
            std::exp(std::complex<double>(0.0, -detail::reentry_phase(params, x)));
    }
    return out;
}

}  // namespace qflow

#endif  // QFLOW_STATES_HPP
