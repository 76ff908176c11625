#ifndef QFLOW_PARAMS_HPP
#define QFLOW_PARAMS_HPP

#include <cmath>
#include <string>

#include "qflow/errors.hpp"

namespace qflow {

/// Backflow scenario: positive-momentum packet pushed by a constant force
/// m*g toward positive x, flux watched at the origin during [T1, T2].
struct BackflowParams {
    double mass;
    double planck;
    double acceleration;   // g >= 0
    double window_start;   // T1 >= 0
    double window_end;     // T2 > T1

    BackflowParams(double m, double hbar, double g, double t1, double t2)
        : mass(m), planck(hbar), acceleration(g), window_start(t1), window_end(t2) {
        if (!(mass > 0.0)) throw domain_error("BackflowParams: mass must be > 0");
        if (!(planck > 0.0)) throw domain_error("BackflowParams: planck must be > 0");
        if (!(acceleration >= 0.0)) throw domain_error("BackflowParams: acceleration must be >= 0");
        if (!(window_start >= 0.0)) throw domain_error("BackflowParams: window_start must be >= 0");
        if (!(window_end > window_start))
            throw domain_error("BackflowParams: window_end must exceed window_start");
    }

    /// Natural units m = hbar = 1.
    static BackflowParams natural(double g, double t1, double t2) {
        return BackflowParams(1.0, 1.0, g, t1, t2);
    }

    double mid_time() const noexcept { return 0.5 * (window_start + window_end); }
    double window_width() const noexcept { return window_end - window_start; }
};

/// Reentry scenario: packet initially on x <= 0 expands freely, flux watched
/// at x = ell during [tau1, tau2]. tau1 = 0 is rejected (1/tau1 diverges).
struct ReentryParams {
    double mass;
    double planck;
    double observation_point;  // ell >= 0
    double window_start;       // tau1 > 0
    double window_end;         // tau2 > tau1

    ReentryParams(double m, double hbar, double ell, double tau1, double tau2)
        : mass(m), planck(hbar), observation_point(ell), window_start(tau1), window_end(tau2) {
        if (!(mass > 0.0)) throw domain_error("ReentryParams: mass must be > 0");
        if (!(planck > 0.0)) throw domain_error("ReentryParams: planck must be > 0");
        if (!(observation_point >= 0.0))
            throw domain_error("ReentryParams: observation_point must be >= 0");
        if (!(window_start > 0.0)) throw domain_error("ReentryParams: window_start must be > 0");
        if (!(window_end > window_start))
            throw domain_error("ReentryParams: window_end must exceed window_start");
    }

    static ReentryParams natural(double ell, double tau1, double tau2) {
        return ReentryParams(1.0, 1.0, ell, tau1, tau2);
    }

    double mid_time() const noexcept { return 0.5 * (window_start + window_end); }
    double window_width() const noexcept { return window_end - window_start; }
    /// 1/tau1 - 1/tau2 > 0, the rate scale of the reentry window.
    double inverse_time_span() const noexcept {
        return 1.0 / window_start - 1.0 / window_end;
    }
};

/// alpha = g * sqrt(m (T2 - T1) / hbar) * (T1 + T2) / 2
inline double alpha_from(const BackflowParams& p) {
    return p.acceleration * std::sqrt(p.mass * p.window_width() / p.planck) * p.mid_time();
}

/// beta = ell * sqrt(m (1/tau1 - 1/tau2) / hbar)
inline double beta_from(const ReentryParams& p) {
    return p.observation_point * std::sqrt(p.mass * p.inverse_time_span() / p.planck);
}

/// Picks the observation point ell so that the reentry problem on
/// [tau1, tau2] has beta equal to the backflow problem's alpha.
inline ReentryParams match_reentry_to_backflow(const BackflowParams& bf, double tau1,
                                               double tau2) {
    if (!(tau1 > 0.0) || !(tau2 > tau1))
        throw domain_error("match_reentry_to_backflow: need 0 < tau1 < tau2");
    const double alpha = alpha_from(bf);
    const double scale =
        std::sqrt(bf.mass * (1.0 / tau1 - 1.0 / tau2) / bf.planck);
    return ReentryParams(bf.mass, bf.planck, alpha / scale, tau1, tau2);
}

}  // namespace qflow

#endif  // QFLOW_PARAMS_HPP
