#ifndef BLOWUP_TIMEWARP_HPP
#define BLOWUP_TIMEWARP_HPP

#include <cmath>
#include <vector>

#include "blowup/errors.hpp"
#include "blowup/trajectory.hpp"
#include "blowup/util/interp.hpp"
#include "blowup/util/quadrature.hpp"

namespace blowup {

// Paired monotone samples of the trajectory-wise clock change: rho maps
// desingularized time t to original time tau; the inverse direction is omega.
struct WarpPair {
    std::vector<double> t_samples;    // increasing
    std::vector<double> rho_samples;  // increasing, rho(0) = 0
    double origin_fixed = 0.0;

    double rho(double t) const { return MonotoneCubic(t_samples, rho_samples)(t); }
    double omega(double tau) const { return MonotoneCubic(rho_samples, t_samples)(tau); }
};

namespace detail {
inline void require_strictly_increasing(const std::vector<double>& v, const char* what) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        if (!(v[i] < v[i + 1])) throw NonMonotone(std::string(what) + " samples are not strictly increasing");
}
}  // namespace detail

// rho(t) = integral_0^t |u(s)|^{-kappa} ds along a sampled trajectory.
// The integrand is evaluated through a monotone cubic interpolant of u.
inline WarpPair rho_from_trajectory(const Trajectory& traj, int kappa, double rel_tol = 1e-10) {
    if (traj.size() < 2) throw OutOfRange("trajectory too short for a time warp");
    detail::require_strictly_increasing(traj.times, "time");
    std::vector<double> u(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        u[i] = traj.states[i].x;
        if (std::abs(u[i]) < 1e-300) throw AxisHit("|u| below hard floor in time warp");
    }
    MonotoneCubic ui(traj.times, u);
    auto integrand = [&](double s) { return std::pow(std::abs(ui(s)), -kappa); };

    WarpPair w;
    w.t_samples = traj.times;
    w.rho_samples.resize(traj.size());
    w.rho_samples[0] = 0.0;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        // per-sample-interval adaptive quadrature keeps stiff stretches local
        double piece = integrate(integrand, traj.times[i], traj.times[i + 1], rel_tol);
        w.rho_samples[i + 1] = w.rho_samples[i] + piece;
    }
    if (traj.times.front() != 0.0) {
        // shift so that rho(0) = 0 when the samples do not start at the origin
        double at0 = lerp_lookup(w.t_samples, w.rho_samples, 0.0);
        for (auto& r : w.rho_samples) r -= at0;
    }
    detail::require_strictly_increasing(w.rho_samples, "rho");
    return w;
}

// Swaps the roles of t and rho (omega becomes the forward map).
inline WarpPair invert_monotone(const WarpPair& warp) {
    detail::require_strictly_increasing(warp.t_samples, "time");
    detail::require_strictly_increasing(warp.rho_samples, "rho");
    WarpPair out;
    out.t_samples = warp.rho_samples;
    out.rho_samples = warp.t_samples;
    out.origin_fixed = warp.origin_fixed;
    return out;
}

// psi(t) = xi(rho(t)): maps a trajectory sampled in the warp's target frame
// into the source frame, with monotone cubic interpolation of the states.
inline Trajectory retime_trajectory(const Trajectory& traj, const WarpPair& warp) {
    if (traj.size() < 2) throw OutOfRange("trajectory too short to retime");
    std::vector<double> x(traj.size()), y(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        x[i] = traj.states[i].x;
        y[i] = traj.states[i].y;
    }
    MonotoneCubic xi(traj.times, x), yi(traj.times, y);
    MonotoneCubic rho(warp.t_samples, warp.rho_samples);

    Trajectory out;
    for (double t : warp.t_samples) {
        double tau = rho(t);
        if (!xi.covers(tau))
            throw OutOfRange("warp image leaves the trajectory's time span");
        out.times.push_back(t);
        out.states.push_back({xi(tau), yi(tau)});
    }
    return out;
}

}  // namespace blowup

#endif
