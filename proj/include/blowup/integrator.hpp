#ifndef BLOWUP_INTEGRATOR_HPP
#define BLOWUP_INTEGRATOR_HPP

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "blowup/errors.hpp"
#include "blowup/forcing.hpp"
#include "blowup/nonlinear.hpp"
#include "blowup/poly.hpp"
#include "blowup/timewarp.hpp"
#include "blowup/trajectory.hpp"
#include "blowup/util/interp.hpp"

namespace blowup {

namespace detail {

// Dormand-Prince 5(4) pair with FSAL and elementary step-size control.
template <std::size_t N>
struct Dopri5 {
    using State = std::array<double, N>;
    using Rhs = std::function<State(double, const State&)>;

    double rel_tol = 1e-10;
    double abs_tol = 1e-12;

    static State axpy(const State& a, double c, const State& b) {
        State r;
        for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + c * b[i];
        return r;
    }

    // one step; returns the embedded error estimate (scaled max norm)
    double step(const Rhs& f, double t, const State& y, double h, State& out, State& k1_io) const {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                                a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        const State& k1 = k1_io;
        State y2, y3, y4, y5, y6;
        for (std::size_t i = 0; i < N; ++i) y2[i] = y[i] + h * a21 * k1[i];
        State k2 = f(t + h / 5, y2);
        for (std::size_t i = 0; i < N; ++i) y3[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        State k3 = f(t + 3 * h / 10, y3);
        for (std::size_t i = 0; i < N; ++i)
            y4[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        State k4 = f(t + 4 * h / 5, y4);
        for (std::size_t i = 0; i < N; ++i)
            y5[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        State k5 = f(t + 8 * h / 9, y5);
        for (std::size_t i = 0; i < N; ++i)
            y6[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        State k6 = f(t + h, y6);
        for (std::size_t i = 0; i < N; ++i)
            out[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        State k7 = f(t + h, out);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                            e7 * k7[i]);
            double sc = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(out[i]));
            err = std::max(err, std::abs(e) / sc);
        }
        k1_io = k7;  // FSAL
        return err;
    }
};

}  // namespace detail

// Adaptive integration of the augmented desingularized system
//   (u, v)' = f(u,v) + g(u,v) h(rho),  rho' = |u|^{-kappa},
// staying inside the half plane of the initial u. An approach to {u=0} below
// the hard floor terminates the trajectory with the axis flag set.
inline Trajectory integrate_desingularized(const DelayRHS& rhs, Vec2 init, double T,
                                           double rel_tol = 1e-10, double abs_tol = 1e-12,
                                           double max_step = 0.01) {
    if (init.x == 0.0) throw AxisHit("initial condition on the singular line");
    detail::Dopri5<3> stepper;
    stepper.rel_tol = rel_tol;
    stepper.abs_tol = abs_tol;
    using State = std::array<double, 3>;
    auto f = [&](double, const State& s) -> State {
        Vec2 p = rhs.f.eval(s[0], s[1]);
        if (rhs.g_active()) p += rhs.g.eval(s[0], s[1]) * rhs.forcing.h(s[2]);
        return {p.x, p.y, std::pow(std::abs(s[0]), -rhs.kappa)};
    };

    Trajectory traj;
    State y = {init.x, init.y, 0.0};
    double t = 0.0, h = std::min(1e-3, T / 10.0);
    State k1 = f(t, y);
    const double sign0 = y[0] > 0 ? 1.0 : -1.0;
    traj.times.push_back(t);
    traj.states.push_back({y[0], y[1]});
    traj.rho.push_back(y[2]);

    while (t < T) {
        h = std::min({h, T - t, max_step});
        State out;
        State k1_try = k1;
        double err = stepper.step(f, t, y, h, out, k1_try);
        if (err > 1.0) {
            ++traj.rejected_steps;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            continue;
        }
        bool flip = out[0] * sign0 <= 0.0;
        bool close = std::abs(out[0]) < 1e-12;
        if (flip || close) {
            if (h < 1e-13 || close) {
                // localize: accept the endpoint if still on the right side
                if (!flip) {
                    t += h;
                    y = out;
                    k1 = k1_try;
                    traj.times.push_back(t);
                    traj.states.push_back({y[0], y[1]});
                    traj.rho.push_back(y[2]);
                }
                traj.axis_flag = true;
                return traj;
            }
            ++traj.rejected_steps;
            h *= 0.5;
            continue;
        }
        t += h;
        y = out;
        k1 = k1_try;
        ++traj.accepted_steps;
        traj.max_error_estimate = std::max(traj.max_error_estimate, err);
        traj.times.push_back(t);
        traj.states.push_back({y[0], y[1]});
        traj.rho.push_back(y[2]);
        h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
    }
    return traj;
}

// (x, y)' = F(x,y) + G(x,y) h(tau) over tau in [tau0, tau1].
inline Trajectory integrate_original(const PolyMap2& F, const PolyMap2& G, const ForcingFn& forcing,
                                     Vec2 init, double tau0, double tau1, double rel_tol = 1e-10,
                                     double abs_tol = 1e-12, double max_step = 0.01) {
    if (tau1 <= tau0) throw ConfigError("empty integration span");
    detail::Dopri5<2> stepper;
    stepper.rel_tol = rel_tol;
    stepper.abs_tol = abs_tol;
    using State = std::array<double, 2>;
    bool g_zero = G.px.is_zero() && G.py.is_zero();
    auto f = [&](double tau, const State& s) -> State {
        Vec2 p = F.eval(s[0], s[1]);
        if (!g_zero) p += G.eval(s[0], s[1]) * forcing.h(tau);
        return {p.x, p.y};
    };

    Trajectory traj;
    State y = {init.x, init.y};
    double t = tau0, h = std::min(1e-3, (tau1 - tau0) / 10.0);
    State k1 = f(t, y);
    traj.times.push_back(t);
    traj.states.push_back({y[0], y[1]});
    while (t < tau1) {
        h = std::min({h, tau1 - t, max_step});
        State out;
        State k1_try = k1;
        double err = stepper.step(f, t, y, h, out, k1_try);
        if (err > 1.0) {
            ++traj.rejected_steps;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            continue;
        }
        t += h;
        y = out;
        k1 = k1_try;
        ++traj.accepted_steps;
        traj.max_error_estimate = std::max(traj.max_error_estimate, err);
        traj.times.push_back(t);
        traj.states.push_back({y[0], y[1]});
        h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
    }
    return traj;
}

// Finite-time Lyapunov exponents of x' = A(t) x via a QR-reorthonormalized
// two-frame variational integration; returns (min, max).
inline std::pair<double, double> lyapunov_exponents(const std::function<Mat2(double)>& A_path,
                                                    double T, double dt = 1e-3) {
    if (T <= 0.0) throw ConfigError("horizon must be positive");
    Vec2 e1{1.0, 0.0}, e2{0.0, 1.0};
    double s1 = 0.0, s2 = 0.0;
    int n = static_cast<int>(std::ceil(T / dt));
    double h = T / n;
    auto rk4 = [&](double t, const Vec2& v) {
        Vec2 k1 = A_path(t) * v;
        Vec2 k2 = A_path(t + h / 2) * (v + (h / 2) * k1);
        Vec2 k3 = A_path(t + h / 2) * (v + (h / 2) * k2);
        Vec2 k4 = A_path(t + h) * (v + h * k3);
        return v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    for (int i = 0; i < n; ++i) {
        double t = i * h;
        e1 = rk4(t, e1);
        e2 = rk4(t, e2);
        double r11 = e1.norm();
        e1 = e1 / r11;
        double r12 = dot(e1, e2);
        e2 -= r12 * e1;
        double r22 = e2.norm();
        e2 = e2 / r22;
        s1 += std::log(r11);
        s2 += std::log(r22);
    }
    double l1 = s1 / T, l2 = s2 / T;
    return {std::min(l1, l2), std::max(l1, l2)};
}

// Max pointwise deviation between traj_a and traj_b after mapping traj_a's
// clock through the warp (rho sends a-times to b-times).
inline double orbit_compare(const Trajectory& traj_a, const Trajectory& traj_b,
                            const WarpPair& warp) {
    if (traj_a.size() < 2 || traj_b.size() < 2) throw OutOfRange("trajectories too short");
    std::vector<double> bx(traj_b.size()), by(traj_b.size());
    for (std::size_t i = 0; i < traj_b.size(); ++i) {
        bx[i] = traj_b.states[i].x;
        by[i] = traj_b.states[i].y;
    }
    MonotoneCubic bxi(traj_b.times, bx), byi(traj_b.times, by);

    double dev = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < traj_a.size(); ++i) {
        double t = traj_a.times[i];
        if (t < warp.t_samples.front() || t > warp.t_samples.back()) continue;
        double tb = warp.rho(t);
        if (!bxi.covers(tb)) continue;
        any = true;
        Vec2 b{bxi(tb), byi(tb)};
        dev = std::max(dev, (traj_a.states[i] - b).norm());
    }
    if (!any) throw OutOfRange("warp image misses the comparison trajectory");
    return dev;
}

}  // namespace blowup

#endif
