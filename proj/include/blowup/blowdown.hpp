#ifndef BLOWUP_BLOWDOWN_HPP
#define BLOWUP_BLOWDOWN_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "blowup/errors.hpp"
#include "blowup/integrator.hpp"
#include "blowup/lpsolver.hpp"
#include "blowup/segment.hpp"

namespace blowup {

struct BlowdownPoint {
    double x = 0.0, y = 0.0, tau = 0.0;
    double sigma = 0.0;
    int side = 0;  // sign of u(0)
    bool uncharacterized = false;
};

// (u, v, sigma) -> (x, y, tau) = (u(0), u(0) v(0), int_{-sigma}^0 |u|^{-kappa}).
// Only regular segments can cross the chart; anything touching {u=0} cannot.
inline BlowdownPoint blow_down_manifold_point(const Segment& phi, double sigma, int kappa) {
    if (sigma <= 0.0) throw ConfigError("sigma must be positive");
    Vec2 head = phi.head();
    if (std::abs(head.x) <= 1e-12) throw SingularChart("u(0) on the singular line");
    double tau = history_integral(phi, sigma, kappa);
    if (!std::isfinite(tau)) throw SingularChart("u vanishes on the history window");
    BlowdownPoint p;
    p.x = head.x;
    p.y = head.x * head.y;
    p.tau = tau;
    p.sigma = sigma;
    p.side = head.x > 0.0 ? +1 : -1;
    return p;
}

struct TracedPoint {
    Vec2 uv;       // state at t = 0
    double tau;    // int_{-sigma}^0 |u|^{-kappa} along the traced arc
};

// Backward solve of the augmented system from the state at time sigma down to
// time 0. rho_sigma is the accumulated original time at sigma (used as the
// forcing argument along the way; pass +infinity to disable the forcing term,
// which is exact for singular histories).
inline TracedPoint trace_to_zero_time(const Vec2& state_at_sigma, double sigma,
                                      const DelayRHS& rhs,
                                      double rho_sigma = std::numeric_limits<double>::infinity()) {
    if (sigma < 0.0) throw ConfigError("sigma must be nonnegative");
    if (std::abs(state_at_sigma.x) <= 1e-12) throw AxisHit("tracing from the singular line");
    detail::Dopri5<3> stepper;
    using State = std::array<double, 3>;
    bool force = rhs.g_active() && std::isfinite(rho_sigma);
    // reversed time r = sigma - t; q accumulates the original-time integral
    auto f = [&](double, const State& s) -> State {
        Vec2 p = rhs.f.eval(s[0], s[1]);
        if (force) p += rhs.g.eval(s[0], s[1]) * rhs.forcing.h(rho_sigma - s[2]);
        double speed = std::pow(std::abs(s[0]), -rhs.kappa);
        return {-p.x, -p.y, speed};
    };

    State y = {state_at_sigma.x, state_at_sigma.y, 0.0};
    double r = 0.0, h = std::min(1e-3, sigma / 10.0 + 1e-12);
    State k1 = f(r, y);
    const double sign0 = y[0] > 0 ? 1.0 : -1.0;
    while (r < sigma) {
        h = std::min(h, sigma - r);
        State out;
        State k1_try = k1;
        double err = stepper.step(f, r, y, h, out, k1_try);
        if (err > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            continue;
        }
        if (out[0] * sign0 <= 0.0 || std::abs(out[0]) < 1e-12) {
            if (h < 1e-13) throw AxisApproach("backward trace reached the singular line");
            h *= 0.5;
            continue;
        }
        r += h;
        y = out;
        k1 = k1_try;
        h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
    }
    return {{y[0], y[1]}, y[2]};
}

struct ManifoldClouds {
    std::vector<BlowdownPoint> plus, minus;
    std::vector<BlowdownPoint> zero_time;  // traced W~0 candidates, uncharacterized
    double excluded_radius = 0.0;          // annulus around x = 0 with no samples
};

// Blows the sampled graph down to original coordinates. Histories are built as
// classical solutions: each sample head is traced back over [-sigma, 0] by the
// augmented ODE, which yields tau directly.
inline ManifoldClouds reconstruct_manifolds(const ManifoldChart& chart, const DelayRHS& rhs) {
    ManifoldClouds clouds;
    double min_abs_x = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < chart.psi_heads.size(); ++i) {
        Vec2 head = chart.psi_heads[i] + chart.w_heads[i];
        if (std::abs(head.x) <= 1e-12) continue;  // chart hole at the axis
        TracedPoint traced;
        try {
            traced = trace_to_zero_time(head, chart.sigma, rhs);
        } catch (const AxisApproach&) {
            continue;
        }
        BlowdownPoint p;
        p.x = head.x;
        p.y = head.x * head.y;
        p.tau = traced.tau;
        p.sigma = chart.sigma;
        p.side = head.x > 0.0 ? +1 : -1;
        (p.side > 0 ? clouds.plus : clouds.minus).push_back(p);
        min_abs_x = std::min(min_abs_x, std::abs(head.x));

        BlowdownPoint z;
        z.x = traced.uv.x;
        z.y = traced.uv.y;
        z.tau = 0.0;
        z.sigma = chart.sigma;
        z.side = p.side;
        z.uncharacterized = true;
        clouds.zero_time.push_back(z);
    }
    clouds.excluded_radius = std::isfinite(min_abs_x) ? min_abs_x : 0.0;
    return clouds;
}

}  // namespace blowup

#endif
