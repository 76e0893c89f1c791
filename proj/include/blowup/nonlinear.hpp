#ifndef BLOWUP_NONLINEAR_HPP
#define BLOWUP_NONLINEAR_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "blowup/errors.hpp"
#include "blowup/forcing.hpp"
#include "blowup/linearflow.hpp"
#include "blowup/poly.hpp"
#include "blowup/segment.hpp"
#include "blowup/util/quadrature.hpp"

namespace blowup {

// Extended right-hand side data: recentered desingularized field f, forcing
// coupling g, and the cutoff ball. M bounds the modified field on the ball and
// must stay below the forcing decay rate.
struct DelayRHS {
    PolyMap2 f, g;
    ForcingFn forcing;
    int kappa = 1;
    double cutoff_radius = 1.0;  // D
    double M = 0.0;

    bool g_active() const { return !(g.px.is_zero() && g.py.is_zero()) && forcing.envelope_H > 0.0; }
};

namespace detail {

// C^1 radial cutoff factor: 1 on [0, 1/2], 0 beyond 1, smoothstep between.
inline double cutoff_factor(double s) {
    if (s <= 0.5) return 1.0;
    if (s >= 1.0) return 0.0;
    double w = 2.0 * (s - 0.5);
    return 1.0 - w * w * (3.0 - 2.0 * w);
}
inline double cutoff_factor_d(double s) {  // d/ds
    if (s <= 0.5 || s >= 1.0) return 0.0;
    double w = 2.0 * (s - 0.5);
    return -12.0 * w * (1.0 - w);
}

inline double field_sup_on_ball(const PolyMap2& f, const PolyMap2& g, double H, double D) {
    double m = 0.0;
    const int n = 48;
    for (int i = 0; i <= n; ++i) {
        double ang = 2.0 * M_PI * i / n;
        for (int j = 1; j <= 8; ++j) {
            double r = D * j / 8.0;
            double x = r * std::cos(ang), y = r * std::sin(ang);
            m = std::max(m, f.eval(x, y).norm() + H * g.eval(x, y).norm());
        }
    }
    return m;
}

inline double u_min_on(const Segment& phi, double t) {
    double m = std::abs(phi.at(0.0).x);
    for (double th : phi.grid()) {
        if (th < -t) break;
        m = std::min(m, std::abs(phi.at(th).x));
    }
    m = std::min(m, std::abs(phi.at(-t).x));
    return m;
}

}  // namespace detail

// Picks the cutoff radius: halves D until the sampled field bound (with the
// 1.1 margin) drops below the forcing decay rate.
inline DelayRHS make_delay_rhs(const PolyMap2& f, const PolyMap2& g, const ForcingFn& forcing,
                               int kappa, double D_init = 1.0) {
    if (kappa < 1) throw ConfigError("kappa must be a positive integer");
    if (D_init <= 0.0) throw ConfigError("cutoff radius must be positive");
    DelayRHS rhs;
    rhs.f = f;
    rhs.g = g;
    rhs.forcing = forcing;
    rhs.kappa = kappa;
    double D = D_init;
    for (int i = 0; i < 80; ++i) {
        double M = 1.1 * detail::field_sup_on_ball(f, g, forcing.envelope_H, D);
        if (M < forcing.decay_eta) {
            rhs.cutoff_radius = D;
            rhs.M = M;
            return rhs;
        }
        D *= 0.5;
    }
    throw ConfigError("could not shrink the cutoff ball below the forcing decay rate");
}

// The h(integral) factor for a regular segment, with the analytic logarithmic
// lower bound taking over when |u| gets too small for reliable quadrature.
inline double forcing_factor(const Segment& phi, double t, const DelayRHS& rhs) {
    double umin = detail::u_min_on(phi, t);
    if (umin < 1e-8) {
        // |u(s)| <= umin + M |s - s_min| gives the integral lower bound
        // (1/M) log(1 + M t / (2 umin)); the forcing envelope then certifies
        // that the factor is below any working precision.
        double M = std::max(rhs.M, 1e-12);
        double I_low = (1.0 / M) * std::log1p(M * std::max(t, 1e-6) / (2.0 * umin));
        if (rhs.forcing.envelope_H * std::exp(-rhs.forcing.decay_eta * I_low) < 1e-30) return 0.0;
    }
    double I = history_integral(phi, t, rhs.kappa);
    if (!std::isfinite(I)) return 0.0;
    return rhs.forcing.h(I);
}

// K(phi, t): f + g h(integral) at the (cut off) head, falling back to the pure
// f branch when the u history is singular.
inline Vec2 K_eval(const Segment& phi, double t, const DelayRHS& rhs) {
    Vec2 p = phi.head();
    double c = detail::cutoff_factor(p.norm() / rhs.cutoff_radius);
    if (c == 0.0) return {0.0, 0.0};

    Vec2 val = rhs.f.eval(p.x, p.y);
    if (rhs.g_active()) {
        double hv = forcing_factor(phi, t, rhs);
        if (hv != 0.0) val += rhs.g.eval(p.x, p.y) * hv;
    }
    return c * val;
}

// Directional derivative of K at phi in direction d = (w, z).
inline Vec2 DK_eval(const Segment& phi, double t, const Segment& dir, const DelayRHS& rhs) {
    Vec2 p = phi.head();
    Vec2 d0 = dir.head();
    double n = p.norm();
    double s = n / rhs.cutoff_radius;
    double c = detail::cutoff_factor(s);
    double cd = detail::cutoff_factor_d(s) / rhs.cutoff_radius;
    if (c == 0.0 && cd == 0.0) return {0.0, 0.0};

    double I = history_integral(phi, t, rhs.kappa);
    bool regular = std::isfinite(I) && rhs.g_active();
    double hv = 0.0;
    Vec2 val = rhs.f.eval(p.x, p.y);
    Vec2 deriv = rhs.f.jacobian(p.x, p.y) * d0;
    if (regular) {
        hv = forcing_factor(phi, t, rhs);
        val += rhs.g.eval(p.x, p.y) * hv;
        deriv += (rhs.g.jacobian(p.x, p.y) * d0) * hv;
        if (hv != 0.0) {
            // dI = -kappa int sign(u) w |u|^{-kappa-1}
            int kap = rhs.kappa;
            auto integrand = [&](double a) {
                double u = phi.at(a).x, w = dir.at(a).x;
                return -kap * (u > 0 ? 1.0 : -1.0) * w * std::pow(std::abs(u), -kap - 1);
            };
            double lo = std::max(-t, -phi.window());
            double dI = integrate(integrand, lo, 0.0, 1e-9);
            if (-t < lo && phi.tail() == TailRule::Frozen) {
                double u = phi.values().back().x, w = dir.at(lo).x;
                dI += (lo + t) * (-kap) * (u > 0 ? 1.0 : -1.0) * w * std::pow(std::abs(u), -kap - 1);
            }
            deriv += rhs.g.eval(p.x, p.y) * (rhs.forcing.hprime(I) * dI);
        }
    }
    Vec2 out = c * deriv;
    if (cd != 0.0 && n > 0.0) out += (cd * (dot(p, d0) / n)) * val;
    return out;
}

// R(phi, t) = K(phi, t) - A phi(0): the nonlinearity left after subtracting
// the linearization at the origin.
inline Vec2 R_eval(const Segment& phi, double t, const DelayRHS& rhs, const HyperbolicSplit& sp) {
    return K_eval(phi, t, rhs) - sp.A * phi.head();
}

// Certified Lipschitz constant of R on the delta-ball of the segment space,
// for initial times >= sigma0. Three contributions:
//   (1) deviation of Df from A on the ball,
//   (2) the Dg coupling times the certified smallness of h(integral),
//   (3) the g magnitude times gamma(delta) from the h-difference estimate.
inline double zeta_estimate(double delta, double sigma0, const DelayRHS& rhs,
                            const HyperbolicSplit& sp) {
    if (delta < 0.0 || sigma0 <= 0.0) throw ConfigError("zeta_estimate needs delta >= 0, sigma0 > 0");
    (void)sp;
    double term1 = 0.0;
    for (const Poly2* comp : {&rhs.f.px, &rhs.f.py}) {
        double dx = comp->derivative(0).deviation_bound(delta);
        double dy = comp->derivative(1).deviation_bound(delta);
        term1 += dx * dx + dy * dy;
    }
    term1 = std::sqrt(term1);
    if (!rhs.g_active()) return term1;

    double H = rhs.forcing.envelope_H, eta = rhs.forcing.decay_eta, M = rhs.M;
    if (eta / M <= 1.0) throw EtaRatioTooSmall("need forcing decay faster than the field bound");

    double shift = M * sigma0 / 2.0;
    double h_small = H * std::pow(delta / (delta + shift), eta / M);

    double dg = 0.0;
    for (const Poly2* comp : {&rhs.g.px, &rhs.g.py}) {
        double dx = comp->derivative(0).coeff_abs_sum_bound(delta);
        double dy = comp->derivative(1).coeff_abs_sum_bound(delta);
        dg += dx * dx + dy * dy;
    }
    double term2 = std::sqrt(dg) * h_small;

    double gx = rhs.g.px.coeff_abs_sum_bound(delta), gy = rhs.g.py.coeff_abs_sum_bound(delta);
    double g_over_delta = delta > 0.0 ? std::hypot(gx, gy) / delta : 0.0;
    double term3 = g_over_delta * h_small;  // = ||g||_ball * gamma(delta)

    return term1 + term2 + term3;
}

// gamma(r) = H (r / (r + M sigma0 / 2))^{eta/M} / r
inline double gamma_bound(double r, double sigma0, double H, double eta, double M) {
    if (eta / M <= 1.0) throw EtaRatioTooSmall("need forcing decay faster than the field bound");
    return H * std::pow(r / (r + M * sigma0 / 2.0), eta / M) / r;
}

struct ZetaLadderRung {
    double delta = 0.0;
    double zeta = 0.0;
    double contraction_bound = 0.0;
};

// Geometric delta-ladder; delta0 = largest rung whose contraction bound stays
// below 1/2.
inline std::vector<ZetaLadderRung> zeta_ladder(const DelayRHS& rhs, const HyperbolicSplit& sp,
                                               double sigma0, double beta, double delta_top = 1.0,
                                               int rungs = 24) {
    if (beta <= 0.0 || beta >= sp.alpha) throw ConfigError("beta must lie in (0, alpha)");
    double factor = sp.C * sp.K * sp.L * (1.0 / (sp.alpha - beta) + 1.0 / (sp.alpha + beta));
    std::vector<ZetaLadderRung> ladder;
    double d = delta_top;
    for (int k = 0; k < rungs; ++k, d *= 0.5) {
        ZetaLadderRung r;
        r.delta = d;
        r.zeta = zeta_estimate(d, sigma0, rhs, sp);
        r.contraction_bound = factor * r.zeta;
        ladder.push_back(r);
    }
    return ladder;
}

inline double delta0_from_ladder(const std::vector<ZetaLadderRung>& ladder) {
    for (const auto& r : ladder)
        if (r.contraction_bound < 0.5) return r.delta;
    throw NoContraction("no rung of the delta ladder satisfies the contraction bound");
}

}  // namespace blowup

#endif
