#ifndef BLOWUP_LPSOLVER_HPP
#define BLOWUP_LPSOLVER_HPP

#include <cmath>
#include <random>
#include <vector>

#include "blowup/errors.hpp"
#include "blowup/linearflow.hpp"
#include "blowup/nonlinear.hpp"
#include "blowup/segment.hpp"

namespace blowup {

struct LPConfig {
    double sigma0 = 1.0;
    double r = 0.0;       // stable-ball radius
    double delta = 0.0;   // segment-space ball radius
    double beta = 0.0;    // decay exponent in (0, alpha)
    double dt = 0.05;     // time grid step
    double T_max = 0.0;   // forward horizon for certificates
    double tail = 0.0;    // extra horizon truncating the unstable integral
    double fp_tol = 1e-9;
    int max_iter = 60;
    double zeta = 0.0;               // zeta(delta), cached
    double contraction_bound = 0.0;  // C K L zeta (1/(a-b) + 1/(a+b))

    void validate(const HyperbolicSplit& sp) const {
        if (sigma0 <= 0.0 || delta <= 0.0 || r <= 0.0) throw ConfigError("LP config not positive");
        if (beta <= 0.0 || beta >= sp.alpha) throw ConfigError("beta must lie in (0, alpha)");
        if (!(r < delta / (2.0 * sp.C))) throw ConfigError("need r < delta / (2C)");
        if (!(contraction_bound < 0.5)) throw ConfigError("contraction bound is not below 1/2");
    }
};

// Default configuration from the zeta ladder: largest admissible delta, r just
// inside delta/(2C), grid and horizons tied to the dichotomy rates.
inline LPConfig make_lp_config(const DelayRHS& rhs, const HyperbolicSplit& sp, double sigma0,
                               double beta = 0.0) {
    LPConfig cfg;
    cfg.sigma0 = sigma0;
    cfg.beta = beta > 0.0 ? beta : sp.alpha / 2.0;
    auto ladder = zeta_ladder(rhs, sp, sigma0, cfg.beta);
    cfg.delta = delta0_from_ladder(ladder);
    for (const auto& rung : ladder)
        if (rung.delta == cfg.delta) {
            cfg.zeta = rung.zeta;
            cfg.contraction_bound = rung.contraction_bound;
        }
    cfg.r = 0.9 * cfg.delta / (2.0 * sp.C);
    cfg.dt = std::min(0.05 / sp.alpha, sigma0 / 20.0);
    cfg.T_max = 40.0 / cfg.beta;
    cfg.tail = 40.0 / sp.alpha;
    cfg.validate(sp);
    return cfg;
}

// E^s element with the given head (projected onto the stable eigenspace) and
// constant history.
inline Segment psi_from_head(const Vec2& head, const HyperbolicSplit& sp, const BParams& bp) {
    Vec2 h = sp.Ps * head;
    return Segment::constant(uniform_grid(bp.Theta, std::min(0.05, bp.Theta / 40.0)), h);
}

// The E^u element through the given head.
inline Segment eu_element(const Vec2& head, const HyperbolicSplit& sp, const BParams& bp) {
    Vec2 h = sp.Pu * head;
    auto grid = uniform_grid(bp.Theta, std::min(0.05, bp.Theta / 40.0));
    return Segment::from_function(grid, [&](double th) { return sp.exp_unstable(th) * h; },
                                  TailRule::LinearSystem, sp.A);
}

// Discrete Y_sigma norm: max over forward nodes of e^{beta (t-sigma)} times the
// segment norm of the path restriction.
inline double y_norm(const LPGrid& g, const std::vector<Vec2>& path, const BParams& bp,
                     double beta) {
    double s = 0.0;
    for (int j = 0; j <= g.n_fwd; ++j) {
        double w = std::exp(beta * (g.fwd_time(j) - g.sigma));
        s = std::max(s, w * bnorm(path_segment(g, path, j, bp.Theta), bp));
    }
    return s;
}

// One application of the Lyapunov-Perron operator to a path.
inline std::vector<Vec2> lp_operator(const LPGrid& g, const Segment& psi,
                                     const std::vector<Vec2>& y_path, const LPConfig& cfg,
                                     const DelayRHS& rhs, const HyperbolicSplit& sp,
                                     const BParams& bp) {
    if (bnorm(psi, bp) > cfg.r * (1.0 + 1e-9)) throw OutOfBall("psi outside the r-ball");
    if (y_norm(g, y_path, bp, cfg.beta) > cfg.delta * (1.0 + 1e-6))
        throw OutOfBall("y outside the delta-ball");
    std::vector<Vec2> R(g.n_fwd + 1);
    for (int j = 0; j <= g.n_fwd; ++j)
        R[j] = R_eval(path_segment(g, y_path, j, bp.Theta), g.fwd_time(j), rhs, sp);
    return lp_convolve_path(g, psi, R, sp);
}

struct LPSolution {
    LPGrid grid;
    std::vector<Vec2> path;  // the fixed point as one absolute-time path
    Segment psi;
    double contraction_factor = 0.0;
    int iterations = 0;
};

// Picard iteration from y0 = V(.-sigma) psi until the Y_sigma residual drops
// below fp_tol (relative to the psi norm).
inline LPSolution solve_fixed_point(const Segment& psi, double sigma, const LPConfig& cfg,
                                    const DelayRHS& rhs, const HyperbolicSplit& sp,
                                    const BParams& bp) {
    cfg.validate(sp);
    if (sigma < cfg.sigma0) throw ConfigError("initial time below sigma0");
    LPGrid g = LPGrid::make(sigma, cfg.dt, bp.Theta, cfg.T_max + cfg.tail);

    Vec2 psi0 = sp.Ps * psi.head();
    std::vector<Vec2> y(g.size());
    for (int i = 0; i < g.size(); ++i) {
        double a = g.time(i);
        y[i] = i >= g.n_hist ? sp.exp_stable(a - sigma) * psi0 : psi.at(a - sigma);
    }

    double psi_norm = bnorm(psi, bp);
    double tol = cfg.fp_tol * std::max(psi_norm, 1e-16);
    LPSolution sol;
    sol.grid = g;
    sol.psi = psi;

    double prev_diff = -1.0;
    for (int it = 0; it < cfg.max_iter; ++it) {
        auto next = lp_operator(g, psi, y, cfg, rhs, sp, bp);
        std::vector<Vec2> diff(next.size());
        for (std::size_t i = 0; i < next.size(); ++i) diff[i] = next[i] - y[i];
        double d = y_norm(g, diff, bp, cfg.beta);
        y = std::move(next);
        sol.iterations = it + 1;
        if (prev_diff > 10.0 * tol) {
            double ratio = d / prev_diff;
            sol.contraction_factor = std::max(sol.contraction_factor, ratio);
            if (ratio >= 0.55) throw NoContraction("successive-difference ratio reached 0.55");
        }
        prev_diff = d;
        if (d <= tol) {
            sol.path = std::move(y);
            return sol;
        }
    }
    throw MaxIter("fixed point iteration did not converge");
}

// w(psi, sigma) = Pi^u y*(sigma): head of the unstable graph component.
inline Vec2 manifold_w_head(const LPSolution& sol, const HyperbolicSplit& sp) {
    return sp.Pu * sol.path[sol.grid.n_hist];
}

inline Segment manifold_w(const LPSolution& sol, const HyperbolicSplit& sp, const BParams& bp) {
    return eu_element(manifold_w_head(sol, sp), sp, bp);
}

struct DecayCertificate {
    double N_est = 0.0;
    double N_bound = 0.0;
    bool pass = false;
};

// Theorem-style decay certificate: N_est = max e^{beta (t-sigma)} ||y*(t)|| /
// ||psi + w||, compared with the explicit proof constant (1.1 slack).
inline DecayCertificate decay_certificate(const LPSolution& sol, const LPConfig& cfg,
                                          const HyperbolicSplit& sp, const BParams& bp) {
    DecayCertificate cert;
    Segment phi = sol.psi + manifold_w(sol, sp, bp);
    double phi_norm = bnorm(phi, bp);
    cert.N_bound = sp.C * sp.L / (1.0 - cfg.contraction_bound) * 1.1;
    if (phi_norm <= 1e-16) {
        cert.N_est = 0.0;
        cert.pass = true;
        return cert;
    }
    const LPGrid& g = sol.grid;
    for (int j = 0; j <= g.n_fwd; ++j) {
        double dt_rel = g.fwd_time(j) - g.sigma;
        if (dt_rel > cfg.T_max) break;
        double v = std::exp(cfg.beta * dt_rel) * bnorm(path_segment(g, sol.path, j, bp.Theta), bp);
        cert.N_est = std::max(cert.N_est, v / phi_norm);
    }
    cert.pass = cert.N_est <= cert.N_bound;
    return cert;
}

// ||w(rho_k e)|| / rho_k over a shrinking radius ladder along the stable
// eigendirections; ratios must vanish for tangency at 0.
inline std::vector<double> tangency_probe(double sigma, const LPConfig& cfg, const DelayRHS& rhs,
                                          const HyperbolicSplit& sp, const BParams& bp,
                                          int rungs = 7) {
    // unit vector spanning the stable eigenspace
    Vec2 e{1.0, 0.0};
    if ((sp.Ps * e).norm() < 1e-12) e = {0.0, 1.0};
    Vec2 es = sp.Ps * e;
    es = es / es.norm();

    std::vector<double> ratios;
    for (int k = 0; k < rungs; ++k) {
        double rho = cfg.r * std::pow(2.0, -k);
        double worst = 0.0;
        for (double sgn : {1.0, -1.0}) {
            Segment psi = psi_from_head(sgn * rho * es, sp, bp);
            auto sol = solve_fixed_point(psi, sigma, cfg, rhs, sp, bp);
            worst = std::max(worst, manifold_w_head(sol, sp).norm() / rho);
        }
        ratios.push_back(worst);
    }
    return ratios;
}

// Positive invariance: the unstable part of mu_t = y*(t) must agree with a
// fresh graph solve at initial time t over the stable part of mu_t.
inline double invariance_check(const LPSolution& sol, double t, const LPConfig& cfg,
                               const DelayRHS& rhs, const HyperbolicSplit& sp, const BParams& bp) {
    const LPGrid& g = sol.grid;
    int j = static_cast<int>(std::llround((t - g.sigma) / g.dt));
    if (j < 0 || j > g.n_fwd) throw OutOfRange("t outside the solved grid");
    Segment mu_t = path_segment(g, sol.path, j, bp.Theta);
    auto [mu_s, mu_u] = project_su(mu_t, sp);
    if (bnorm(mu_s, bp) > cfg.r * (1.0 + 1e-9))
        throw OutOfBall("stable part of mu_t left the r-ball");
    auto fresh = solve_fixed_point(mu_s, g.fwd_time(j), cfg, rhs, sp, bp);
    Vec2 diff = sp.Pu * mu_t.head() - manifold_w_head(fresh, sp);
    return bnorm(eu_element(diff, sp, bp), bp);
}

struct ManifoldChart {
    double sigma = 0.0;
    std::vector<Vec2> psi_heads;
    std::vector<Vec2> w_heads;
    std::vector<double> contraction_factors;
    DecayCertificate decay;
    std::vector<double> tangency_ratios;
    std::vector<double> invariance_residuals;
};

// Samples the graph w(., sigma) over a fan of stable headings in B(r).
inline ManifoldChart build_manifold_chart(double sigma, const LPConfig& cfg, const DelayRHS& rhs,
                                          const HyperbolicSplit& sp, const BParams& bp,
                                          int n_samples = 9) {
    ManifoldChart chart;
    chart.sigma = sigma;
    Vec2 e{1.0, 0.0};
    if ((sp.Ps * e).norm() < 1e-12) e = {0.0, 1.0};
    Vec2 es = sp.Ps * e;
    es = es / es.norm();

    LPSolution last;
    for (int i = 0; i < n_samples; ++i) {
        double rho = cfg.r * (2.0 * i / (n_samples - 1.0) - 1.0);
        Segment psi = psi_from_head(rho * es, sp, bp);
        auto sol = solve_fixed_point(psi, sigma, cfg, rhs, sp, bp);
        chart.psi_heads.push_back(sp.Ps * psi.head());
        chart.w_heads.push_back(manifold_w_head(sol, sp));
        chart.contraction_factors.push_back(sol.contraction_factor);
        if (std::abs(rho) == cfg.r) last = sol;
    }
    chart.decay = decay_certificate(last, cfg, sp, bp);
    return chart;
}

}  // namespace blowup

#endif
