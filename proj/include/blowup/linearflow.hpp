#ifndef BLOWUP_LINEARFLOW_HPP
#define BLOWUP_LINEARFLOW_HPP

#include <cmath>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "blowup/errors.hpp"
#include "blowup/segment.hpp"
#include "blowup/util/mat2.hpp"
#include "blowup/util/quadrature.hpp"

namespace blowup {

// Spectral data of the hyperbolic linearization A = Df(0,0): head projections
// onto the stable/unstable eigenspaces and the certified constants of the
// exponential dichotomy on the segment space.
struct HyperbolicSplit {
    Mat2 A;
    Mat2 Ps, Pu;            // spectral projections on R^2, Ps + Pu = I
    bool saddle = false;    // one stable and one unstable real eigenvalue
    double mu_s = 0.0;      // stable eigenvalue (saddle case)
    double mu_u = 0.0;      // unstable eigenvalue (saddle case)
    double C = 1.0;         // dichotomy constant (fitted, with margin)
    double alpha = 0.0;     // dichotomy rate
    double L = 2.0;         // ||Pi_s|| + ||Pi_u|| on the segment space
    double K = 1.0;         // tent-approximant norm constant

    // e^{tA} restricted to the stable eigenspace, evaluated without exciting
    // the unstable direction (safe for large |t|)
    Mat2 exp_stable(double t) const {
        if (Pu.max_abs() == 0.0) return expm(A, t);
        if (Ps.max_abs() == 0.0) return Mat2::zero();
        return std::exp(mu_s * t) * Ps;
    }
    Mat2 exp_unstable(double t) const {
        if (Ps.max_abs() == 0.0) return expm(A, t);
        if (Pu.max_abs() == 0.0) return Mat2::zero();
        return std::exp(mu_u * t) * Pu;
    }
};

inline BParams bparams_for(const HyperbolicSplit& sp, double M) {
    BParams bp;
    bp.lambda = sp.alpha / 2.0;
    bp.M = M;
    bp.Theta = BParams::default_window(sp.alpha, bp.lambda);
    return bp;
}

namespace detail {

inline std::vector<Segment> probe_segments(const BParams& bp, int count, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> grid = uniform_grid(bp.Theta, bp.Theta / 160.0);
    std::vector<Segment> probes;
    for (int k = 0; k < count; ++k) {
        Vec2 a{unif(rng), unif(rng)}, b{unif(rng), unif(rng)};
        double w1 = 0.3 + 0.7 * std::abs(unif(rng));
        double w2 = 0.3 + 0.7 * std::abs(unif(rng));
        probes.push_back(Segment::from_function(
            grid,
            [&](double th) {
                // smooth, bounded, M-compatible after scaling
                return a * std::cos(w1 * th) + b * std::sin(w2 * th) * std::exp(0.2 * th);
            },
            TailRule::Frozen));
    }
    return probes;
}

}  // namespace detail

// [V(t)phi](theta) = phi(t+theta) for theta < -t, e^{(t+theta)A} phi(0) on
// [-t, 0]. Negative times are only meaningful on E^u, where V extends to a
// group.
inline Segment apply_V(double t, const Segment& phi, const HyperbolicSplit& sp) {
    if (t < 0.0) {
        // phi must lie in E^u: pure exponential history through an unstable head
        Vec2 head = phi.head();
        // probe the exponential-history property at a grid node (node values
        // are exact; interpolated ones are not)
        double th0 = -1.0;
        for (double th : phi.grid())
            if (th <= -0.5) {
                th0 = th;
                break;
            }
        if ((sp.Pu * head - head).norm() > 1e-9 * (1.0 + head.norm()) ||
            (phi.at(th0) - expm(sp.A, th0) * head).norm() > 1e-7 * (1.0 + head.norm()))
            throw NegativeTimeOutsideEu("V(t) with t<0 needs an E^u segment");
        Vec2 new_head = sp.exp_unstable(t) * head;
        return phi.map([&](double th, const Vec2&) { return sp.exp_unstable(th) * new_head; });
    }
    if (t == 0.0) return phi;

    std::vector<double> grid;
    // head piece [-t, 0], then the shifted old grid
    int nh = 64;
    for (int i = 0; i < nh; ++i) grid.push_back(-t * i / nh);
    for (double th : phi.grid()) grid.push_back(th - t);
    std::sort(grid.begin(), grid.end(), std::greater<double>());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    Vec2 head = phi.head();
    std::vector<Vec2> vals;
    vals.reserve(grid.size());
    for (double th : grid)
        vals.push_back(th >= -t ? expm(sp.A, t + th) * head : phi.at(t + th));
    return Segment(std::move(grid), std::move(vals), phi.tail(), phi.tail_matrix());
}

// phi_u is the unique E^u element through head Pu phi(0); phi_s the rest.
inline std::pair<Segment, Segment> project_su(const Segment& phi, const HyperbolicSplit& sp) {
    Vec2 hu = sp.Pu * phi.head();
    Segment phi_u = phi.map([&](double th, const Vec2&) { return sp.exp_unstable(th) * hu; });
    // an E^u element has exact exponential tail behaviour
    Segment phi_u_tailed(phi_u.grid(), phi_u.values(), TailRule::LinearSystem, sp.A);
    Segment phi_s = phi - phi_u;
    return {phi_s, phi_u_tailed};
}

// Fits the dichotomy constants (C, alpha) and the projection norm L on a probe
// family, with the documented safety margins.
inline HyperbolicSplit spectral_split(const Mat2& A, unsigned seed = 12345) {
    HyperbolicSplit sp;
    sp.A = A;
    Eig2 e = eigenvalues(A);
    double r1 = e.lambda1.real(), r2 = e.lambda2.real();
    if (std::abs(r1) < 1e-9 || std::abs(r2) < 1e-9)
        throw NonHyperbolic("eigenvalue too close to the imaginary axis");

    if (e.real() && r1 * r2 < 0.0) {
        sp.saddle = true;
        sp.mu_u = std::max(r1, r2);
        sp.mu_s = std::min(r1, r2);
        sp.Pu = (A - Mat2::diag(sp.mu_s, sp.mu_s)) * (1.0 / (sp.mu_u - sp.mu_s));
        sp.Ps = Mat2::identity() - sp.Pu;
    } else if (r1 < 0.0 && r2 < 0.0) {
        sp.Ps = Mat2::identity();
        sp.Pu = Mat2::zero();
    } else {
        sp.Ps = Mat2::zero();
        sp.Pu = Mat2::identity();
    }
    double min_abs = std::min(std::abs(r1), std::abs(r2));
    sp.alpha = min_abs - std::min(1e-6, 0.5 * min_abs);
    sp.K = 1.0;

    // fit C and L on probe segments
    BParams bp = bparams_for(sp, 1.0);
    auto probes = detail::probe_segments(bp, 24, seed);
    double c_fit = 1.0, l_s = 0.0, l_u = 0.0;
    for (const auto& phi : probes) {
        auto [phi_s, phi_u] = project_su(phi, sp);
        double n = bnorm(phi, bp);
        double ns = bnorm(phi_s, bp), nu = bnorm(phi_u, bp);
        l_s = std::max(l_s, ns / n);
        l_u = std::max(l_u, nu / n);
        for (int i = 1; i <= 10; ++i) {
            double t = i * 0.5 / sp.alpha;
            if (ns > 1e-12) {
                double grow = bnorm(apply_V(t, phi_s, sp), bp) / (std::exp(-sp.alpha * t) * ns);
                c_fit = std::max(c_fit, grow);
            }
            if (nu > 1e-12 && sp.Pu.max_abs() > 0.0 && sp.Ps.max_abs() > 0.0) {
                double grow = bnorm(apply_V(-t, phi_u, sp), bp) / (std::exp(sp.alpha * t) * nu);
                c_fit = std::max(c_fit, grow);
            }
        }
    }
    sp.C = c_fit * 1.05;
    sp.L = l_s + l_u;
    return sp;
}

// Segment x_t(psi, sigma, H) of the solution of x' = Ax + H(t), x_sigma = psi:
// the closed-form realization of the tent-approximant limit in the variation
// of constants formula.
inline Segment voc_convolve(const Segment& psi, const std::function<Vec2(double)>& H, double sigma,
                            double t, const HyperbolicSplit& sp, double rel_tol = 1e-10) {
    if (t < sigma) throw OutOfRange("voc_convolve needs sigma <= t");
    auto head_at = [&](double a) {  // solution value at absolute time a >= sigma
        Vec2 hom = expm(sp.A, a - sigma) * psi.head();
        auto ix = integrate([&](double s) { return (expm(sp.A, a - s) * H(s)).x; }, sigma, a, rel_tol);
        auto iy = integrate([&](double s) { return (expm(sp.A, a - s) * H(s)).y; }, sigma, a, rel_tol);
        return hom + Vec2{ix, iy};
    };

    double span = t - sigma;
    std::vector<double> grid;
    int nh = std::max(32, static_cast<int>(span * 16));
    for (int i = 0; i < nh; ++i) grid.push_back(-span * i / nh);
    for (double th : psi.grid()) grid.push_back(th - span);
    std::sort(grid.begin(), grid.end(), std::greater<double>());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<Vec2> vals;
    vals.reserve(grid.size());
    for (double th : grid)
        vals.push_back(th >= -span ? head_at(t + th) : psi.at(t + th - sigma + 0.0));
    return Segment(std::move(grid), std::move(vals), psi.tail(), psi.tail_matrix());
}

// ---------------------------------------------------------------------------
// Discrete Lyapunov-Perron convolution engine.
//
// Works on one uniform absolute-time grid. Any segment family produced by the
// operator is the restriction of a single path a -> Y(a); the engine stores
// that path and reads segments out of it.

struct LPGrid {
    double sigma = 1.0;
    double dt = 0.05;
    int n_hist = 0;  // nodes before sigma (covers one segment window)
    int n_fwd = 0;   // nodes after sigma

    int size() const { return n_hist + n_fwd + 1; }
    double time(int i) const { return sigma + (i - n_hist) * dt; }
    double fwd_time(int j) const { return sigma + j * dt; }

    static LPGrid make(double sigma, double dt, double Theta, double horizon) {
        LPGrid g;
        g.sigma = sigma;
        g.dt = dt;
        g.n_hist = static_cast<int>(std::ceil(Theta / dt)) + 1;
        g.n_fwd = static_cast<int>(std::ceil(horizon / dt));
        return g;
    }
};

namespace detail {

// scalar phi-functions for the per-interval closed forms
inline double phi1(double mu, double h) {  // int_0^h e^{mu tau} dtau
    return std::abs(mu * h) < 1e-8 ? h * (1.0 + 0.5 * mu * h) : (std::exp(mu * h) - 1.0) / mu;
}
inline double phi2(double mu, double h) {  // int_0^h e^{mu tau} tau dtau
    return std::abs(mu * h) < 1e-6 ? 0.5 * h * h : (h * std::exp(mu * h) - phi1(mu, h)) / mu;
}

struct SweepOps {
    Mat2 step_s, E1s, E2s;  // forward stable sweep
    Mat2 step_u, E1u, E2u;  // backward unstable sweep
    bool has_u = false, has_s = false;
};

inline SweepOps make_sweep_ops(const HyperbolicSplit& sp, double h) {
    SweepOps o;
    o.has_s = sp.Ps.max_abs() > 0.0;
    o.has_u = sp.Pu.max_abs() > 0.0;
    if (sp.saddle) {
        o.step_s = std::exp(sp.mu_s * h) * sp.Ps;
        o.E1s = phi1(sp.mu_s, h) * sp.Ps;
        o.E2s = phi2(sp.mu_s, h) * sp.Ps;
        o.step_u = std::exp(-sp.mu_u * h) * sp.Pu;
        o.E1u = phi1(-sp.mu_u, h) * sp.Pu;
        o.E2u = phi2(-sp.mu_u, h) * sp.Pu;
    } else if (o.has_s && !o.has_u) {
        Mat2 Ainv = sp.A.inverse();
        Mat2 eh = expm(sp.A, h);
        o.step_s = eh;
        o.E1s = Ainv * (eh - Mat2::identity());
        o.E2s = Ainv * (h * eh - o.E1s);
    } else if (o.has_u && !o.has_s) {
        Mat2 Ainv = sp.A.inverse();
        Mat2 ehm = expm(sp.A, -h);
        o.step_u = ehm;
        o.E1u = Ainv * (Mat2::identity() - ehm);
        o.E2u = Ainv * (o.E1u - h * ehm);
    }
    return o;
}

}  // namespace detail

// Applies the Lyapunov-Perron convolution to head inhomogeneity values R given
// at the forward grid nodes: returns the path
//   Y(a) = e^{(a-sigma)A} psi(0)
//        + int_sigma^a e^{(a-s)A} Ps R(s) ds  -  int_a^end e^{(a-s)A} Pu R(s) ds
// for a >= sigma, and psi(a-sigma) - int_sigma^end e^{(a-s)A} Pu R(s) ds before.
// R is treated as linear between nodes; each interval piece is integrated in
// closed form and the sweeps stay projected onto their subspaces.
inline std::vector<Vec2> lp_convolve_path(const LPGrid& g, const Segment& psi,
                                          const std::vector<Vec2>& R,
                                          const HyperbolicSplit& sp) {
    if (static_cast<int>(R.size()) != g.n_fwd + 1)
        throw ConfigError("R values must match the forward grid");
    const double h = g.dt;
    auto ops = detail::make_sweep_ops(sp, h);

    std::vector<Vec2> S(g.n_fwd + 1), U(g.n_fwd + 1);
    if (ops.has_s) {
        for (int j = 0; j < g.n_fwd; ++j) {
            Vec2 r0 = sp.Ps * R[j], r1 = sp.Ps * R[j + 1];
            S[j + 1] = sp.Ps * (ops.step_s * S[j] + ops.E1s * r1 + ops.E2s * ((r0 - r1) / h));
        }
    }
    if (ops.has_u) {
        for (int j = g.n_fwd - 1; j >= 0; --j) {
            Vec2 r0 = sp.Pu * R[j], r1 = sp.Pu * R[j + 1];
            U[j] = sp.Pu * (ops.step_u * U[j + 1] + ops.E1u * r0 + ops.E2u * ((r1 - r0) / h));
        }
    }

    Vec2 psi0 = sp.Ps * psi.head();  // heads of E^s data live in the stable eigenspace
    std::vector<Vec2> path(g.size());
    for (int i = 0; i < g.size(); ++i) {
        double a = g.time(i);
        if (i >= g.n_hist) {
            int j = i - g.n_hist;
            path[i] = sp.exp_stable(a - g.sigma) * psi0 + S[j] - U[j];
        } else {
            path[i] = psi.at(a - g.sigma) - sp.exp_unstable(a - g.sigma) * U[0];
        }
    }
    return path;
}

// Segment of a path at forward node j (absolute time sigma + j dt), with the
// window covered by the history part of the grid.
inline Segment path_segment(const LPGrid& g, const std::vector<Vec2>& path, int j, double Theta) {
    int i_t = g.n_hist + j;
    int k_max = std::min(static_cast<int>(std::floor(Theta / g.dt)), i_t);
    std::vector<double> th(k_max + 1);
    std::vector<Vec2> vals(k_max + 1);
    for (int k = 0; k <= k_max; ++k) {
        th[k] = -k * g.dt;
        vals[k] = path[i_t - k];
    }
    return Segment(std::move(th), std::move(vals), TailRule::Frozen);
}

// sup_t || y(t) - F_sigma(psi, y)(t) ||_B over the forward grid nodes up to
// eval_until: the discrete form of the bounded-solution integral identity.
inline double lemma2_residual(const LPGrid& g, const std::vector<Vec2>& y_path,
                              const Segment& psi,
                              const std::function<Vec2(const Segment&, double)>& Rfn,
                              const HyperbolicSplit& sp, const BParams& bp, double eval_until) {
    std::vector<Vec2> R(g.n_fwd + 1);
    for (int j = 0; j <= g.n_fwd; ++j)
        R[j] = Rfn(path_segment(g, y_path, j, bp.Theta), g.fwd_time(j));
    auto image = lp_convolve_path(g, psi, R, sp);
    double res = 0.0;
    for (int j = 0; j <= g.n_fwd; ++j) {
        if (g.fwd_time(j) > eval_until) break;
        Segment diff = path_segment(g, y_path, j, bp.Theta) - path_segment(g, image, j, bp.Theta);
        res = std::max(res, bnorm(diff, bp));
    }
    return res;
}

}  // namespace blowup

#endif
