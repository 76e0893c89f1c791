#ifndef BLOWUP_SEGMENT_HPP
#define BLOWUP_SEGMENT_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "blowup/errors.hpp"
#include "blowup/util/mat2.hpp"
#include "blowup/util/quadrature.hpp"

namespace blowup {

// Parameters of the fading-memory phase space: weighted sup norm with weight
// e^{lambda theta}, restricted to M-Lipschitz histories on a window [-Theta, 0].
struct BParams {
    double lambda = 0.5;
    double M = 1.0;
    double Theta = 20.0;

    static double default_window(double alpha, double lambda) {
        return std::max(20.0 / alpha, 10.0 / lambda);
    }
};

enum class TailRule { Zero, Frozen, LinearSystem };

// History function phi on (-infty, 0], represented by samples on a grid of
// theta values in [-Theta, 0] (descending, theta[0] = 0) plus a declared rule
// for the tail theta < -Theta. Values in between grid points are linear.
class Segment {
  public:
    Segment() = default;

    Segment(std::vector<double> thetas, std::vector<Vec2> values, TailRule tail = TailRule::Zero,
            Mat2 tail_matrix = Mat2::zero())
        : theta_(std::move(thetas)), values_(std::move(values)), tail_(tail),
          tail_matrix_(tail_matrix) {
        if (theta_.size() != values_.size() || theta_.size() < 1)
            throw ConfigError("segment grid/value size mismatch");
        if (theta_.front() != 0.0) throw ConfigError("segment grid must start at theta = 0");
        for (std::size_t i = 0; i + 1 < theta_.size(); ++i)
            if (!(theta_[i] > theta_[i + 1])) throw ConfigError("segment grid must descend");
    }

    static Segment from_function(const std::vector<double>& thetas,
                                 const std::function<Vec2(double)>& fn,
                                 TailRule tail = TailRule::Zero, Mat2 tail_matrix = Mat2::zero()) {
        std::vector<Vec2> vals;
        vals.reserve(thetas.size());
        for (double th : thetas) vals.push_back(fn(th));
        return Segment(thetas, std::move(vals), tail, tail_matrix);
    }

    static Segment constant(const std::vector<double>& thetas, const Vec2& v) {
        return from_function(thetas, [&](double) { return v; }, TailRule::Frozen);
    }

    const std::vector<double>& grid() const { return theta_; }
    const std::vector<Vec2>& values() const { return values_; }
    TailRule tail() const { return tail_; }
    const Mat2& tail_matrix() const { return tail_matrix_; }
    double window() const { return -theta_.back(); }
    Vec2 head() const { return values_.front(); }

    Vec2 at(double theta) const {
        if (theta >= 0.0) return values_.front();
        if (theta >= theta_.back()) {
            // grid is descending; binary search for the bracketing pair
            std::size_t lo = 0, hi = theta_.size() - 1;
            while (hi - lo > 1) {
                std::size_t mid = (lo + hi) / 2;
                if (theta_[mid] >= theta) lo = mid; else hi = mid;
            }
            double t = (theta - theta_[lo]) / (theta_[hi] - theta_[lo]);
            return values_[lo] + t * (values_[hi] - values_[lo]);
        }
        switch (tail_) {
            case TailRule::Zero: return {0.0, 0.0};
            case TailRule::Frozen: return values_.back();
            case TailRule::LinearSystem:
                return expm(tail_matrix_, theta - theta_.back()) * values_.back();
        }
        return {0.0, 0.0};
    }

    Segment map(const std::function<Vec2(double, const Vec2&)>& fn) const {
        std::vector<Vec2> vals;
        vals.reserve(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) vals.push_back(fn(theta_[i], values_[i]));
        return Segment(theta_, std::move(vals), tail_, tail_matrix_);
    }

    Segment operator-(const Segment& o) const {
        return map([&](double th, const Vec2& v) { return v - o.at(th); });
    }
    Segment operator+(const Segment& o) const {
        return map([&](double th, const Vec2& v) { return v + o.at(th); });
    }
    Segment operator*(double c) const {
        return map([&](double, const Vec2& v) { return v * c; });
    }

  private:
    std::vector<double> theta_;
    std::vector<Vec2> values_;
    TailRule tail_ = TailRule::Zero;
    Mat2 tail_matrix_;
};

// Grid with geometric refinement toward theta = 0 (ratio 1.2).
inline std::vector<double> geometric_grid(double Theta, double h0 = 1e-3, double ratio = 1.2) {
    std::vector<double> g{0.0};
    double h = h0, th = 0.0;
    while (th > -Theta) {
        th = std::max(th - h, -Theta);
        g.push_back(th);
        h *= ratio;
    }
    return g;
}

inline std::vector<double> uniform_grid(double Theta, double dt) {
    std::vector<double> g;
    int n = static_cast<int>(std::ceil(Theta / dt));
    for (int i = 0; i <= n; ++i) g.push_back(-std::min(i * dt, Theta));
    return g;
}

// size of the component of phi(-Theta) along the eigendirection whose backward
// growth is fastest (most negative real part)
inline double component_along_fast(const Segment& phi, const Eig2& e) {
    const Mat2& A = phi.tail_matrix();
    double mu_slow = std::min(e.lambda1.real(), e.lambda2.real());
    double mu_fast = std::max(e.lambda1.real(), e.lambda2.real());
    if (std::abs(mu_fast - mu_slow) < 1e-12) return phi.values().back().norm();
    // spectral projection onto the mu_slow eigenspace
    Mat2 P = (A - Mat2::diag(mu_fast, mu_fast)) * (1.0 / (mu_slow - mu_fast));
    return (P * phi.values().back()).norm();
}

// Weighted sup norm sup_{theta <= 0} e^{lambda theta} ||phi(theta)||, taken
// over the grid plus an analytic bound for the declared tail.
inline double bnorm(const Segment& phi, const BParams& p) {
    double s = 0.0;
    const auto& th = phi.grid();
    const auto& vals = phi.values();
    for (std::size_t i = 0; i < th.size(); ++i)
        s = std::max(s, std::exp(p.lambda * th[i]) * vals[i].norm());

    double thetaEnd = th.back();
    double endw = std::exp(p.lambda * thetaEnd);
    switch (phi.tail()) {
        case TailRule::Zero:
            break;
        case TailRule::Frozen: {
            if (vals.back().norm() > 0.0 && p.lambda <= 0.0)
                throw UnboundedTail("frozen tail with nonpositive lambda");
            s = std::max(s, endw * vals.back().norm());
            break;
        }
        case TailRule::LinearSystem: {
            Vec2 w = vals.back();
            if (w.norm() == 0.0) break;
            Eig2 e = eigenvalues(phi.tail_matrix());
            double minRe = std::min(e.lambda1.real(), e.lambda2.real());
            if (minRe <= -p.lambda + 1e-12) {
                // a component of w along the slow/stable direction would blow up
                // backward in time faster than the weight decays
                if (!e.real() || component_along_fast(phi, e) > 1e-12 * w.norm())
                    throw UnboundedTail("tail dynamics outgrow the norm weight");
            }
            // sup of the weighted tail; the exponent rates are all negative going
            // backward, so scan until the envelope is clearly decaying
            double span = 60.0 / std::max(1e-6, p.lambda + minRe);
            int n = 400;
            for (int i = 0; i <= n; ++i) {
                double x = -span * i / n;  // offset behind the grid end
                double val = std::exp(p.lambda * (thetaEnd + x)) *
                             (expm(phi.tail_matrix(), x) * w).norm();
                s = std::max(s, val);
            }
            break;
        }
    }
    return s;
}

// Tent approximant: (n theta + 1) x on [-1/n, 0], zero before.
inline Segment gamma_n(const Vec2& x, int n) {
    if (n <= 0) throw ConfigError("gamma_n needs a positive n");
    std::vector<double> th;
    const int pts = 8;
    for (int i = 0; i <= pts; ++i) th.push_back(-static_cast<double>(i) / (pts * n));
    return Segment::from_function(th, [&](double theta) { return (n * theta + 1.0) * x; },
                                  TailRule::Zero);
}

// integral_{-t}^{0} |u(s)|^{-kappa} ds for the first component of phi.
// Returns +infinity when u has a zero on [-t, 0]; the M-Lipschitz bound on
// segments makes the integral genuinely divergent there.
inline double history_integral(const Segment& phi, double t, int kappa, double rel_tol = 1e-9) {
    if (t <= 0.0) return 0.0;
    const double floor = 1e-12;
    const double inf = std::numeric_limits<double>::infinity();

    auto u_at = [&](double s) { return phi.at(s).x; };

    // singular detection on the grid restricted to [-t, 0] plus the endpoints
    double prev = u_at(0.0);
    if (std::abs(prev) <= floor) return inf;
    for (double th : phi.grid()) {
        if (th < -t) break;
        double val = u_at(th);
        if (std::abs(val) <= floor || val * prev < 0.0) return inf;
        prev = val;
    }
    double u_end = u_at(-t);
    if (std::abs(u_end) <= floor || u_end * prev < 0.0) return inf;

    if (t > phi.window()) {
        if (phi.tail() == TailRule::Zero) return inf;
        // probe the tail stretch for sign changes / collapse
        int n = 64;
        for (int i = 0; i <= n; ++i) {
            double s = -phi.window() - (t - phi.window()) * i / n;
            double val = u_at(s);
            if (std::abs(val) <= floor || val * prev < 0.0) return inf;
            prev = val;
        }
    }

    auto integrand = [&](double s) { return std::pow(std::abs(u_at(s)), -kappa); };
    double total = 0.0;
    double lo = std::max(-t, -phi.window());
    total += integrate(integrand, lo, 0.0, rel_tol);
    if (-t < lo) {
        if (phi.tail() == TailRule::Frozen)
            total += (lo + t) * std::pow(std::abs(phi.values().back().x), -kappa);
        else
            total += integrate(integrand, -t, lo, rel_tol);
    }
    return total;
}

struct LipschitzReport {
    bool certified = false;
    double max_ratio = 0.0;
};

// Difference-quotient check of the M-Lipschitz property on adjacent grid pairs.
inline LipschitzReport lipschitz_check(const Segment& phi, double M) {
    LipschitzReport rep;
    const auto& th = phi.grid();
    const auto& vals = phi.values();
    for (std::size_t i = 0; i + 1 < th.size(); ++i) {
        double ratio = (vals[i] - vals[i + 1]).norm() / (th[i] - th[i + 1]);
        rep.max_ratio = std::max(rep.max_ratio, ratio);
    }
    rep.certified = rep.max_ratio <= M * (1.0 + 1e-12);
    return rep;
}

}  // namespace blowup

#endif
