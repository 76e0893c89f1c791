#ifndef BLOWUP_POLYFIELD_HPP
#define BLOWUP_POLYFIELD_HPP

#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "blowup/errors.hpp"
#include "blowup/poly.hpp"
#include "blowup/util/uni_roots.hpp"

namespace blowup {

// Directional blow-up chart (x,y) = (s*u^p, s*u^q*v) (x-directional) or
// (x,y) = (s*u^p*v, s*u^q) (y-directional); (p,q) = (1,1) is the classical case.
struct BlowupChart {
    enum class Direction { X, Y };
    Direction direction = Direction::X;
    int sign = +1;  // half-plane: +1 maps {u>0} onto the positive half plane
    int p = 1, q = 1;

    bool valid() const { return p > 0 && q > 0 && std::gcd(p, q) == 1 && (sign == 1 || sign == -1); }

    // chart map (u,v) -> (x,y)
    template <class T>
    std::pair<T, T> apply(const T& u, const T& v) const {
        T up = 1, uq = 1;
        for (int i = 0; i < p; ++i) up *= u;
        for (int i = 0; i < q; ++i) uq *= u;
        if (direction == Direction::X) return {T(sign) * up, T(sign) * uq * v};
        return {T(sign) * up * v, T(sign) * uq};
    }

    // differential of the chart map at (u,v)
    Mat2 differential(double u, double v) const {
        double s = sign;
        double up1 = std::pow(u, p - 1), uq1 = std::pow(u, q - 1);
        if (direction == Direction::X)
            return {s * p * up1, 0.0, s * q * uq1 * v, s * uq1 * u};
        return {s * p * up1 * v, s * up1 * u, s * q * uq1, 0.0};
    }
};

struct DesingularizedField {
    PolyMap2 f;     // in variables (u,v)
    int kappa = 0;  // degree of desingularization
    bool axis_invariant = false;
    bool zero_kappa_warning = false;
};

// Exact pullback of a planar polynomial field through a directional blow-up
// chart. Throws NonzeroRemainder when the required divisions by powers of u do
// not come out exact (i.e. the origin was not an equilibrium of the input).
inline PolyMap2 blowup_pullback(const PolyMap2& field, const BlowupChart& chart) {
    if (!chart.valid()) throw ConfigError("invalid blow-up chart");
    const Poly2 u = Poly2::var(0), v = Poly2::var(1);
    const Rational s(chart.sign);

    Poly2 xu, yu;  // x and y as polynomials in (u,v)
    Poly2 upow(Rational(1)), uqow(Rational(1));
    for (int i = 0; i < chart.p; ++i) upow = upow * u;
    for (int i = 0; i < chart.q; ++i) uqow = uqow * u;
    if (chart.direction == BlowupChart::Direction::X) {
        xu = upow * s;
        yu = uqow * v * s;
    } else {
        xu = upow * v * s;
        yu = uqow * s;
    }

    Poly2 fx = field.px.compose(xu, yu);
    Poly2 fy = field.py.compose(xu, yu);

    auto exact_div = [](const Poly2& poly, int k) {
        if (k <= 0) return poly;
        if (!poly.divisible_by_first_pow(k))
            throw NonzeroRemainder("division by u^" + std::to_string(k) +
                                   " leaves a remainder; origin is not an equilibrium");
        return poly.divide_first_pow(k);
    };

    Poly2 fu, fv;
    if (chart.direction == BlowupChart::Direction::X) {
        // x = s u^p:  u' = fx / (s p u^{p-1})
        fu = exact_div(fx, chart.p - 1) * Rational(chart.sign, chart.p);
        // y = s u^q v:  v' = (fy/s - q u^{q-1} v u') / u^q
        Poly2 num = fy * Rational(chart.sign) - (uqow * v * Rational(chart.q) * fu).divide_first_pow(1);
        fv = exact_div(num, chart.q);
    } else {
        fu = exact_div(fy, chart.q - 1) * Rational(chart.sign, chart.q);
        Poly2 num = fx * Rational(chart.sign) - (upow * v * Rational(chart.p) * fu).divide_first_pow(1);
        fv = exact_div(num, chart.p);
    }
    return {fu, fv, "u", "v"};
}

// Divides out the common factor u^kappa; when kappa is not given it is the
// minimum u-adic valuation across both components.
inline DesingularizedField desingularize(const PolyMap2& field,
                                         std::optional<int> kappa = std::nullopt) {
    DesingularizedField out;
    int k;
    if (kappa) {
        k = *kappa;
        if (k < 0) throw ConfigError("kappa must be nonnegative");
        if (!field.px.divisible_by_first_pow(k) || !field.py.divisible_by_first_pow(k))
            throw NonzeroRemainder("requested kappa exceeds the u-adic valuation");
    } else {
        if (field.px.is_zero() && field.py.is_zero())
            k = 0;
        else if (field.px.is_zero())
            k = field.py.valuation_first();
        else if (field.py.is_zero())
            k = field.px.valuation_first();
        else
            k = std::min(field.px.valuation_first(), field.py.valuation_first());
    }
    out.kappa = k;
    out.zero_kappa_warning = (k == 0);
    out.f = {field.px.divide_first_pow(k), field.py.divide_first_pow(k), "u", "v"};
    out.axis_invariant = out.f.px.divisible_by_first_pow(1);
    return out;
}

enum class EquilibriumClass { HyperbolicSaddle, HyperbolicNodeFocus, NonHyperbolic };

inline const char* to_string(EquilibriumClass c) {
    switch (c) {
        case EquilibriumClass::HyperbolicSaddle: return "hyperbolic-saddle";
        case EquilibriumClass::HyperbolicNodeFocus: return "hyperbolic-node/focus";
        default: return "non-hyperbolic";
    }
}

struct AxisEquilibrium {
    double v_star = 0.0;
    std::optional<Rational> v_star_exact;
    Mat2 jacobian;
    Eig2 eigenvalues;
    EquilibriumClass classification = EquilibriumClass::NonHyperbolic;
};

inline EquilibriumClass classify(const Eig2& e, double tol = 1e-9) {
    double r1 = e.lambda1.real(), r2 = e.lambda2.real();
    if (std::abs(r1) < tol || std::abs(r2) < tol) return EquilibriumClass::NonHyperbolic;
    if (e.real() && r1 * r2 < 0) return EquilibriumClass::HyperbolicSaddle;
    return EquilibriumClass::HyperbolicNodeFocus;
}

// Equilibria of the desingularized field on the exceptional line {u=0}: real
// roots of f_v(0, v), each with its Jacobian and spectral classification.
inline std::vector<AxisEquilibrium> axis_equilibria_and_linearize(const DesingularizedField& df) {
    if (!df.axis_invariant)
        throw NonInvariantAxis("{u=0} is not invariant for the desingularized field");
    std::vector<AxisEquilibrium> out;
    auto restricted = df.f.py.restrict_first_zero();
    if (restricted.empty()) return out;  // f_v vanishes identically on the axis

    const Poly2 du_fu = df.f.px.derivative(0), dv_fu = df.f.px.derivative(1);
    const Poly2 du_fv = df.f.py.derivative(0), dv_fv = df.f.py.derivative(1);

    for (const auto& root : uni::real_roots(restricted)) {
        AxisEquilibrium eq;
        eq.v_star = root.value;
        eq.v_star_exact = root.exact;
        if (root.exact) {
            Rational v = *root.exact;
            eq.jacobian = {to_double(du_fu.eval(Rational(0), v)), to_double(dv_fu.eval(Rational(0), v)),
                           to_double(du_fv.eval(Rational(0), v)), to_double(dv_fv.eval(Rational(0), v))};
        } else {
            eq.jacobian = df.f.jacobian(0.0, root.value);
        }
        eq.eigenvalues = eigenvalues(eq.jacobian);
        eq.classification = classify(eq.eigenvalues);
        out.push_back(eq);
    }
    return out;
}

// Exact recentering v -> v + v_star.
inline DesingularizedField translate_equilibrium(const DesingularizedField& df,
                                                 const Rational& v_star) {
    const Poly2 u = Poly2::var(0);
    const Poly2 shifted_v = Poly2::var(1) + Poly2(v_star);
    DesingularizedField out = df;
    out.f.px = df.f.px.compose(u, shifted_v);
    out.f.py = df.f.py.compose(u, shifted_v);
    out.axis_invariant = out.f.px.divisible_by_first_pow(1);
    return out;
}

inline PolyMap2 translate_map(const PolyMap2& m, const Rational& v_star) {
    const Poly2 u = Poly2::var(0);
    const Poly2 shifted_v = Poly2::var(1) + Poly2(v_star);
    return {m.px.compose(u, shifted_v), m.py.compose(u, shifted_v), m.var_a, m.var_b};
}

}  // namespace blowup

#endif
