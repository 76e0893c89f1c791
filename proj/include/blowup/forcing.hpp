#ifndef BLOWUP_FORCING_HPP
#define BLOWUP_FORCING_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "blowup/errors.hpp"

namespace blowup {

enum class ForcingDomain { TwoSided, ForwardOnly, BackwardOnly };

// Scalar forcing h with a certified exponential envelope:
// |h| and |h'| are both bounded by H e^{-eta tau} on the declared domain.
struct ForcingFn {
    std::function<double(double)> h;
    std::function<double(double)> hprime;
    double envelope_H = 1.0;
    double decay_eta = 1.0;
    ForcingDomain one_sided = ForcingDomain::TwoSided;
    std::string family = "custom";

    bool in_domain(double tau) const {
        switch (one_sided) {
            case ForcingDomain::ForwardOnly: return tau >= 0.0;
            case ForcingDomain::BackwardOnly: return tau <= 0.0;
            default: return true;
        }
    }
};

// h(tau) = c e^{-eta tau}; envelope H = |c| max(1, eta) covers h'.
inline ForcingFn make_exponential_forcing(double c, double eta) {
    if (eta <= 0.0) throw ConfigError("forcing decay rate must be positive");
    ForcingFn f;
    f.h = [c, eta](double t) { return c * std::exp(-eta * t); };
    f.hprime = [c, eta](double t) { return -c * eta * std::exp(-eta * t); };
    f.envelope_H = std::abs(c) * std::max(1.0, eta);
    f.decay_eta = eta;
    f.family = "exponential";
    return f;
}

// h(tau) = c e^{-a tau} sin(b tau + phase); |h'| <= |c| (a + |b|) e^{-a tau}.
inline ForcingFn make_exp_trig_forcing(double c, double a, double b, double phase = 0.0) {
    if (a <= 0.0) throw ConfigError("forcing decay rate must be positive");
    ForcingFn f;
    f.h = [=](double t) { return c * std::exp(-a * t) * std::sin(b * t + phase); };
    f.hprime = [=](double t) {
        return c * std::exp(-a * t) * (b * std::cos(b * t + phase) - a * std::sin(b * t + phase));
    };
    f.envelope_H = std::abs(c) * std::max(1.0, a + std::abs(b));
    f.decay_eta = a;
    f.family = "exp_trig";
    return f;
}

// h(tau) = c tau^m e^{-a tau} on tau >= 0 (forward-only; the polynomial factor
// grows in backward time). Envelope with any eta < a:
//   tau^m e^{-(a-eta) tau} <= (m/(e (a-eta)))^m.
inline ForcingFn make_exp_poly_forcing(double c, int m, double a, double eta) {
    if (a <= 0.0 || eta <= 0.0 || eta >= a) throw ConfigError("need 0 < eta < a");
    if (m < 0) throw ConfigError("polynomial degree must be nonnegative");
    ForcingFn f;
    f.h = [=](double t) { return c * std::pow(t, m) * std::exp(-a * t); };
    f.hprime = [=](double t) {
        double tm1 = (m == 0) ? 0.0 : m * std::pow(t, m - 1);
        return c * std::exp(-a * t) * (tm1 - a * std::pow(t, m));
    };
    double gap = a - eta;
    double peak = (m == 0) ? 1.0 : std::pow(m / (std::exp(1.0) * gap), m);
    double peak1 = (m <= 1) ? 1.0 : std::pow((m - 1) / (std::exp(1.0) * gap), m - 1);
    f.envelope_H = std::abs(c) * std::max(peak, m * peak1 + a * peak);
    f.decay_eta = eta;
    f.one_sided = ForcingDomain::ForwardOnly;
    f.family = "exp_poly";
    return f;
}

// Tabulated samples with monotone linear interpolation; envelope as declared.
inline ForcingFn make_tabulated_forcing(std::vector<double> taus, std::vector<double> values,
                                        double H, double eta,
                                        ForcingDomain domain = ForcingDomain::ForwardOnly) {
    if (taus.size() != values.size() || taus.size() < 2)
        throw ConfigError("tabulated forcing needs matching sample arrays");
    auto interp = [taus = std::move(taus), values = std::move(values)](double t) {
        if (t <= taus.front()) return values.front();
        if (t >= taus.back()) return values.back();
        auto it = std::upper_bound(taus.begin(), taus.end(), t);
        std::size_t i = static_cast<std::size_t>(it - taus.begin()) - 1;
        double w = (t - taus[i]) / (taus[i + 1] - taus[i]);
        return values[i] + w * (values[i + 1] - values[i]);
    };
    ForcingFn f;
    f.h = interp;
    f.hprime = [interp](double t) {
        double d = 1e-6;
        return (interp(t + d) - interp(t - d)) / (2 * d);
    };
    f.envelope_H = H;
    f.decay_eta = eta;
    f.one_sided = domain;
    f.family = "tabulated";
    return f;
}

struct EnvelopeReport {
    double max_h_ratio = 0.0;       // max |h(tau)| e^{eta tau}
    double max_hprime_ratio = 0.0;  // max |h'(tau)| e^{eta tau}
    bool pass = false;
};

// Sample-checks the declared envelope on a grid of times.
inline EnvelopeReport verify_envelope(const ForcingFn& fn, const std::vector<double>& grid) {
    EnvelopeReport rep;
    for (double tau : grid) {
        if (!fn.in_domain(tau)) throw OutOfRange("sample outside the declared forcing domain");
        double w = std::exp(fn.decay_eta * tau);
        rep.max_h_ratio = std::max(rep.max_h_ratio, std::abs(fn.h(tau)) * w);
        rep.max_hprime_ratio = std::max(rep.max_hprime_ratio, std::abs(fn.hprime(tau)) * w);
    }
    double limit = fn.envelope_H * (1.0 + 1e-9);
    rep.pass = rep.max_h_ratio <= limit && rep.max_hprime_ratio <= limit;
    return rep;
}

}  // namespace blowup

#endif
