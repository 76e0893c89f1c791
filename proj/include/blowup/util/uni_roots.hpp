#ifndef BLOWUP_UTIL_UNI_ROOTS_HPP
#define BLOWUP_UTIL_UNI_ROOTS_HPP

#include <algorithm>
#include <optional>
#include <vector>

#include "blowup/util/rational.hpp"

namespace blowup {

// One real root of a univariate polynomial with rational coefficients.
struct RealRoot {
    double value = 0.0;
    std::optional<Rational> exact;  // set when the root is rational
};

namespace uni {

using Coeffs = std::vector<Rational>;  // lowest degree first, trimmed

inline void trim(Coeffs& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline int degree(const Coeffs& p) { return static_cast<int>(p.size()) - 1; }

inline Rational eval(const Coeffs& p, const Rational& x) {
    Rational s = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * x + *it;
    return s;
}

inline Coeffs derivative(const Coeffs& p) {
    Coeffs d;
    for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<int>(i));
    trim(d);
    return d;
}

// remainder of a / b
inline Coeffs rem(Coeffs a, const Coeffs& b) {
    trim(a);
    while (degree(a) >= degree(b) && !a.empty()) {
        Rational q = a.back() / b.back();
        int shift = degree(a) - degree(b);
        for (std::size_t i = 0; i < b.size(); ++i)
            a[i + static_cast<std::size_t>(shift)] -= q * b[i];
        a.pop_back();
        trim(a);
    }
    return a;
}

inline std::vector<Coeffs> sturm_chain(const Coeffs& p) {
    std::vector<Coeffs> chain;
    Coeffs a = p;
    trim(a);
    if (a.empty()) return chain;
    chain.push_back(a);
    Coeffs b = derivative(a);
    while (!b.empty()) {
        chain.push_back(b);
        Coeffs r = rem(a, b);
        for (auto& c : r) c = -c;
        a = std::move(b);
        b = std::move(r);
    }
    return chain;
}

inline int sign_changes(const std::vector<Coeffs>& chain, const Rational& x) {
    int changes = 0, prev = 0;
    for (const auto& p : chain) {
        Rational v = eval(p, x);
        int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++changes;
        prev = s;
    }
    return changes;
}

// number of distinct real roots in (a, b]
inline int roots_in(const std::vector<Coeffs>& chain, const Rational& a, const Rational& b) {
    return sign_changes(chain, a) - sign_changes(chain, b);
}

// Cauchy bound on the absolute value of any root.
inline Rational root_bound(const Coeffs& p) {
    Rational m = 0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        Rational q = p[i] / p.back();
        if (q < 0) q = -q;
        m = std::max(m, q);
    }
    return m + 1;
}

// All rational roots (with multiplicity collapsed); deflates p in place.
inline std::vector<Rational> extract_rational_roots(Coeffs& p) {
    std::vector<Rational> roots;
    trim(p);
    if (p.size() <= 1) return roots;
    // strip trailing zero root(s)
    while (!p.empty() && p.front() == 0) {
        if (roots.empty() || roots.back() != 0) roots.push_back(0);
        p.erase(p.begin());
    }
    // scale to integer coefficients
    BigInt den = 1;
    for (const auto& c : p) den = boost::multiprecision::lcm(den, denominator(c));
    std::vector<BigInt> ip;
    for (const auto& c : p) ip.push_back(numerator(Rational(c * den)));
    if (ip.size() <= 1) return roots;

    auto divisors = [](BigInt n) {
        if (n < 0) n = -n;
        std::vector<BigInt> ds;
        for (BigInt d = 1; d * d <= n; ++d)
            if (n % d == 0) {
                ds.push_back(d);
                ds.push_back(n / d);
            }
        std::sort(ds.begin(), ds.end());
        ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
        return ds;
    };

    bool progress = true;
    while (progress && p.size() > 1) {
        progress = false;
        ip.clear();
        den = 1;
        for (const auto& c : p) den = boost::multiprecision::lcm(den, denominator(c));
        for (const auto& c : p) ip.push_back(numerator(Rational(c * den)));
        BigInt a0 = ip.front(), an = ip.back();
        if (a0 == 0) {  // zero root reappeared after deflation
            if (roots.empty() || roots.back() != 0) roots.push_back(0);
            p.erase(p.begin());
            progress = true;
            continue;
        }
        // divisor enumeration is only practical for small constant terms
        if (boost::multiprecision::abs(a0) > 1000000 || boost::multiprecision::abs(an) > 1000000)
            break;
        for (const auto& pn : divisors(a0)) {
            for (const auto& qd : divisors(an)) {
                for (int s : {1, -1}) {
                    Rational cand(s * pn, qd);
                    if (eval(p, cand) == 0) {
                        roots.push_back(cand);
                        // synthetic division by (x - cand)
                        Coeffs q(p.size() - 1);
                        Rational carry = p.back();
                        for (int i = static_cast<int>(p.size()) - 2; i >= 0; --i) {
                            q[static_cast<std::size_t>(i)] = carry;
                            carry = p[static_cast<std::size_t>(i)] + carry * cand;
                        }
                        p = std::move(q);
                        trim(p);
                        progress = true;
                        goto deflated;
                    }
                }
            }
        }
    deflated:;
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

// All distinct real roots: exact rational roots where they exist, the remaining
// ones bracketed by a Sturm chain and bisected to the given width.
inline std::vector<RealRoot> real_roots(const Coeffs& poly, double tol = 1e-12) {
    std::vector<RealRoot> out;
    Coeffs p = poly;
    trim(p);
    if (p.size() <= 1) return out;
    Coeffs deflated = p;
    for (const auto& r : extract_rational_roots(deflated))
        out.push_back({to_double(r), r});

    trim(deflated);
    if (deflated.size() > 1) {
        auto chain = sturm_chain(deflated);
        Rational bound = root_bound(deflated);

        // recursively split until each interval holds one root, then bisect
        struct Span { Rational a, b; int count; };
        std::vector<Span> stack{{-bound, bound, roots_in(chain, -bound, bound)}};
        while (!stack.empty()) {
            Span s = stack.back();
            stack.pop_back();
            if (s.count == 0) continue;
            Rational mid = (s.a + s.b) / 2;
            if (s.count == 1) {
                Rational a = s.a, b = s.b;
                while (to_double(b - a) > tol) {
                    Rational m = (a + b) / 2;
                    if (eval(deflated, m) == 0) { a = b = m; break; }
                    if (roots_in(chain, a, m) == 1)
                        b = m;
                    else
                        a = m;
                }
                out.push_back({to_double((a + b) / 2), std::nullopt});
                continue;
            }
            int left = roots_in(chain, s.a, mid);
            stack.push_back({s.a, mid, left});
            stack.push_back({mid, s.b, s.count - left});
        }
    }
    std::sort(out.begin(), out.end(), [](const RealRoot& l, const RealRoot& r) {
        return l.value < r.value;
    });
    return out;
}

}  // namespace uni
}  // namespace blowup

#endif
