#ifndef BLOWUP_POLY_HPP
#define BLOWUP_POLY_HPP

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "blowup/util/mat2.hpp"
#include "blowup/util/rational.hpp"

namespace blowup {

// Bivariate polynomial with exact rational coefficients. The coefficient map
// is kept canonical: no explicitly stored zero terms.
class Poly2 {
  public:
    // key = (exponent of first var, exponent of second var)
    using Key = std::pair<int, int>;
    using Terms = std::map<Key, Rational>;

    Poly2() = default;
    explicit Poly2(const Rational& c) {
        if (c != 0) terms_[{0, 0}] = c;
    }

    static Poly2 monomial(const Rational& c, int i, int j) {
        Poly2 p;
        if (c != 0) p.terms_[{i, j}] = c;
        return p;
    }
    static Poly2 var(int which) { return monomial(1, which == 0 ? 1 : 0, which == 0 ? 0 : 1); }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Rational coeff(int i, int j) const {
        auto it = terms_.find({i, j});
        return it == terms_.end() ? Rational(0) : it->second;
    }

    int total_degree() const {
        int d = 0;
        for (const auto& [k, c] : terms_) d = std::max(d, k.first + k.second);
        return d;
    }

    Poly2 operator+(const Poly2& o) const {
        Poly2 r = *this;
        for (const auto& [k, c] : o.terms_) r.add_term(k, c);
        return r;
    }
    Poly2 operator-(const Poly2& o) const {
        Poly2 r = *this;
        for (const auto& [k, c] : o.terms_) r.add_term(k, -c);
        return r;
    }
    Poly2 operator-() const {
        Poly2 r;
        for (const auto& [k, c] : terms_) r.terms_[k] = -c;
        return r;
    }
    Poly2 operator*(const Poly2& o) const {
        Poly2 r;
        for (const auto& [ka, ca] : terms_)
            for (const auto& [kb, cb] : o.terms_)
                r.add_term({ka.first + kb.first, ka.second + kb.second}, ca * cb);
        return r;
    }
    Poly2 operator*(const Rational& c) const {
        Poly2 r;
        if (c == 0) return r;
        for (const auto& [k, cc] : terms_) r.terms_[k] = cc * c;
        return r;
    }
    bool operator==(const Poly2& o) const { return terms_ == o.terms_; }

    Rational eval(const Rational& x, const Rational& y) const {
        Rational s = 0;
        for (const auto& [k, c] : terms_) s += c * pow_r(x, k.first) * pow_r(y, k.second);
        return s;
    }

    double eval(double x, double y) const {
        double s = 0.0;
        for (const auto& [k, c] : terms_)
            s += to_double(c) * pow_d(x, k.first) * pow_d(y, k.second);
        return s;
    }

    Poly2 derivative(int which) const {
        Poly2 r;
        for (const auto& [k, c] : terms_) {
            if (which == 0 && k.first > 0)
                r.add_term({k.first - 1, k.second}, c * k.first);
            else if (which == 1 && k.second > 0)
                r.add_term({k.first, k.second - 1}, c * k.second);
        }
        return r;
    }

    // Substitute first var -> p, second var -> q.
    Poly2 compose(const Poly2& p, const Poly2& q) const {
        Poly2 r;
        for (const auto& [k, c] : terms_) {
            Poly2 t(c);
            for (int i = 0; i < k.first; ++i) t = t * p;
            for (int j = 0; j < k.second; ++j) t = t * q;
            r = r + t;
        }
        return r;
    }

    // Smallest exponent of the first variable over all terms (0 for the zero poly).
    int valuation_first() const {
        if (terms_.empty()) return 0;
        int v = -1;
        for (const auto& [k, c] : terms_) v = (v < 0) ? k.first : std::min(v, k.first);
        return v;
    }

    bool divisible_by_first_pow(int k) const { return valuation_first() >= k || is_zero(); }

    // Exact division by (first var)^k; throws if a term has lower valuation.
    Poly2 divide_first_pow(int k) const {
        Poly2 r;
        for (const auto& [key, c] : terms_) {
            if (key.first < k) throw std::domain_error("nonzero remainder in division by u^k");
            r.terms_[{key.first - k, key.second}] = c;
        }
        return r;
    }

    // Coefficients in the second variable after setting the first variable to 0,
    // lowest degree first.
    std::vector<Rational> restrict_first_zero() const {
        std::vector<Rational> cs;
        for (const auto& [k, c] : terms_) {
            if (k.first != 0) continue;
            if (static_cast<int>(cs.size()) <= k.second) cs.resize(k.second + 1, Rational(0));
            cs[static_cast<std::size_t>(k.second)] = c;
        }
        while (!cs.empty() && cs.back() == 0) cs.pop_back();
        return cs;
    }

    // sum_{terms != const} |c| * r^(i+j); bounds |p(x)-p(0)| on the closed ball of
    // radius r (in the max norm of the coordinates).
    double deviation_bound(double r) const {
        double s = 0.0;
        for (const auto& [k, c] : terms_) {
            int d = k.first + k.second;
            if (d == 0) continue;
            s += std::abs(to_double(c)) * pow_d(r, d);
        }
        return s;
    }

    double coeff_abs_sum_bound(double r) const {
        double s = 0.0;
        for (const auto& [k, c] : terms_)
            s += std::abs(to_double(c)) * pow_d(r, k.first + k.second);
        return s;
    }

    // Canonical text form: graded-lex sorted monomials "c * a^i b^j".
    std::string to_string(const std::string& va, const std::string& vb) const {
        if (terms_.empty()) return "0";
        std::vector<std::pair<Key, Rational>> sorted(terms_.begin(), terms_.end());
        std::sort(sorted.begin(), sorted.end(), [](const auto& l, const auto& r) {
            int dl = l.first.first + l.first.second, dr = r.first.first + r.first.second;
            if (dl != dr) return dl < dr;
            return l.first > r.first;  // higher first-var power first within a degree
        });
        std::ostringstream os;
        bool first = true;
        for (const auto& [k, c] : sorted) {
            Rational ac = c < 0 ? Rational(-c) : c;
            if (first)
                os << (c < 0 ? "-" : "");
            else
                os << (c < 0 ? " - " : " + ");
            first = false;
            bool havevars = k.first > 0 || k.second > 0;
            if (ac != 1 || !havevars) {
                os << rational_to_string(ac);
                if (havevars) os << "*";
            }
            if (k.first > 0) {
                os << va;
                if (k.first > 1) os << "^" << k.first;
            }
            if (k.second > 0) {
                if (k.first > 0) os << "*";
                os << vb;
                if (k.second > 1) os << "^" << k.second;
            }
        }
        return os.str();
    }

    static Poly2 parse(const std::string& text, const std::string& va, const std::string& vb);

  private:
    void add_term(const Key& k, const Rational& c) {
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            if (c != 0) terms_[k] = c;
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    static Rational pow_r(const Rational& x, int n) {
        Rational r = 1;
        for (int i = 0; i < n; ++i) r *= x;
        return r;
    }
    static double pow_d(double x, int n) {
        double r = 1.0;
        for (int i = 0; i < n; ++i) r *= x;
        return r;
    }

    Terms terms_;
};

inline Poly2 Poly2::parse(const std::string& text, const std::string& va, const std::string& vb) {
    Poly2 result;
    std::size_t pos = 0;
    const std::size_t n = text.size();
    auto skip_ws = [&] { while (pos < n && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos; };

    skip_ws();
    if (pos >= n) throw std::invalid_argument("empty polynomial");
    bool first_term = true;
    while (pos < n) {
        skip_ws();
        int sign = 1;
        if (text[pos] == '+' || text[pos] == '-') {
            sign = text[pos] == '-' ? -1 : 1;
            ++pos;
        } else if (!first_term) {
            throw std::invalid_argument("expected '+' or '-' between terms");
        }
        first_term = false;
        skip_ws();
        Rational coef = 1;
        bool saw_factor = false;
        int ea = 0, eb = 0;
        while (pos < n) {
            skip_ws();
            if (pos >= n || text[pos] == '+' || text[pos] == '-') break;
            if (text[pos] == '*') {
                ++pos;
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(text[pos]))) {
                std::size_t start = pos;
                while (pos < n && (std::isdigit(static_cast<unsigned char>(text[pos])) ||
                                   text[pos] == '/'))
                    ++pos;
                coef *= parse_rational(text.substr(start, pos - start));
                saw_factor = true;
                continue;
            }
            // variable name
            std::size_t start = pos;
            while (pos < n && (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                               text[pos] == '_'))
                ++pos;
            std::string name = text.substr(start, pos - start);
            if (name.empty()) throw std::invalid_argument("unexpected character in polynomial");
            int expo = 1;
            skip_ws();
            if (pos < n && text[pos] == '^') {
                ++pos;
                skip_ws();
                std::size_t es = pos;
                while (pos < n && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
                if (es == pos) throw std::invalid_argument("missing exponent");
                expo = std::stoi(text.substr(es, pos - es));
            }
            if (name == va)
                ea += expo;
            else if (name == vb)
                eb += expo;
            else
                throw std::invalid_argument("unknown variable '" + name + "'");
            saw_factor = true;
        }
        if (!saw_factor) throw std::invalid_argument("empty term");
        result = result + Poly2::monomial(coef * sign, ea, eb);
    }
    return result;
}

// A pair of bivariate polynomials: a planar polynomial vector field.
struct PolyMap2 {
    Poly2 px, py;
    std::string var_a = "x", var_b = "y";

    Vec2 eval(double x, double y) const { return {px.eval(x, y), py.eval(x, y)}; }
    std::pair<Rational, Rational> eval(const Rational& x, const Rational& y) const {
        return {px.eval(x, y), py.eval(x, y)};
    }
    Mat2 jacobian(double x, double y) const {
        return {px.derivative(0).eval(x, y), px.derivative(1).eval(x, y),
                py.derivative(0).eval(x, y), py.derivative(1).eval(x, y)};
    }

    std::string to_string() const {
        return "(" + px.to_string(var_a, var_b) + ", " + py.to_string(var_a, var_b) + ")";
    }

    static PolyMap2 parse(const std::string& sx, const std::string& sy,
                          const std::string& va = "x", const std::string& vb = "y") {
        return {Poly2::parse(sx, va, vb), Poly2::parse(sy, va, vb), va, vb};
    }
};

}  // namespace blowup

#endif
