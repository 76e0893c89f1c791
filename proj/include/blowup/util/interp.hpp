#ifndef BLOWUP_UTIL_INTERP_HPP
#define BLOWUP_UTIL_INTERP_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace blowup {

// Shape-preserving monotone cubic interpolant (Fritsch-Carlson).
// Knots must be strictly increasing.
class MonotoneCubic {
  public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw std::invalid_argument("need >= 2 knots");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i] < x_[i + 1])) throw std::invalid_argument("knots must increase");
        m_.resize(n);
        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
        m_[0] = d[0];
        m_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i)
            m_[i] = (d[i - 1] * d[i] > 0.0) ? 0.5 * (d[i - 1] + d[i]) : 0.0;
        // Fritsch-Carlson limiter
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (d[i] == 0.0) {
                m_[i] = m_[i + 1] = 0.0;
                continue;
            }
            double a = m_[i] / d[i], b = m_[i + 1] / d[i];
            double s = a * a + b * b;
            if (s > 9.0) {
                double t = 3.0 / std::sqrt(s);
                m_[i] = t * a * d[i];
                m_[i + 1] = t * b * d[i];
            }
        }
    }

    double xmin() const { return x_.front(); }
    double xmax() const { return x_.back(); }

    bool covers(double x) const {
        double pad = 1e-9 * (1.0 + std::abs(x));
        return x >= x_.front() - pad && x <= x_.back() + pad;
    }

    double operator()(double x) const {
        const std::size_t n = x_.size();
        if (x <= x_.front()) return y_.front() + m_.front() * (x - x_.front());
        if (x >= x_.back()) return y_.back() + m_.back() * (x - x_.back());
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
        if (i >= n - 1) i = n - 2;
        double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
        double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
        double h10 = t * (1 - t) * (1 - t);
        double h01 = t * t * (3 - 2 * t);
        double h11 = t * t * (t - 1);
        return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
    }

    const std::vector<double>& knots() const { return x_; }
    const std::vector<double>& values() const { return y_; }

  private:
    std::vector<double> x_, y_, m_;
};

inline double lerp_lookup(const std::vector<double>& x, const std::vector<double>& y, double q) {
    if (q <= x.front()) return y.front();
    if (q >= x.back()) return y.back();
    auto it = std::upper_bound(x.begin(), x.end(), q);
    std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    double t = (q - x[i]) / (x[i + 1] - x[i]);
    return y[i] + t * (y[i + 1] - y[i]);
}

}  // namespace blowup

#endif
