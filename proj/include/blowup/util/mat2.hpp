#ifndef BLOWUP_UTIL_MAT2_HPP
#define BLOWUP_UTIL_MAT2_HPP

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace blowup {

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double c) const { return {c * x, c * y}; }
    Vec2 operator/(double c) const { return {x / c, y / c}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double c, const Vec2& v) { return v * c; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

struct Mat2 {
    // row-major: [a b; c d]
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    Mat2() = default;
    Mat2(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 zero() { return {}; }
    static Mat2 diag(double p, double q) { return {p, 0.0, 0.0, q}; }

    Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    Mat2 operator*(const Mat2& m) const {
        return {a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d};
    }
    Mat2 operator+(const Mat2& m) const { return {a + m.a, b + m.b, c + m.c, d + m.d}; }
    Mat2 operator-(const Mat2& m) const { return {a - m.a, b - m.b, c - m.c, d - m.d}; }
    Mat2 operator*(double s) const { return {s * a, s * b, s * c, s * d}; }

    double trace() const { return a + d; }
    double det() const { return a * d - b * c; }

    Mat2 inverse() const {
        double dt = det();
        if (dt == 0.0) throw std::domain_error("singular 2x2 matrix");
        return Mat2{d, -b, -c, a} * (1.0 / dt);
    }

    // spectral norm
    double norm() const {
        double s = a * a + b * b + c * c + d * d;
        double dt = det();
        double disc = std::max(0.0, s * s - 4.0 * dt * dt);
        return std::sqrt(0.5 * (s + std::sqrt(disc)));
    }

    double max_abs() const {
        return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
    }
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

struct Eig2 {
    std::complex<double> lambda1, lambda2;
    bool real() const { return lambda1.imag() == 0.0 && lambda2.imag() == 0.0; }
};

inline Eig2 eigenvalues(const Mat2& m) {
    double tr = m.trace(), dt = m.det();
    double disc = tr * tr / 4.0 - dt;
    Eig2 e;
    if (disc >= 0.0) {
        double s = std::sqrt(disc);
        e.lambda1 = tr / 2.0 + s;
        e.lambda2 = tr / 2.0 - s;
    } else {
        double s = std::sqrt(-disc);
        e.lambda1 = {tr / 2.0, s};
        e.lambda2 = {tr / 2.0, -s};
    }
    return e;
}

// Closed-form matrix exponential e^{tA}; branches on the eigenvalue structure.
inline Mat2 expm(const Mat2& A, double t) {
    double tr = A.trace();
    double mu = tr / 2.0;
    Mat2 B = A - Mat2::diag(mu, mu);  // traceless part
    double disc = -B.det();           // B^2 = disc * I
    Mat2 part;
    if (disc > 1e-300) {
        double w = std::sqrt(disc);
        double ch = std::cosh(w * t), sh = std::sinh(w * t) / w;
        part = Mat2::identity() * ch + B * sh;
    } else if (disc < -1e-300) {
        double w = std::sqrt(-disc);
        part = Mat2::identity() * std::cos(w * t) + B * (std::sin(w * t) / w);
    } else {
        part = Mat2::identity() + B * t;  // defective / scalar case
    }
    return std::exp(mu * t) * part;
}

}  // namespace blowup

#endif
