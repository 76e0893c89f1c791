#include <gtest/gtest.h>

#include "blowup/poly.hpp"
#include "blowup/util/uni_roots.hpp"

using namespace blowup;

TEST(Poly, ParseToStringRoundTrip) {
    const char* cases[] = {
        "x^2 - 2*x*y",
        "y^2 - 2*x*y",
        "1/2*x + 3*y^2 - 7",
        "x^3*y^2 - 5/3*x + y",
        "0",
    };
    for (const char* s : cases) {
        Poly2 p = Poly2::parse(s, "x", "y");
        Poly2 q = Poly2::parse(p.to_string("x", "y"), "x", "y");
        EXPECT_EQ(p, q) << s;
    }
}

TEST(Poly, ParseRejectsGarbage) {
    EXPECT_THROW(Poly2::parse("x + z", "x", "y"), std::invalid_argument);
    EXPECT_THROW(Poly2::parse("", "x", "y"), std::invalid_argument);
    EXPECT_THROW(Poly2::parse("x ^", "x", "y"), std::invalid_argument);
    EXPECT_THROW(Poly2::parse("x y +", "x", "y"), std::invalid_argument);
}

TEST(Poly, ExactEval) {
    Poly2 p = Poly2::parse("x^2 - 2*x*y + 1/3", "x", "y");
    Rational v = p.eval(Rational(1, 2), Rational(3));
    // 1/4 - 2*(1/2)*3 + 1/3 = 1/4 - 3 + 1/3 = -29/12
    EXPECT_EQ(v, Rational(-29, 12));
    EXPECT_NEAR(p.eval(0.5, 3.0), -29.0 / 12.0, 1e-15);
}

TEST(Poly, Arithmetic) {
    Poly2 a = Poly2::parse("x + y", "x", "y");
    Poly2 b = Poly2::parse("x - y", "x", "y");
    EXPECT_EQ(a * b, Poly2::parse("x^2 - y^2", "x", "y"));
    EXPECT_EQ(a + b, Poly2::parse("2*x", "x", "y"));
    EXPECT_EQ(a - a, Poly2());
    EXPECT_TRUE((a - a).is_zero());
}

TEST(Poly, Derivative) {
    Poly2 p = Poly2::parse("x^3*y - 2*x*y^2 + 5", "x", "y");
    EXPECT_EQ(p.derivative(0), Poly2::parse("3*x^2*y - 2*y^2", "x", "y"));
    EXPECT_EQ(p.derivative(1), Poly2::parse("x^3 - 4*x*y", "x", "y"));
}

TEST(Poly, Compose) {
    // p(x,y) = x^2 + y, substitute x -> u*v, y -> u + 1
    Poly2 p = Poly2::parse("x^2 + y", "x", "y");
    Poly2 r = p.compose(Poly2::parse("u*v", "u", "v"), Poly2::parse("u + 1", "u", "v"));
    EXPECT_EQ(r, Poly2::parse("u^2*v^2 + u + 1", "u", "v"));
}

TEST(Poly, ValuationAndDivision) {
    Poly2 p = Poly2::parse("u^3*v - 2*u^2", "u", "v");
    EXPECT_EQ(p.valuation_first(), 2);
    EXPECT_TRUE(p.divisible_by_first_pow(2));
    EXPECT_FALSE(p.divisible_by_first_pow(3));
    EXPECT_EQ(p.divide_first_pow(2), Poly2::parse("u*v - 2", "u", "v"));
    EXPECT_THROW(p.divide_first_pow(3), std::domain_error);
    EXPECT_EQ(Poly2().valuation_first(), 0);
}

TEST(Poly, RestrictFirstZero) {
    Poly2 p = Poly2::parse("3*v^2 - 3*v + u*v^5", "u", "v");
    auto cs = p.restrict_first_zero();
    ASSERT_EQ(cs.size(), 3u);  // 0 - 3v + 3v^2
    EXPECT_EQ(cs[0], Rational(0));
    EXPECT_EQ(cs[1], Rational(-3));
    EXPECT_EQ(cs[2], Rational(3));
}

TEST(Poly, DeviationBound) {
    // |p(x,y) - p(0,0)| on the max-norm ball of radius r
    Poly2 p = Poly2::parse("2*x + 3*x*y^2 - 7", "x", "y");
    double r = 0.5;
    double bound = p.deviation_bound(r);
    EXPECT_NEAR(bound, 2 * 0.5 + 3 * 0.125, 1e-15);
    // sampled deviation never exceeds the bound
    for (int i = -4; i <= 4; ++i)
        for (int j = -4; j <= 4; ++j) {
            double x = r * i / 4.0, y = r * j / 4.0;
            EXPECT_LE(std::abs(p.eval(x, y) - p.eval(0.0, 0.0)), bound * (1 + 1e-12));
        }
}

TEST(Poly, CoeffAbsSumBound) {
    Poly2 p = Poly2::parse("2*x - 3*y^2 + 1", "x", "y");
    EXPECT_NEAR(p.coeff_abs_sum_bound(2.0), 2 * 2 + 3 * 4 + 1, 1e-15);
}

TEST(PolyMap, JacobianAndEval) {
    PolyMap2 f = PolyMap2::parse("x^2 - 2*x*y", "y^2 - 2*x*y");
    Vec2 v = f.eval(1.0, 2.0);
    EXPECT_NEAR(v.x, 1 - 4, 1e-15);
    EXPECT_NEAR(v.y, 4 - 4, 1e-15);
    Mat2 J = f.jacobian(1.0, 2.0);
    EXPECT_NEAR(J.a, 2 * 1 - 2 * 2, 1e-15);
    EXPECT_NEAR(J.b, -2 * 1, 1e-15);
    EXPECT_NEAR(J.c, -2 * 2, 1e-15);
    EXPECT_NEAR(J.d, 2 * 2 - 2 * 1, 1e-15);
}

TEST(UniRoots, RationalRootsExact) {
    // 3v(v-1): roots {0, 1}, both exact
    uni::Coeffs p{Rational(0), Rational(-3), Rational(3)};
    auto roots = uni::real_roots(p);
    ASSERT_EQ(roots.size(), 2u);
    ASSERT_TRUE(roots[0].exact && roots[1].exact);
    EXPECT_EQ(*roots[0].exact, Rational(0));
    EXPECT_EQ(*roots[1].exact, Rational(1));
}

TEST(UniRoots, IrrationalRootsBracketed) {
    // v^2 - 2: +-sqrt(2), not rational
    uni::Coeffs p{Rational(-2), Rational(0), Rational(1)};
    auto roots = uni::real_roots(p, 1e-13);
    ASSERT_EQ(roots.size(), 2u);
    EXPECT_FALSE(roots[0].exact);
    EXPECT_NEAR(roots[0].value, -std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(roots[1].value, std::sqrt(2.0), 1e-12);
}

TEST(UniRoots, MixedAndNoRealRoots) {
    // (v - 1/2)(v^2 + 1): one rational root, complex pair ignored
    uni::Coeffs p{Rational(-1, 2), Rational(1), Rational(-1, 2), Rational(1)};
    auto roots = uni::real_roots(p);
    ASSERT_EQ(roots.size(), 1u);
    ASSERT_TRUE(roots[0].exact);
    EXPECT_EQ(*roots[0].exact, Rational(1, 2));

    uni::Coeffs q{Rational(1), Rational(0), Rational(1)};  // v^2 + 1
    EXPECT_TRUE(uni::real_roots(q).empty());
}
