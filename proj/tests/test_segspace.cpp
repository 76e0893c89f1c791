#include <gtest/gtest.h>

#include <cmath>

#include "blowup/segment.hpp"

using namespace blowup;

TEST(Segment, ConstructionAndInterpolation) {
    Segment s({0.0, -1.0, -2.0}, {{1.0, 0.0}, {0.0, 1.0}, {2.0, 2.0}}, TailRule::Zero);
    EXPECT_DOUBLE_EQ(s.at(0.0).x, 1.0);
    EXPECT_DOUBLE_EQ(s.at(-0.5).x, 0.5);  // linear between grid points
    EXPECT_DOUBLE_EQ(s.at(-0.5).y, 0.5);
    EXPECT_DOUBLE_EQ(s.at(-1.5).x, 1.0);
    EXPECT_DOUBLE_EQ(s.at(-5.0).x, 0.0);  // zero tail
    EXPECT_DOUBLE_EQ(s.window(), 2.0);

    EXPECT_THROW(Segment({-1.0, 0.0}, {{}, {}}), ConfigError);       // grid must start at 0
    EXPECT_THROW(Segment({0.0, 0.0}, {{}, {}}), ConfigError);        // must descend
    EXPECT_THROW(Segment({0.0}, {Vec2{}, Vec2{}}), ConfigError);     // size mismatch
}

TEST(Segment, TailRules) {
    Segment frozen({0.0, -1.0}, {{1.0, 0.0}, {2.0, 3.0}}, TailRule::Frozen);
    EXPECT_DOUBLE_EQ(frozen.at(-10.0).x, 2.0);

    // linear-system tail continues with e^{(theta + 1) A} applied to the end value
    Mat2 A = Mat2::diag(1.0, -1.0);
    Segment lin({0.0, -1.0}, {{1.0, 0.0}, {1.0, 1.0}}, TailRule::LinearSystem, A);
    Vec2 v = lin.at(-2.0);
    EXPECT_NEAR(v.x, std::exp(-1.0), 1e-14);
    EXPECT_NEAR(v.y, std::exp(1.0), 1e-14);
}

TEST(Bnorm, ConstantSegment) {
    BParams bp{1.0, 1.0, 1.0};
    Segment s = Segment::constant(uniform_grid(1.0, 0.1), {1.0, 0.0});
    // weight e^{theta} <= 1, so the sup sits at theta = 0; the frozen tail
    // contributes e^{-lambda Theta} * 1 < 1
    EXPECT_NEAR(bnorm(s, bp), 1.0, 1e-14);
}

TEST(Bnorm, GrowingHistoryPeaksAtWindowEnd) {
    // phi(theta) = e^{-2 theta} x0, lambda = 1, zero tail, Theta = 1:
    // weighted value e^{-theta} peaks at theta = -1 with value e
    BParams bp{1.0, 1.0, 1.0};
    auto grid = uniform_grid(1.0, 0.01);
    Segment s = Segment::from_function(grid, [](double th) {
        return Vec2{std::exp(-2.0 * th), 0.0};
    }, TailRule::Zero);
    EXPECT_NEAR(bnorm(s, bp), std::exp(1.0), 1e-10);
}

TEST(Bnorm, UnboundedTails) {
    BParams bp{1.0, 1.0, 1.0};
    auto grid = uniform_grid(1.0, 0.1);
    // linear-system tail whose backward growth beats the weight decay
    Segment s = Segment::from_function(grid, [](double th) {
        return Vec2{std::exp(-2.0 * th), 0.0};
    }, TailRule::LinearSystem, Mat2::diag(-2.0, -2.0));
    EXPECT_THROW(bnorm(s, bp), UnboundedTail);

    // frozen nonzero tail with nonpositive lambda has no finite weighted sup
    BParams bad{0.0, 1.0, 1.0};
    Segment f = Segment::constant(grid, {1.0, 0.0});
    EXPECT_THROW(bnorm(f, bad), UnboundedTail);

    // but a tail growing slower backward than the weight decays is fine:
    // e^{lambda theta} e^{-theta/2} peaks at theta = 0
    Segment ok = Segment::from_function(grid, [](double th) {
        return Vec2{std::exp(-0.5 * th), 0.0};
    }, TailRule::LinearSystem, Mat2::diag(-0.5, -0.5));
    EXPECT_NEAR(bnorm(ok, bp), 1.0, 1e-6);
}

TEST(Bnorm, TentApproximantNormConstant) {
    // ||Gamma_n x||_B = ||x|| for every n: K = 1 for this weight
    BParams bp{0.5, 1.0, 20.0};
    Vec2 x{0.6, -0.8};
    for (int n : {1, 4, 16, 64}) {
        Segment g = gamma_n(x, n);
        EXPECT_NEAR(bnorm(g, bp), 1.0, 1e-9) << n;
        EXPECT_DOUBLE_EQ(g.head().x, x.x);
        EXPECT_DOUBLE_EQ(g.at(-1.0 / n).norm(), 0.0);
    }
    EXPECT_THROW(gamma_n(x, 0), ConfigError);
}

TEST(HistoryIntegral, ConstantAndLinear) {
    auto grid = uniform_grid(3.0, 0.05);
    Segment one = Segment::constant(grid, {1.0, 0.0});
    EXPECT_NEAR(history_integral(one, 2.0, 1), 2.0, 1e-10);
    EXPECT_NEAR(history_integral(one, 2.0, 3), 2.0, 1e-10);

    // u(s) = 2 + s on [-1, 0]: integral of 1/(2+s) = log 2
    Segment lin = Segment::from_function(grid, [](double th) { return Vec2{2.0 + th, 0.0}; },
                                         TailRule::Frozen);
    EXPECT_NEAR(history_integral(lin, 1.0, 1), std::log(2.0), 1e-9);
}

TEST(HistoryIntegral, SingularHistories) {
    auto grid = uniform_grid(2.0, 0.05);
    // u crosses zero inside the window: divergent
    Segment cross = Segment::from_function(grid, [](double th) { return Vec2{0.5 + th, 0.0}; },
                                           TailRule::Frozen);
    EXPECT_TRUE(std::isinf(history_integral(cross, 2.0, 1)));
    // but the integral over a stretch before the zero is finite
    EXPECT_TRUE(std::isfinite(history_integral(cross, 0.25, 1)));

    // head exactly on the axis
    Segment dead = Segment::constant(grid, {0.0, 1.0});
    EXPECT_TRUE(std::isinf(history_integral(dead, 1.0, 1)));

    // zero tail makes any integral reaching past the window divergent
    Segment zt = Segment::constant(grid, {1.0, 0.0});
    Segment zt2({0.0, -2.0}, {{1.0, 0.0}, {1.0, 0.0}}, TailRule::Zero);
    EXPECT_TRUE(std::isinf(history_integral(zt2, 5.0, 1)));
    // frozen tail extends the constant exactly
    EXPECT_NEAR(history_integral(zt, 5.0, 1), 5.0, 1e-9);
}

TEST(HistoryIntegral, TrivialSpan) {
    auto grid = uniform_grid(1.0, 0.1);
    Segment s = Segment::constant(grid, {1.0, 0.0});
    EXPECT_EQ(history_integral(s, 0.0, 1), 0.0);
    EXPECT_EQ(history_integral(s, -1.0, 1), 0.0);
}

TEST(Lipschitz, CheckExamples) {
    auto grid = uniform_grid(1.0, 0.05);
    Segment slow = Segment::from_function(grid, [](double th) { return Vec2{0.5 * th, 0.0}; });
    auto rep = lipschitz_check(slow, 1.0);
    EXPECT_TRUE(rep.certified);
    EXPECT_NEAR(rep.max_ratio, 0.5, 1e-12);

    Segment fast = Segment::from_function(grid, [](double th) { return Vec2{3.0 * th, 0.0}; });
    EXPECT_FALSE(lipschitz_check(fast, 1.0).certified);
    EXPECT_TRUE(lipschitz_check(fast, 3.0).certified);
}

TEST(Segment, ArithmeticAndSupProperty) {
    BParams bp{0.5, 1.0, 4.0};
    auto grid = uniform_grid(4.0, 0.05);
    Segment a = Segment::from_function(grid, [](double th) { return Vec2{std::cos(th), th}; },
                                       TailRule::Frozen);
    Segment b = Segment::from_function(grid, [](double th) { return Vec2{std::sin(th), 1.0}; },
                                       TailRule::Frozen);
    Segment sum = a + b;
    for (double th : {0.0, -0.7, -2.3}) {
        EXPECT_NEAR(sum.at(th).x, a.at(th).x + b.at(th).x, 1e-12);
        EXPECT_NEAR(sum.at(th).y, a.at(th).y + b.at(th).y, 1e-12);
    }
    // triangle inequality and pointwise bound ||phi(theta)|| <= e^{-lambda theta} ||phi||_B
    double na = bnorm(a, bp), nb = bnorm(b, bp);
    EXPECT_LE(bnorm(sum, bp), na + nb + 1e-12);
    for (double th : {0.0, -1.0, -3.0})
        EXPECT_LE(a.at(th).norm(), std::exp(-bp.lambda * th) * na * (1 + 1e-12));
}
