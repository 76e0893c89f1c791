#include <gtest/gtest.h>

#include <cmath>

#include "blowup/blowdown.hpp"

using namespace blowup;

namespace {

DelayRHS plain_rhs(const char* fu, const char* fv) {
    DelayRHS rhs;
    rhs.f = PolyMap2::parse(fu, fv, "u", "v");
    rhs.forcing = make_exponential_forcing(0.0, 1.0);
    rhs.kappa = 1;
    rhs.cutoff_radius = 1e6;
    rhs.M = 1.0;
    return rhs;
}

}  // namespace

TEST(Blowdown, ConstantSegment) {
    Segment phi = Segment::constant(uniform_grid(3.0, 0.05), {0.2, 0.7});
    auto p = blow_down_manifold_point(phi, 1.5, 1);
    EXPECT_DOUBLE_EQ(p.x, 0.2);
    EXPECT_DOUBLE_EQ(p.y, 0.2 * 0.7);
    EXPECT_NEAR(p.tau, 1.5 / 0.2, 1e-9);
    EXPECT_EQ(p.side, 1);

    Segment neg = Segment::constant(uniform_grid(3.0, 0.05), {-0.2, 0.7});
    EXPECT_EQ(blow_down_manifold_point(neg, 1.5, 1).side, -1);
    EXPECT_THROW(blow_down_manifold_point(phi, -1.0, 1), ConfigError);
}

TEST(Blowdown, ExponentialHistoryClosedForm) {
    // u(theta) = 0.1 e^{-theta}: tau = int_{-sigma}^0 e^{theta}/0.1 = 10(1 - e^{-sigma})
    auto grid = uniform_grid(4.0, 0.0005);
    Segment phi = Segment::from_function(grid, [](double th) {
        return Vec2{0.1 * std::exp(-th), 0.3};
    }, TailRule::Frozen);
    for (double sigma : {0.5, 1.0, 2.0}) {
        auto p = blow_down_manifold_point(phi, sigma, 1);
        EXPECT_NEAR(p.tau, 10.0 * (1.0 - std::exp(-sigma)), 1e-6);
    }
    // tau strictly increasing in sigma
    double t1 = blow_down_manifold_point(phi, 1.0, 1).tau;
    double t2 = blow_down_manifold_point(phi, 2.0, 1).tau;
    EXPECT_GT(t2, t1);
}

TEST(Blowdown, SingularChartRejected) {
    Segment eq = Segment::constant(uniform_grid(2.0, 0.1), {0.0, 0.0});
    EXPECT_THROW(blow_down_manifold_point(eq, 1.0, 1), SingularChart);

    // regular head, but u vanishes inside the window
    auto grid = uniform_grid(2.0, 0.05);
    Segment crossing = Segment::from_function(grid, [](double th) {
        return Vec2{0.3 + th, 0.0};
    }, TailRule::Frozen);
    EXPECT_THROW(blow_down_manifold_point(crossing, 1.0, 1), SingularChart);
}

TEST(Trace, LinearSaddleExact) {
    // f = Au with A = diag(-1, 3): backward flow is e^{-sigma A}
    auto rhs = plain_rhs("0 - u", "3*v");
    Vec2 state{0.05, 0.002};
    double sigma = 1.2;
    auto traced = trace_to_zero_time(state, sigma, rhs);
    EXPECT_NEAR(traced.uv.x, 0.05 * std::exp(sigma), 1e-8);
    EXPECT_NEAR(traced.uv.y, 0.002 * std::exp(-3.0 * sigma), 1e-8);
    // tau along the arc: int_0^sigma |0.05 e^{s}|^{-1} ds backward
    double expect_tau = (1.0 - std::exp(-sigma)) / 0.05;
    EXPECT_NEAR(traced.tau, expect_tau, 1e-6);

    EXPECT_THROW(trace_to_zero_time({0.0, 0.0}, 1.0, rhs), AxisHit);
    EXPECT_THROW(trace_to_zero_time(state, -1.0, rhs), ConfigError);
}

TEST(Trace, RoundTripThroughForwardIntegration) {
    auto rhs = plain_rhs("u - 2*u*v", "3*v^2 - 3*v");
    Vec2 end{0.3, 0.2};
    double sigma = 1.5;
    auto traced = trace_to_zero_time(end, sigma, rhs);
    auto fwd = integrate_desingularized(rhs, traced.uv, sigma, 1e-11, 1e-13, 0.005);
    ASSERT_FALSE(fwd.axis_flag);
    EXPECT_NEAR(fwd.states.back().x, end.x, 1e-7);
    EXPECT_NEAR(fwd.states.back().y, end.y, 1e-7);
    EXPECT_NEAR(fwd.rho.back(), traced.tau, 1e-6 * (1.0 + traced.tau));
}

TEST(Trace, ZeroSigmaIsIdentity) {
    auto rhs = plain_rhs("0 - u", "3*v");
    auto traced = trace_to_zero_time({0.4, -0.1}, 0.0, rhs);
    EXPECT_DOUBLE_EQ(traced.uv.x, 0.4);
    EXPECT_DOUBLE_EQ(traced.uv.y, -0.1);
    EXPECT_DOUBLE_EQ(traced.tau, 0.0);
}

TEST(Trace, AxisApproachOnBackwardCollapse) {
    // u' = u - u^2: backward from small u the state collapses toward the axis
    auto rhs = plain_rhs("u - u^2", "0 - v");
    EXPECT_THROW(trace_to_zero_time({1e-10, 0.0}, 50.0, rhs), AxisApproach);
}

TEST(Reconstruct, CloudsFromChart) {
    // hand-built chart for f = (-u, 3v + u^2): heads on the graph v = -u^2/5
    auto rhs = plain_rhs("0 - u", "3*v + u^2");
    ManifoldChart chart;
    chart.sigma = 1.0;
    for (double rho : {-0.04, -0.02, 0.02, 0.04}) {
        chart.psi_heads.push_back({rho, 0.0});
        chart.w_heads.push_back({0.0, -rho * rho / 5.0});
    }
    chart.psi_heads.push_back({0.0, 0.0});  // axis hole sample
    chart.w_heads.push_back({0.0, 0.0});

    auto clouds = reconstruct_manifolds(chart, rhs);
    EXPECT_EQ(clouds.plus.size(), 2u);
    EXPECT_EQ(clouds.minus.size(), 2u);
    EXPECT_EQ(clouds.zero_time.size(), 4u);
    EXPECT_NEAR(clouds.excluded_radius, 0.02, 1e-15);
    for (const auto& p : clouds.plus) {
        EXPECT_GT(p.x, 0.0);
        EXPECT_GT(p.tau, 0.0);
        // y/x = v(0) on the graph
        EXPECT_NEAR(p.y / p.x, -p.x * p.x / 5.0, 1e-12);
    }
    for (const auto& z : clouds.zero_time) EXPECT_TRUE(z.uncharacterized);

    // mirror symmetry of the traced clouds under u -> -u
    ASSERT_EQ(clouds.plus.size(), clouds.minus.size());
    for (std::size_t i = 0; i < clouds.plus.size(); ++i) {
        const auto& pp = clouds.plus[clouds.plus.size() - 1 - i];
        const auto& pm = clouds.minus[i];
        EXPECT_NEAR(pp.x, -pm.x, 1e-12);
        EXPECT_NEAR(pp.tau, pm.tau, 1e-8);
    }
}

TEST(Reconstruct, EmptyChart) {
    auto rhs = plain_rhs("0 - u", "3*v");
    ManifoldChart chart;
    chart.sigma = 1.0;
    auto clouds = reconstruct_manifolds(chart, rhs);
    EXPECT_TRUE(clouds.plus.empty());
    EXPECT_TRUE(clouds.minus.empty());
    EXPECT_EQ(clouds.excluded_radius, 0.0);
}
