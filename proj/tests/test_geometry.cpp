#include "curvebound/geometry.hpp"
#include "curvebound/numerics.hpp"
#include "curvebound/types.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace curvebound;

namespace {

CurveSpec ellipse(double a, double b) {
    CurveSpec s;
    s.kind = EllipseSpec{a, b};
    return s;
}

CurveSpec circle(double R) {
    FourierSpec f;
    f.xc = {0.0, R};
    f.xs = {0.0, 0.0};
    f.yc = {0.0, 0.0};
    f.ys = {0.0, R};
    CurveSpec s;
    s.kind = f;
    return s;
}

double ellipse_kappa(double a, double b, double theta) {
    const double st = std::sin(theta), ct = std::cos(theta);
    return a * b / std::pow(a * a * st * st + b * b * ct * ct, 1.5);
}

}  // namespace

TEST_CASE("ellipse curve is closed, regular and counter-clockwise") {
    const ClosedCurve c = build_curve(ellipse(2.0, 1.0));
    CHECK(c.signed_area() == doctest::Approx(2.0 * pi).epsilon(1e-12));
    for (double t : {0.0, 0.7, 2.1, 4.4}) {
        const Vec2 p = c.point(t), q = c.point(t + 2.0 * pi);
        CHECK(std::abs(p[0] - q[0]) < 1e-14);
        CHECK(std::abs(p[1] - q[1]) < 1e-14);
        CHECK(c.speed(t) > 0.0);
    }
}

TEST_CASE("ellipse with a <= b is rejected") {
    CHECK_THROWS_AS(build_curve(ellipse(1.0, 2.0)), ValidationError);
    CHECK_THROWS_AS(build_curve(ellipse(1.0, 1.0)), ValidationError);
}

TEST_CASE("fourier circle has length 2πR") {
    const ClosedCurve c = build_curve(circle(1.5));
    const ArcLengthTable t = arclength_parametrize(c, 256);
    CHECK(t.total_length() == doctest::Approx(3.0 * pi).epsilon(1e-13));
}

TEST_CASE("degenerate fourier curves are rejected") {
    FourierSpec f;
    f.xc = {0.0, 1.0};
    f.xs = {0.0, 0.0};
    f.yc = {0.0, 1.0};
    f.ys = {0.0, 0.0};
    CurveSpec s;
    s.kind = f;
    CHECK_THROWS_AS(build_curve(s), ValidationError);
}

TEST_CASE("ellipse perimeter: two quadrature orders and table refinement agree") {
    const ClosedCurve c = build_curve(ellipse(2.0, 1.0));
    auto speed = [&](double t) { return c.speed(t); };
    const double gk61 = integrate_adaptive(speed, 0.0, 2.0 * pi, 1e-14);
    const double gk31 = integrate_adaptive_gk31(speed, 0.0, 2.0 * pi, 1e-14);
    CHECK(std::abs(gk61 - gk31) < 1e-10);
    const double l1 = arclength_parametrize(c, 256).total_length();
    const double l2 = arclength_parametrize(c, 512).total_length();
    CHECK(std::abs(l1 - l2) < 1e-10);
    CHECK(std::abs(l1 - gk61) < 1e-10);
    CHECK(l1 == doctest::Approx(9.68844822054767619).epsilon(1e-12));
}

TEST_CASE("arc-length table: unit speed, inverse maps and origin at the top") {
    const ClosedCurve c = build_curve(ellipse(2.0, 1.0));
    const ArcLengthTable t = arclength_parametrize(c, 512);
    const Vec2 top = c.point(t.theta_of_s(0.0));
    CHECK(std::abs(top[0]) < 1e-12);
    CHECK(top[1] == doctest::Approx(1.0));
    const Vec2 bottom = c.point(t.theta_of_s(t.half_length()));
    CHECK(bottom[1] == doctest::Approx(-1.0));
    const double L = t.half_length();
    for (int j = 0; j < 64; ++j) {
        const double s = -L + (j + 0.5) * 2.0 * L / 64;
        const double th = t.theta_of_s(s);
        CHECK(std::abs(t.s_of_theta(th) - s) < 1e-9);
        const double ds = 1e-5;
        const Vec2 p = c.point(t.theta_of_s(s + ds)), q = c.point(t.theta_of_s(s - ds));
        const double speed = std::hypot(p[0] - q[0], p[1] - q[1]) / (2.0 * ds);
        CHECK(std::abs(speed - 1.0) < 1e-8);
    }
}

TEST_CASE("ellipse curvature profile matches the closed form") {
    const ClosedCurve c = build_curve(ellipse(2.0, 1.0));
    const ArcLengthTable t = arclength_parametrize(c, 512);
    const CurvatureProfile p = curvature_profile(c, t, 512);
    const CurvatureSamples& smp = p.samples();
    double worst = 0.0;
    for (int j = 0; j < smp.size(); ++j) {
        const Vec2 m = c.point(t.theta_of_s(smp.s(j)));
        const double theta = std::atan2(m[1], m[0] / 2.0);
        worst = std::max(worst, std::abs(smp.kappa[j] - ellipse_kappa(2.0, 1.0, theta)) / ellipse_kappa(2.0, 1.0, theta));
    }
    CHECK(worst < 1e-6);
    CHECK(p.kappa_max() == doctest::Approx(2.0).epsilon(1e-12));
    REQUIRE(p.wells().size() == 2);
    for (const Well& w : p.wells()) {
        const Vec2 m = c.point(t.theta_of_s(w.s));
        CHECK(std::abs(std::abs(m[0]) - 2.0) < 1e-10);
        CHECK(std::abs(m[1]) < 1e-6);
        CHECK(w.kappa_second < 0.0);
    }
    CHECK(p.symmetric());
    CHECK(std::abs(p.s_l() + p.s_r()) < 1e-8);
    CHECK(p.s_r() < 0.0);
    CHECK(p.gamma() == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("curvature derivative by finite differences of the tangent angle") {
    const ClosedCurve c = build_curve(ellipse(2.0, 1.0));
    const ArcLengthTable t = arclength_parametrize(c, 512);
    const double ds = 1e-4;
    for (double s : {-2.0, -0.3, 0.9, 3.7}) {
        auto angle = [&](double x) {
            const Vec2 d = c.derivative(t.theta_of_s(x), 1);
            return std::atan2(d[1], d[0]);
        };
        double da = angle(s + ds) - angle(s - ds);
        if (da > pi) da -= 2.0 * pi;
        if (da < -pi) da += 2.0 * pi;
        const double kappa_fd = da / (2.0 * ds);
        const double kappa = c.curvature(t.theta_of_s(s));
        CHECK(std::abs(kappa_fd - kappa) < 1e-6 * std::abs(kappa));
    }
}

TEST_CASE("γ is invariant under doubling n_s") {
    const double g1 = make_profile(ellipse(2.0, 1.0), 512).gamma();
    const double g2 = make_profile(ellipse(2.0, 1.0), 1024).gamma();
    CHECK(std::abs(g1 - g2) < 1e-6 * g1);
}

TEST_CASE("v has a positive quadratic lower bound near each well") {
    const CurvatureProfile p = make_profile(ellipse(2.0, 1.0), 1024);
    const double L = p.half_length();
    const double g2 = p.gamma() * p.gamma();
    for (const Well& w : p.wells()) {
        auto c0 = [&](double radius) {
            double c = INFINITY;
            for (int k = 1; k <= 200; ++k)
                for (double d : {radius * k / 200.0, -radius * k / 200.0})
                    c = std::min(c, (p.kappa_max() - p.kappa_at(w.s + d)) / (d * d));
            return c;
        };
        const double wide = c0(0.1 * L);
        MESSAGE("c0 / gamma^2 on 0.1 L: " << wide / g2);
        CHECK(wide > 0.0);
        CHECK(c0(0.005 * L) >= g2 * (1.0 - 1e-2));
    }
    for (double k : p.samples().kappa) CHECK(p.kappa_max() - k >= -1e-12);
}

TEST_CASE("circle has no non-degenerate maxima") {
    const ClosedCurve c = build_curve(circle(1.0));
    const ArcLengthTable t = arclength_parametrize(c, 256);
    CHECK_THROWS_AS(curvature_profile(c, t, 256), ValidationError);
}

TEST_CASE("every ellipse is flagged symmetric") {
    for (auto [a, b] : {std::pair{2.0, 1.0}, std::pair{1.5, 1.0}, std::pair{3.0, 2.5}}) {
        const CurvatureProfile p = make_profile(ellipse(a, b), 512);
        CHECK(p.symmetric());
        CHECK(p.kappa_max() == doctest::Approx(a / (b * b)).epsilon(1e-10));
        // κ_ss = −3a(a² − b²)/b⁶ at (±a, 0)
        const double gamma = std::sqrt(1.5 * a * (a * a - b * b) / std::pow(b, 6));
        CHECK(p.gamma() == doctest::Approx(gamma).epsilon(1e-6));
    }
}

TEST_CASE("non-symmetric single-well curve anchors the origin at θ = π/2") {
    FourierSpec f;
    f.xc = {0.0, 1.0, 0.15};
    f.xs = {0.0, 0.0, 0.0};
    f.yc = {0.0, 0.0, 0.0};
    f.ys = {0.0, 0.8, 0.0};
    CurveSpec s;
    s.kind = f;
    const ClosedCurve c = build_curve(s);
    CHECK_FALSE(c.mirror_symmetric());
    const ArcLengthTable t = arclength_parametrize(c, 512);
    CHECK(t.theta_origin() == doctest::Approx(pi / 2));
    const CurvatureProfile p = curvature_profile(c, t, 512, 1);
    CHECK(p.wells().size() == 1);
    CHECK_FALSE(p.symmetric());
}
