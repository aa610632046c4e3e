#include "curvebound/eigensolver.hpp"
#include "curvebound/weyl.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

using namespace curvebound;

namespace {

CurvatureProfile ellipse_profile(int n_s) {
    CurveSpec spec;
    spec.kind = EllipseSpec{2.0, 1.0};
    return make_profile(spec, n_s);
}

// ∫ √((E + κ)₊) ds over the a=2, b=1 ellipse in the angle parameter.
double ellipse_oracle(double E) {
    auto f = [E](double t) {
        const double q = 4.0 * std::sin(t) * std::sin(t) + std::cos(t) * std::cos(t);
        const double kappa = 2.0 / std::pow(q, 1.5);
        return std::sqrt(std::max(0.0, E + kappa)) * std::sqrt(q);
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 2.0 * pi, 25, 1e-12);
}

}  // namespace

TEST_CASE("κ-integral") {
    const double R = 1.5;
    auto circle = [R](double) { return 1.0 / R; };
    CHECK(kappa_integral(circle, pi * R, 1.0) == doctest::Approx(2.0 * pi * R * std::sqrt(1.0 + 1.0 / R)));
    CHECK(kappa_integral(circle, pi * R, -1.0) == 0.0);
    const CurvatureProfile p = ellipse_profile(512);
    for (double E : {1.0, 0.0, -0.5, -1.0}) CHECK(kappa_integral(p, E) == doctest::Approx(ellipse_oracle(E)).epsilon(1e-6));
    CHECK_THROWS_AS(kappa_integral(circle, 0.0, 1.0), ValidationError);
}

TEST_CASE("Weyl predictions") {
    const CurvatureProfile p = ellipse_profile(512);
    const WeylPredictions w = weyl_predictions(p, 0.01, 0.5, 1.0);
    CHECK(w.negative == doctest::Approx(9.68844822054767619 * std::sqrt(0.5) / (pi * 0.1)));
    CHECK(w.low_lying == doctest::Approx(ellipse_oracle(1.0) / (pi * std::pow(0.01, 0.25))).epsilon(1e-6));
    CHECK_THROWS_AS(weyl_predictions(p, 1.5, 0.5, 1.0), ValidationError);
    CHECK_THROWS_AS(weyl_predictions(p, 0.01, 1.0, 1.0), ValidationError);
}

TEST_CASE("inertia count matches dense generalized eigenvalues") {
    const CurvatureProfile p = ellipse_profile(64);
    GridDims d{12, {TauMap::Kind::uniform, 2.0}, 8.0};
    const RobinOperator2D op = assemble(p, std::pow(0.02, 0.25), d, Domain::full());
    const Eigen::MatrixXd K = Eigen::MatrixXd(op.K);
    const Eigen::MatrixXd M = op.M.asDiagonal();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M, Eigen::EigenvaluesOnly);
    for (double lambda : {-1.2, -0.9, -0.5, 0.0, 3.0}) {
        const int dense = static_cast<int>((es.eigenvalues().array() < lambda).count());
        CHECK(count_below(op.K, op.M, lambda) == dense);
    }
}

TEST_CASE("counting at h = 0.02") {
    const CurvatureProfile p = ellipse_profile(256);
    const CountingReport neg = counting_check(p, 0.02, ThresholdKind::negative, 0.5);
    MESSAGE("negative: " << neg.observed << " vs " << neg.predicted);
    CHECK(neg.threshold == doctest::Approx(-0.01));
    CHECK(std::abs(neg.relative_error) <= 0.15);
    const CountingReport low = counting_check(p, 0.02, ThresholdKind::low_lying, 1.0);
    MESSAGE("low-lying: " << low.observed << " vs " << low.predicted);
    CHECK(low.observed <= neg.observed);
    CHECK(low.observed > 0);

    CountingOptions tight;
    tight.budget = 2;
    CHECK_THROWS_AS(counting_check(p, 0.02, ThresholdKind::negative, 0.5, tight), SolverError);
}

TEST_CASE("bracket operators") {
    const CurvatureProfile p = ellipse_profile(256);
    const EffectivePotential pot = effective_potential(p);
    const double h = 0.01;
    const std::vector<double> zero = bracket_eigenvalues(pot, h, 0.0, 1, 5);
    const std::vector<double> eff = effective_eigs(pot, h, 5, 256);
    for (int j = 0; j < 5; ++j) CHECK(zero[j] == doctest::Approx(eff[j]).epsilon(1e-12));
    const std::vector<double> up = bracket_eigenvalues(pot, h, 2.0, 1, 5);
    const std::vector<double> down = bracket_eigenvalues(pot, h, 2.0, -1, 5);
    for (int j = 0; j < 5; ++j) {
        CHECK(down[j] < zero[j]);
        CHECK(zero[j] < up[j]);
    }
    CHECK_THROWS_AS(bracket_eigenvalues(pot, h, 2.0, 0, 5), ValidationError);
    CHECK_THROWS_AS(bracket_eigenvalues(pot, h, 20.0, -1, 5), ValidationError);
}

TEST_CASE("bracket constants") {
    const CurvatureProfile p = ellipse_profile(256);
    const BracketReport r = bracket_check(p, {0.02, 0.01}, 10);
    REQUIRE(r.fits.size() == 2);
    for (const BracketSpec& f : r.fits) {
        MESSAGE("h " << f.h << ": C+ " << f.C_plus << ", C- " << f.C_minus);
        CHECK(std::isfinite(f.C_plus));
        CHECK(std::isfinite(f.C_minus));
        CHECK(f.C_plus >= 0.0);
        CHECK(f.C_minus >= 0.0);
        const EffectivePotential pot = effective_potential(p);
        const std::vector<double> lo = bracket_eigenvalues(pot, f.h, f.C_minus, -1, 10);
        const std::vector<double> hi = bracket_eigenvalues(pot, f.h, f.C_plus, 1, 10);
        for (int j = 0; j < 10; ++j) {
            CHECK(lo[j] <= f.mu[j] + 1e-15);
            CHECK(f.mu[j] <= hi[j] + 1e-15);
        }
    }
    CHECK_THROWS_AS(bracket_check(p, {0.01}, 21), ValidationError);
    CHECK_THROWS_AS(bracket_check(p, {}, 5), ValidationError);
}
