#include "curvebound/ref1d.hpp"
#include "curvebound/types.hpp"

#include <boost/math/tools/roots.hpp>
#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace curvebound;

namespace {

// Independent root of tanh(ωT) = ω by boost's bracketing solver.
double tanh_root(double T) {
    auto f = [T](double w) { return std::tanh(w * T) - w; };
    boost::math::tools::eps_tolerance<double> tol(52);
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::bisect(f, 0.5, 1.0 - 1e-15, tol, iters);
    return 0.5 * (r.first + r.second);
}

double weighted_dot(const std::vector<double>& w, const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * a[i] * b[i];
    return s;
}

}  // namespace

TEST_CASE("half-line model") {
    const HalfLineModes m = halfline_modes();
    CHECK(m.eigenvalue == -1.0);
    CHECK(m.ground(0.0) == doctest::Approx(std::sqrt(2.0)));
    const double d = 1e-6;
    const double slope = (m.ground(d) - m.ground(0.0)) / d;
    CHECK(slope == doctest::Approx(-m.ground(0.0)).epsilon(1e-5));
    double norm = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double t = (i + 0.5) * 40.0 / n;
        norm += m.ground(t) * m.ground(t) * 40.0 / n;
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("interval ground state against the secular equation") {
    const double w = tanh_root(5.0);
    const Spectrum1D s = interval_spectrum_exact({5.0}, 1);
    CHECK(std::abs(s.eigenvalues[0] + w * w) < 1e-14);
    for (double T : {6.0, 8.0, 10.0}) {
        const double l1 = interval_spectrum_exact({T}, 1).eigenvalues[0];
        CHECK(std::abs(l1 - (-1.0 + 4.0 * std::exp(-2.0 * T))) <= std::exp(-3.0 * T));
    }
}

TEST_CASE("interval excited states are non-negative and solve tan x = x/T") {
    for (double T : {2.0, 3.0, 6.0}) {
        const Spectrum1D s = interval_spectrum_exact({T}, 4);
        CHECK(s.eigenvalues[1] >= 0.0);
        for (int n = 1; n < 4; ++n) {
            const double x = std::sqrt(s.eigenvalues[n]) * T;
            CHECK(std::abs(std::tan(x) - x / T) < 1e-9 * (1.0 + std::abs(std::tan(x))));
            CHECK(s.eigenvalues[n] > s.eigenvalues[n - 1]);
        }
    }
}

TEST_CASE("interval spectrum rejects bad input") {
    CHECK_THROWS_AS(interval_spectrum_exact({0.5}, 1), ValidationError);
    CHECK_THROWS_AS(interval_spectrum_exact({5.0}, 0), ValidationError);
}

TEST_CASE("B = 0 discretization reproduces the transcendental root") {
    for (double T : {6.0, 8.0, 10.0}) {
        WeightedSpec spec;
        spec.T = T;
        spec.B = 0.0;
        spec.n_grid = 4000;
        const WeightedGround g = weighted_ground(spec);
        const double w = tanh_root(T);
        CHECK(std::abs(g.eigenvalue + w * w) < 1e-8);
    }
}

TEST_CASE("second-order convergence at B = 0") {
    const double exact = -std::pow(tanh_root(10.0), 2);
    std::vector<double> err;
    for (int n : {500, 1000, 2000, 4000}) {
        WeightedSpec spec;
        spec.T = 10.0;
        spec.n_grid = n;
        spec.richardson = false;
        err.push_back(std::abs(weighted_ground(spec).eigenvalue_raw - exact));
    }
    for (std::size_t k = 1; k < err.size(); ++k) CHECK(std::log2(err[k - 1] / err[k]) >= 1.9);
}

TEST_CASE("two-term expansion in B") {
    for (double B : {-0.02, -0.01, 0.01, 0.02}) {
        WeightedSpec spec;
        spec.B = B;
        spec.T = std::abs(B) > 0.015 ? 16.0 : 20.0;
        const WeightedGround g = weighted_ground(spec);
        CHECK(std::abs(g.eigenvalue + 1.0 + B) <= 2.0 * B * B);
    }
}

TEST_CASE("λ1 decreases with B and the ground state is positive") {
    double prev = INFINITY;
    for (double B : {-0.01, -0.005, 0.0, 0.005, 0.01}) {
        WeightedSpec spec;
        spec.B = B;
        const WeightedGround g = weighted_ground(spec);
        CHECK(g.eigenvalue < prev);
        prev = g.eigenvalue;
        for (std::size_t i = 0; i + 1 < g.ground.size(); ++i) CHECK(g.ground[i] > 0.0);
        CHECK(g.decay_rate == doctest::Approx(-1.0).epsilon(0.05));
        CHECK(weighted_dot(g.weights, g.ground, g.ground) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("eigenvectors are orthonormal in the weighted inner product") {
    WeightedSpec spec;
    spec.T = 10.0;
    spec.B = 0.02;
    spec.n_grid = 2000;
    const Spectrum1D s = weighted_spectrum(spec, 3);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const double d = weighted_dot(s.weights, s.eigenvectors[a], s.eigenvectors[b]);
            CHECK(std::abs(d - (a == b ? 1.0 : 0.0)) < 1e-10);
        }
    CHECK(s.eigenvalues[0] < s.eigenvalues[1]);
    CHECK(s.eigenvalues[1] < s.eigenvalues[2]);
}

TEST_CASE("eigenvalue shift in B is controlled by |B| T (|λ|+1)") {
    const double T = 10.0;
    double fitted = 0.0;
    for (double B : {-0.03, -0.01, 0.01, 0.03}) {
        WeightedSpec s0, sb;
        s0.T = sb.T = T;
        sb.B = B;
        const Spectrum1D e0 = weighted_spectrum(s0, 2), eb = weighted_spectrum(sb, 2);
        for (int n = 0; n < 2; ++n) {
            const double c = std::abs(eb.eigenvalues[n] - e0.eigenvalues[n]) /
                             (std::abs(B) * T * (std::abs(e0.eigenvalues[n]) + 1.0));
            fitted = std::max(fitted, c);
        }
    }
    MESSAGE("fitted constant " << fitted);
    CHECK(fitted < 1.0);
}

TEST_CASE("weighted spec invariants are enforced") {
    WeightedSpec spec;
    spec.T = 20.0;
    spec.B = 0.02;
    CHECK_THROWS_AS(weighted_ground(spec), ValidationError);
}
