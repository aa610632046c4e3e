#include "curvebound/effective1d.hpp"
#include "curvebound/numerics.hpp"
#include "curvebound/wkb.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <cmath>

using namespace curvebound;

namespace {

// v = sin² s on [−π, π]: Φ = 1 − cos s, ξ₀ = (1/π)^{1/4} / cos(s/2) around s = 0.
EffectivePotential sine_potential() {
    EffectivePotential p;
    p.half_length = pi;
    p.v = [](double s) { return std::sin(s) * std::sin(s); };
    p.dv = [](double s) { return std::sin(2.0 * s); };
    p.wells = {0.0, pi};
    p.gamma = 1.0;
    p.kappa_max = 1.0;
    p.symmetric = true;
    return p;
}

CurvatureProfile ellipse_profile(int n_s) {
    CurveSpec spec;
    spec.kind = EllipseSpec{2.0, 1.0};
    return make_profile(spec, n_s);
}

}  // namespace

TEST_CASE("eigenvalue series coefficients") {
    const EigenvalueSeries s = eigenvalue_series(2.0, 3.0);
    CHECK(s.mu0 == -1.0);
    CHECK(s.mu1 == 0.0);
    CHECK(s.mu2 == -2.0);
    CHECK(s.mu3 == 3.0);
    CHECK(s.value(0.1) == doctest::Approx(-1.0 - 0.02 + 0.003));
}

TEST_CASE("eikonal phase and transport amplitude against closed forms") {
    const EffectivePotential pot = sine_potential();
    const CurvatureSamples smp = constant_samples(1.0, pi, 512);
    const EikonalPhase ph = eikonal_phase(pot, 0, pi, 0.45, smp);
    const TransportAmplitude amp = transport_amplitude(pot, ph);
    const double c0 = std::pow(1.0 / pi, 0.25);
    int inside = 0;
    for (int j = 0; j < smp.size(); ++j) {
        const double s = smp.s(j);
        if (std::abs(s) > pi - 0.45) {
            CHECK(std::isnan(ph.phi[j]));
            continue;
        }
        ++inside;
        CHECK(ph.phi[j] == doctest::Approx(1.0 - std::cos(s)).epsilon(1e-10));
        CHECK(std::abs(ph.dphi[j] * ph.dphi[j] - pot.v(s)) < 1e-12);
        CHECK(amp.xi0[j] == doctest::Approx(c0 / std::cos(0.5 * s)).epsilon(1e-9));
    }
    CHECK(inside > 400);
}

TEST_CASE("ellipse phase reaches the Agmon actions at the cuts") {
    const CurvatureProfile p = ellipse_profile(1024);
    const EffectivePotential pot = effective_potential(p);
    const CurvatureSamples& smp = p.samples();
    const EikonalPhase ph = eikonal_phase(pot, 0, p.s_l(), 0.45, smp);
    auto root = [&](double s) { return std::sqrt(std::max(0.0, pot.v(s))); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double up = GK::integrate(root, p.s_r(), 0.0, 15, 1e-13);
    const double down = GK::integrate(root, -p.half_length(), p.s_r(), 15, 1e-13);
    CHECK(ph.phi[smp.origin_index()] == doctest::Approx(up).epsilon(1e-9));
    CHECK(ph.phi[smp.seam_index()] == doctest::Approx(down).epsilon(1e-9));
    const AgmonActions S = agmon_actions(pot);
    CHECK(2.0 * up == doctest::Approx(S.S_u).epsilon(1e-10));
    CHECK(2.0 * down == doctest::Approx(S.S_d).epsilon(1e-10));
    CHECK(ph.dphi[smp.origin_index()] > 0.0);
    CHECK(ph.dphi[smp.seam_index()] < 0.0);
}

namespace {

double transport_defect(int n_s) {
    const CurvatureProfile p = ellipse_profile(n_s);
    const EffectivePotential pot = effective_potential(p);
    const CurvatureSamples& smp = p.samples();
    const EikonalPhase ph = eikonal_phase(pot, 0, p.s_l(), 0.45, smp);
    const TransportAmplitude amp = transport_amplitude(pot, ph);
    const double d = smp.delta();
    double worst = 0.0;
    for (int j = 0; j < smp.size(); ++j) {
        const int a = smp.wrap(j - 1), b = smp.wrap(j + 1);
        if (std::isnan(ph.phi[a]) || std::isnan(ph.phi[b]) || std::abs(ph.offset[j]) < 0.05) continue;
        const double dxi = (amp.xi0[b] - amp.xi0[a]) / (2.0 * d);
        const double ddphi = (ph.dphi[b] - ph.dphi[a]) / (2.0 * d);
        const double r = 2.0 * ph.dphi[j] * dxi + (ddphi - pot.gamma) * amp.xi0[j];
        worst = std::max(worst, std::abs(r) / (pot.gamma * amp.xi0[j]));
    }
    return worst;
}

}  // namespace

TEST_CASE("transport equation holds on the ellipse grid") {
    const double coarse = transport_defect(1024), fine = transport_defect(2048);
    CHECK(fine < 2e-4);
    CHECK(coarse / fine > 3.5);
}

TEST_CASE("quasimode norm tends to one") {
    const CurvatureProfile p = ellipse_profile(512);
    const double S = agmon_actions(effective_potential(p)).S;
    GridDims d;
    d.n_tau = 48;
    d.D = 1.5 * S;
    double last = INFINITY;
    for (double hb : {0.2, 0.14, 0.1}) {
        const WkbProblem w = build_quasimode(p, hb, d, 0, WkbCutoffs{});
        const double dev = std::abs(w.quasimode.norm - 1.0);
        CHECK(dev < last);
        last = dev;
    }
    CHECK(last < 0.06);
}

TEST_CASE("continuum residual is fourth order") {
    const CurvatureProfile p = ellipse_profile(512);
    const double S = agmon_actions(effective_potential(p)).S;
    GridDims d;
    d.n_tau = 48;
    d.D = 1.5 * S;
    const EigenvalueSeries series = eigenvalue_series(p.kappa_max(), p.gamma());
    std::vector<double> x, y;
    for (double hb : {0.2, 0.14, 0.1}) {
        const ContinuumResidual r = continuum_residual(p, hb, d, 0, WkbCutoffs{}, series.value(hb));
        CHECK(r.cutoff_part < 1e-6 * r.extrapolated);
        x.push_back(std::log(hb));
        y.push_back(std::log(r.extrapolated));
    }
    const double slope = fit_line(x, y).slope;
    MESSAGE("residual slope " << slope);
    CHECK(slope >= 3.5);
}

TEST_CASE("wkb input validation") {
    const EffectivePotential pot = sine_potential();
    const CurvatureSamples smp = constant_samples(1.0, pi, 128);
    CHECK_THROWS_AS(eikonal_phase(pot, 2, pi, 0.45, smp), ValidationError);
    CHECK_THROWS_AS(eikonal_phase(pot, 0, pi, 4.0, smp), ValidationError);
    CHECK_THROWS_AS(eikonal_phase(pot, 0, 0.2, 0.45, smp), ValidationError);
    const CurvatureProfile p = ellipse_profile(256);
    const RobinOperator2D full = assemble(p, 0.2, GridDims{16, {}, 8.0}, Domain::full());
    const EikonalPhase ph = eikonal_phase(effective_potential(p), 0, p.s_l(), 0.45, p.samples());
    CHECK_THROWS_AS(build_quasimode(full, ph, transport_amplitude(effective_potential(p), ph), WkbCutoffs{}),
                    ValidationError);
}
