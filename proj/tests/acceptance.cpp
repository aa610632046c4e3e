// One PASS/FAIL line per acceptance criterion; exit status = number of failures.
// Pass criterion numbers as arguments to run a subset.

#include "curvebound/effective1d.hpp"
#include "curvebound/interaction.hpp"
#include "curvebound/numerics.hpp"
#include "curvebound/ref1d.hpp"
#include "curvebound/tubular2d.hpp"
#include "curvebound/weyl.hpp"
#include "curvebound/wkb.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/tools/roots.hpp>

#include <chrono>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace curvebound;

namespace {

const std::vector<double> ladder = {0.14, 0.12, 0.10, 0.08};

CurvatureProfile ellipse(double a, double b, int n_s) {
    CurveSpec spec;
    spec.kind = EllipseSpec{a, b};
    return make_profile(spec, n_s);
}

double tanh_root(double T) {
    auto f = [T](double w) { return std::tanh(w * T) - w; };
    boost::math::tools::eps_tolerance<double> tol(52);
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::bisect(f, 0.5, 1.0 - 1e-15, tol, iters);
    return 0.5 * (r.first + r.second);
}

GridDims dims(int n_tau, double D, TauMap::Kind map = TauMap::Kind::sinh) {
    GridDims d;
    d.n_tau = n_tau;
    d.D = D;
    d.map.kind = map;
    return d;
}

bool monotone_toward_one(const std::vector<double>& r) {
    for (std::size_t k = 1; k < r.size(); ++k)
        if (!(std::abs(r[k] - 1.0) < std::abs(r[k - 1] - 1.0))) return false;
    return true;
}

std::string join(const std::vector<double>& v, const char* f = "%.4g") {
    std::string s;
    char buf[32];
    for (std::size_t k = 0; k < v.size(); ++k) {
        std::snprintf(buf, sizeof buf, f, v[k]);
        s += (k ? " " : "") + std::string(buf);
    }
    return s;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

Outcome c1() {
    double worst_fd = 0.0, worst_tail = 0.0;
    bool ok = true;
    for (double T : {6.0, 8.0, 10.0}) {
        WeightedSpec s;
        s.T = T;
        s.B = 0.0;
        const double w = tanh_root(T);
        const double fd = std::abs(weighted_ground(s).eigenvalue + w * w);
        const double offset = interval_ground_offset(T);
        const double tail = std::abs(offset - 4.0 * std::exp(-2.0 * T));
        ok = ok && fd <= 1e-8 && tail <= std::exp(-3.0 * T) &&
             std::abs(offset - (1.0 - w * w)) < 1e-15;
        worst_fd = std::max(worst_fd, fd);
        worst_tail = std::max(worst_tail, tail * std::exp(3.0 * T));
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "max |lambda1 - root| = %.2e (<= 1e-8), max |lambda1 + 1 - 4e^{-2T}| e^{3T} = %.3f (<= 1)",
                  worst_fd, worst_tail);
    return {ok, buf};
}

Outcome c2() {
    bool ok = true;
    std::vector<double> ratios;
    for (double B : {-0.02, -0.01, 0.01, 0.02}) {
        WeightedSpec s;
        s.B = B;
        s.T = std::abs(B) > 0.015 ? 16.0 : 20.0;  // |B| T < 1/3
        const double dev = std::abs(weighted_ground(s).eigenvalue + 1.0 + B);
        ratios.push_back(dev / (2.0 * B * B));
        ok = ok && dev <= 2.0 * B * B;
    }
    return {ok, "|lambda1 + 1 + B| / 2B^2 = " + join(ratios) + " for B = -0.02 -0.01 0.01 0.02 (T = 16 at |B| = 0.02)"};
}

Outcome c3() {
    bool ok = true;
    std::vector<double> diffs;
    for (double R : {1.0, 2.0})
        for (double hb : {0.2, 0.3}) {
            const double B = hb * hb / R;
            const double T = std::min(12.0, 0.3 / B);
            const CurvatureSamples smp = constant_samples(1.0 / R, pi * R, 16);
            double lam[2];
            for (int r = 0; r < 2; ++r)
                lam[r] = solve_lowest(assemble(smp, hb, dims(1000 << r, T * hb, TauMap::Kind::uniform), Domain::full()), 5)
                             .eigenvalues[0];
            WeightedSpec w;
            w.T = T;
            w.B = B;
            const double d = std::abs(richardson(lam[0], lam[1]) - weighted_ground(w).eigenvalue);
            diffs.push_back(d);
            ok = ok && d <= 1e-6;
        }
    return {ok, "|lambda2d - lambda1d| = " + join(diffs, "%.2e") + " for (R, hbar) = (1,.2) (1,.3) (2,.2) (2,.3)"};
}

Outcome c4() {
    const CurvatureProfile p = ellipse(2.0, 1.0, 512);
    const double S = agmon_actions(effective_potential(p)).S;
    const double g = p.gamma(), km = p.kappa_max();
    const std::vector<double> hs = {0.2, 0.14, 0.1, 0.07};
    std::vector<double> v;
    for (double hb : hs) {
        double mu[2];
        for (int r = 0; r < 2; ++r)
            mu[r] = solve_lowest(assemble(p, hb, dims(128 << r, 1.5 * S), Domain::even_sector()), 1).eigenvalues[0];
        v.push_back((richardson(mu[0], mu[1]) + 1.0 + km * hb * hb) / (hb * hb * hb));
    }
    bool monotone = true;
    for (std::size_t k = 0; k < v.size(); ++k) monotone = monotone && v[k] < g && (k == 0 || v[k] > v[k - 1]);
    // Quadratic in ħ through the three smallest ħ, evaluated at ħ = 0.
    const double x0 = hs[1], x1 = hs[2], x2 = hs[3];
    const double limit = v[1] * x1 * x2 / ((x0 - x1) * (x0 - x2)) + v[2] * x0 * x2 / ((x1 - x0) * (x1 - x2)) +
                         v[3] * x0 * x1 / ((x2 - x0) * (x2 - x1));
    const bool ok = monotone && std::abs(limit - g) <= 0.1 * g;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "(mu1 + 1 + kmax hbar^2)/hbar^3 = %s along 0.2 0.14 0.1 0.07, monotone toward gamma = %.4g: %s, "
                  "extrapolated %.4f (%.1f%%), raw deviation at 0.07 %.1f%%",
                  join(v).c_str(), g, monotone ? "yes" : "no", limit, 100.0 * (limit - g) / g, 100.0 * (v[3] - g) / g);
    return {ok, buf};
}

Outcome c5() {
    const CurvatureProfile p = ellipse(2.0, 1.0, 1024);
    const EffectivePotential pot = effective_potential(p);
    const double S = agmon_actions(pot).S;
    std::vector<double> ratios;
    for (double hb : ladder) {
        double split[2];
        for (int r = 0; r < 2; ++r) split[r] = symmetric_splitting(p, hb, dims(48 << r, 1.5 * S)).splitting;
        const double eff = hb * hb * tunneling_splitting(pot, hb, 16384).splitting;
        ratios.push_back(richardson(split[0], split[1]) / eff);
    }
    const bool ok = ratios.back() >= 0.7 && ratios.back() <= 1.3 && monotone_toward_one(ratios);
    return {ok, "(mu2 - mu1) / (hbar^2 (lambda2 - lambda1)) = " + join(ratios) + " along 0.14 0.12 0.10 0.08"};
}

Outcome c6() {
    const EffectivePotential pot = effective_potential(ellipse(2.0, 1.0, 1024));
    const double S = agmon_actions(pot).S;
    auto numeric = [&](double hb) {
        const double a = tunneling_splitting(pot, hb, 16384).splitting;
        const double b = tunneling_splitting(pot, hb, 32768).splitting;
        return richardson(a, b);
    };
    auto formula = [&](double hb) { return predicted_splitting(pot, std::pow(hb, 4)).lambda_gap; };
    std::vector<double> on_ladder, extended, x, y;
    for (double hb : ladder) on_ladder.push_back(formula(hb) / numeric(hb));
    const std::vector<double> ext = {0.05, 0.04, 0.03, 0.025};
    for (double hb : ext) {
        const double n = numeric(hb);
        extended.push_back(formula(hb) / n);
        x.push_back(1.0 / hb);
        y.push_back(std::log(n));
    }
    const double rate = -fit_line(x, y).slope;
    const bool ok = extended.back() >= 0.8 && extended.back() <= 1.2 && std::abs(rate - S) <= 0.1 * S;
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "formula / effective 1D = %s on 0.14..0.08, %s on 0.05 0.04 0.03 0.025; fitted rate %.4f vs S = %.4f (%.2f%%)",
                  join(on_ladder).c_str(), join(extended).c_str(), rate, S, 100.0 * (rate - S) / S);
    return {ok, buf};
}

Outcome c7();

Outcome c8() {
    const CurvatureProfile p = ellipse(2.0, 1.0, 512);
    const double S = agmon_actions(effective_potential(p)).S;
    const EigenvalueSeries series = eigenvalue_series(p.kappa_max(), p.gamma());
    std::vector<double> x, y, res;
    for (double hb : {0.2, 0.14, 0.1, 0.07}) {
        const ContinuumResidual r = continuum_residual(p, hb, dims(48, 1.5 * S), 0, WkbCutoffs{}, series.value(hb));
        res.push_back(r.extrapolated);
        x.push_back(std::log(hb));
        y.push_back(std::log(r.extrapolated));
    }
    const double slope = fit_line(x, y).slope;
    char buf[200];
    std::snprintf(buf, sizeof buf, "residual %s along 0.2 0.14 0.1 0.07, log-log slope %.3f (>= 3.5)",
                  join(res, "%.3e").c_str(), slope);
    return {slope >= 3.5, buf};
}

Outcome c9() {
    const CurvatureProfile p = ellipse(2.0, 1.0, 1024);
    const EffectivePotential pot = effective_potential(p);
    const double S = agmon_actions(pot).S;
    const double hb = 0.1;
    const GridDims d = dims(48, 1.5 * S);
    const SectorSplitting sp = symmetric_splitting(p, hb, d);
    const RobinOperator2D full = assemble(p, hb, d, Domain::full());
    const Eigen::VectorXd even = unfold_sector(full, assemble(p, hb, d, Domain::even_sector()), sp.even);
    const Eigen::VectorXd odd = unfold_sector(full, assemble(p, hb, d, Domain::odd_sector()), sp.odd);
    const CurvatureSamples& smp = p.samples();
    bool ok = true;
    std::vector<double> normal, tangential;
    for (int w = 0; w < 2; ++w) {
        const EikonalPhase ph = eikonal_phase(pot, w, pot.wells[1 - w], 0.45, smp);
        auto phase = [&](double x) {
            const int j = smp.wrap(static_cast<int>(std::lround((x + smp.half_length) / smp.delta())) - 1);
            return std::isnan(ph.phi[j]) ? 1e300 : ph.phi[j];
        };
        for (const Eigen::VectorXd* v : {&even, &odd}) {
            const DecayReport r = decay_diagnostics(full, *v, pot.wells[w], phase, S);
            normal.push_back(r.normal_slope);
            tangential.push_back(r.tangential_slope);
            ok = ok && std::abs(r.normal_slope + 1.0) <= 0.1 && r.tangential_slope >= 0.85 && r.tangential_slope <= 1.0;
        }
    }
    return {ok, "hbar = 0.1, normal slopes " + join(normal) + " (-1 +- 0.1), tangential slopes " + join(tangential) +
                    " ([0.85, 1]) for (right, left) x (even, odd)"};
}

Outcome c10() {
    const CurvatureProfile p = ellipse(2.0, 1.0, 512);
    CountingOptions o;
    const CountingReport neg = counting_check(p, 0.01, ThresholdKind::negative, 0.5, o);
    const CountingReport low = counting_check(p, 0.01, ThresholdKind::low_lying, 1.0, o);
    const bool ok = std::abs(neg.relative_error) <= 0.15 && std::abs(low.observed - low.predicted) <= 3.0;
    char buf[200];
    std::snprintf(buf, sizeof buf, "h = 0.01: negative %d vs %.2f (%.1f%%), low-lying %d vs %.2f (diff %.2f)", neg.observed,
                  neg.predicted, 100.0 * neg.relative_error, low.observed, low.predicted, low.observed - low.predicted);
    return {ok, buf};
}

Outcome c11() {
    std::vector<CurveSpec> curves;
    for (double a : {2.0, 1.5, 3.0}) {
        CurveSpec c;
        c.kind = EllipseSpec{a, 1.0};
        curves.push_back(c);
    }
    CurveSpec f;
    f.kind = FourierSpec{{0.0, 1.0, 0.0, 0.1}, {}, {}, {0.0, 0.6}};
    curves.push_back(f);
    bool ok = true;
    double worst_action = 0.0, worst_parity = 0.0;
    for (const CurveSpec& c : curves) {
        const CurvatureProfile p = make_profile(c, 256);
        ok = ok && p.symmetric();
        const AgmonActions a = agmon_actions(effective_potential(p));
        worst_action = std::max(worst_action, std::abs(a.S_u - a.S_d) / a.S);
        const RobinOperator2D op = assemble(p, 0.2, dims(24, 1.5 * a.S), Domain::full());
        const EigenSolveResult r = solve_lowest(op, 2);
        const CurvatureSamples& smp = op.grid.samples;
        // Reflection restricted to span{u1, u2}: eigenvalues ±1; the even
        // combination is the ground state (the pair may be numerically degenerate).
        Eigen::Matrix2d P, H;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const Eigen::VectorXd ua = r.eigenvectors.col(a), ub = r.eigenvectors.col(b);
                double s = 0.0;
                for (int j = 0; j < smp.size(); ++j)
                    for (int i = 0; i < op.width; ++i) {
                        const auto q = static_cast<Eigen::Index>(op.index(j, i));
                        s += op.M[q] * ua[q] * ub[static_cast<Eigen::Index>(op.index(smp.mirror(j), i))];
                    }
                P(a, b) = s;
                H(a, b) = ua.dot(op.K * ub);
            }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> refl(0.5 * (P + P.transpose()));
        worst_parity = std::max({worst_parity, std::abs(refl.eigenvalues()[0] + 1.0), std::abs(refl.eigenvalues()[1] - 1.0),
                                 (P - P.transpose()).norm()});
        const Eigen::Vector2d odd = refl.eigenvectors().col(0), even = refl.eigenvectors().col(1);
        ok = ok && even.dot(H * even) <= odd.dot(H * odd) + 1e-12 * std::abs(r.eigenvalues[0]);
    }
    ok = ok && worst_action <= 1e-8 && worst_parity <= 1e-6;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "4 symmetric curves: max |S_u - S_d|/S = %.1e (<= 1e-8), max reflection defect on the lowest pair = %.1e (<= 1e-6), even below odd",
                  worst_action, worst_parity);
    return {ok, buf};
}

Outcome c7() {
    std::vector<double> raw, ext, err;
    for (double hb : {0.14, 0.12, 0.10}) {
        double r[2];
        for (int k = 0; k < 2; ++k) {
            const CurvatureProfile p = ellipse(2.0, 1.0, 1024 << k);
            WellPairConfig c;
            c.dims = dims(48, 1.5 * agmon_actions(effective_potential(p)).S);
            const InteractionMatrix m = interaction_splitting(p, build_interaction_basis(p, hb, c));
            r[k] = m.splitting_estimate / symmetric_splitting(p, hb, c.dims).splitting;
        }
        raw.push_back(r[0]);
        ext.push_back(r[1] + (r[1] - r[0]) / 3.0);
        err.push_back(std::abs(r[1] - r[0]) / 3.0);
    }
    bool improving = true;
    for (std::size_t k = 1; k < ext.size(); ++k)
        improving = improving && std::abs(ext[k - 1] - 1.0) - std::abs(ext[k] - 1.0) > err[k - 1] + err[k];
    const bool ok = ext.back() >= 0.7 && ext.back() <= 1.3 && improving;
    return {ok, "2|w_lr| / (mu2 - mu1) along 0.14 0.12 0.10: n_s 1024 " + join(raw, "%.5f") + ", extrapolated " +
                    join(ext, "%.7f") + " +- " + join(err, "%.1e") + (improving ? "" : ", improvement not resolved")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> criteria = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11};
    std::set<int> selected;
    for (int k = 1; k < argc; ++k) selected.insert(std::atoi(argv[k]));
    int failures = 0;
    for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) {
        if (!selected.empty() && !selected.count(k)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k - 1]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2d: %s  %s  [%.0f s]\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str(), dt);
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures;
}
