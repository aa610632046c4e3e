#include "curvebound/weyl.hpp"

#include "curvebound/eigensolver.hpp"
#include "curvebound/numerics.hpp"
#include "curvebound/ref1d.hpp"
#include "curvebound/types.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>

namespace curvebound {

double kappa_integral(const std::function<double(double)>& kappa, double L, double E) {
    if (!(L > 0.0)) throw ValidationError("half length must be positive");
    auto g = [&](double s) { return E + kappa(s); };
    constexpr int n = 4096;
    const double d = 2.0 * L / n;
    std::vector<double> roots;
    for (int j = 0; j < n; ++j) {
        const double a = -L + j * d, b = a + d;
        const double ga = g(a), gb = g(b);
        if (ga == 0.0) roots.push_back(a);
        else if (ga * gb < 0.0) roots.push_back(bisect_root(g, a, b, 1e-15));
    }
    auto root_g = [&](double s) { return std::sqrt(std::max(0.0, g(s))); };
    if (roots.empty()) {
        if (g(0.0) <= 0.0) return 0.0;
        return integrate_adaptive(root_g, -L, L, 1e-13);
    }
    boost::math::quadrature::tanh_sinh<double> ts;
    double total = 0.0;
    const std::size_t m = roots.size();
    for (std::size_t k = 0; k < m; ++k) {
        const double a = roots[k];
        const double b = k + 1 < m ? roots[k + 1] : roots[0] + 2.0 * L;
        const double mid = 0.5 * (a + b);
        if (g(mid > L ? mid - 2.0 * L : mid) <= 0.0) continue;
        auto f = [&](double s) { return root_g(s > L ? s - 2.0 * L : s); };
        total += ts.integrate(f, a, b);
    }
    return total;
}

double kappa_integral(const CurvatureProfile& profile, double E) {
    return kappa_integral([&profile](double s) { return profile.kappa_at(s); }, profile.half_length(), E);
}

WeylPredictions weyl_predictions(const CurvatureProfile& profile, double h, double Lambda, double E) {
    if (!(h > 0.0 && h < 1.0)) throw ValidationError("h must lie in (0, 1)");
    if (!(Lambda > 0.0 && Lambda < 1.0)) throw ValidationError("Λ must lie in (0, 1)");
    WeylPredictions p;
    p.h = h;
    p.negative = 2.0 * profile.half_length() * std::sqrt(1.0 - Lambda) / (pi * std::sqrt(h));
    p.low_lying = kappa_integral(profile, E) / (pi * std::pow(h, 0.25));
    return p;
}

CountingReport counting_check(const CurvatureProfile& profile, double h, ThresholdKind kind, double parameter,
                              const CountingOptions& opts) {
    CountingReport r;
    r.h = h;
    r.kind = kind;
    r.parameter = parameter;
    double scaled;
    if (kind == ThresholdKind::negative) {
        const WeylPredictions p = weyl_predictions(profile, h, parameter, 0.0);
        r.predicted = p.negative;
        scaled = -parameter;
    } else {
        if (!(h > 0.0 && h < 1.0)) throw ValidationError("h must lie in (0, 1)");
        r.predicted = kappa_integral(profile, parameter) / (pi * std::pow(h, 0.25));
        scaled = -1.0 + parameter * std::sqrt(h);
    }
    r.threshold = h * scaled;
    const RobinOperator2D op = assemble(profile, std::pow(h, 0.25), opts.dims, Domain::full());
    r.T = op.grid.T;
    r.observed = count_below(op.K, op.M, scaled);
    if (r.observed > opts.budget) throw SolverError("eigenvalue count exceeds the configured budget");
    r.relative_error = r.predicted > 0.0 ? (r.observed - r.predicted) / r.predicted : 0.0;
    return r;
}

std::vector<double> bracket_eigenvalues(const EffectivePotential& pot, double h, double C, int sign, int n, int n_s) {
    if (sign != 1 && sign != -1) throw ValidationError("bracket sign must be ±1");
    const double alpha = 1.0 + sign * C * std::sqrt(h);
    if (!(alpha > 0.0)) throw ValidationError("bracket kinetic coefficient must stay positive");
    PeriodicSpec spec;
    spec.hbar = std::sqrt(alpha) * std::pow(h, 0.25);
    spec.n_s = n_s;
    const Spectrum1D s = solve_periodic(pot, spec, n);
    std::vector<double> out(n);
    const double h32 = std::pow(h, 1.5);
    for (int j = 0; j < n; ++j) out[j] = -h + sign * C * h * h - pot.kappa_max * h32 + h32 * s.eigenvalues[j];
    return out;
}

namespace {

// Smallest C in [0, cap] with violation(C) ≤ 0; violation is non-increasing.
template <class Fn>
double smallest_constant(Fn violation, double cap) {
    if (violation(0.0) <= 0.0) return 0.0;
    if (violation(cap) > 0.0) throw SolverError("no finite bracket constant below the cap");
    double a = 0.0, b = cap;
    for (int it = 0; it < 80 && b - a > 1e-10 * std::max(1.0, b); ++it) {
        const double m = 0.5 * (a + b);
        (violation(m) > 0.0 ? a : b) = m;
    }
    return b;
}

}  // namespace

BracketReport bracket_check(const CurvatureProfile& profile, const std::vector<double>& h_grid, int n_max,
                            const CountingOptions& opts) {
    if (n_max < 1 || n_max > 20) throw ValidationError("n_max must lie in [1, 20]");
    if (h_grid.empty()) throw ValidationError("empty h-grid");
    const EffectivePotential pot = effective_potential(profile);
    BracketReport rep;
    for (double h : h_grid) {
        if (!(h > 0.0 && h < 1.0)) throw ValidationError("h must lie in (0, 1)");
        const double hb = std::pow(h, 0.25);
        const RobinOperator2D op = assemble(profile, hb, opts.dims, Domain::full());
        const double shift = -1.0 - profile.kappa_max() * hb * hb - 0.05;
        EigenSolveResult ev;
        try {
            ev = lowest_eigenpairs(op.K, op.M, n_max, shift);
        } catch (const SolverError&) {
            if (!opts.dense_fallback || op.size() > 5000) throw;
            ev = dense_lowest(op.K, op.M, n_max);
        }
        BracketSpec b;
        b.h = h;
        b.T = op.grid.T;
        for (double l : ev.eigenvalues) b.mu.push_back(h * l);
        const double depth = h * interval_ground_offset(b.T);
        const double cap_minus = std::min(1e3, 0.999 / std::sqrt(h));
        auto fit = [&](double offset, int sign, double cap) {
            return smallest_constant(
                [&](double C) {
                    const std::vector<double> e = bracket_eigenvalues(pot, h, C, sign, n_max);
                    double worst = -1e300;
                    for (int j = 0; j < n_max; ++j) worst = std::max(worst, sign * (b.mu[j] - offset - e[j]));
                    return worst;
                },
                cap);
        };
        b.C_plus = fit(0.0, 1, 1e3);
        b.C_minus = fit(0.0, -1, cap_minus);
        b.C_plus_corrected = fit(depth, 1, 1e3);
        b.C_minus_corrected = fit(depth, -1, cap_minus);
        rep.fits.push_back(b);
    }
    auto spread = [](const std::vector<double>& v) {
        const double lo = *std::min_element(v.begin(), v.end());
        const double hi = *std::max_element(v.begin(), v.end());
        return lo > 0.0 ? hi / lo : (hi > 0.0 ? INFINITY : 1.0);
    };
    auto column = [&](double BracketSpec::*field) {
        std::vector<double> v;
        for (const auto& f : rep.fits) v.push_back(f.*field);
        return v;
    };
    const std::vector<double> cp = column(&BracketSpec::C_plus), cm = column(&BracketSpec::C_minus);
    rep.C_plus_max = *std::max_element(cp.begin(), cp.end());
    rep.C_minus_max = *std::max_element(cm.begin(), cm.end());
    rep.spread_plus = spread(cp);
    rep.spread_minus = spread(cm);
    rep.spread_plus_corrected = spread(column(&BracketSpec::C_plus_corrected));
    rep.spread_minus_corrected = spread(column(&BracketSpec::C_minus_corrected));
    return rep;
}

}  // namespace curvebound
