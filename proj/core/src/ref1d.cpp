#include "curvebound/ref1d.hpp"

#include "curvebound/linalg.hpp"
#include "curvebound/numerics.hpp"
#include "curvebound/types.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace curvebound {

HalfLineModes halfline_modes() {
    return {-1.0, [](double tau) { return std::sqrt(2.0) * std::exp(-tau); }};
}

double interval_ground_offset(double T) {
    // ω = 1 − ε solves tanh(ωT) = ω; 1 − tanh(x) = 2 / (e^{2x} + 1).
    auto g = [T](double eps) { return 2.0 / (std::exp(2.0 * (1.0 - eps) * T) + 1.0) - eps; };
    if (!(T > 1.0) || !(g(1.0 - 1e-12) < 0.0)) throw SolverError("root bracketing failure: T too small for a negative mode");
    double a = 0.0, b = 1.0 - 1e-12;
    for (int it = 0; it < 2000; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        if (g(m) > 0.0) a = m;
        else b = m;
        if (b - a <= 1e-14 * std::max(1e-300, a)) break;
    }
    const double eps = 0.5 * (a + b);
    return eps * (2.0 - eps);
}

Spectrum1D interval_spectrum_exact(const IntervalSpec& spec, int k) {
    if (k < 1) throw ValidationError("k must be at least 1");
    if (!(spec.T >= 1.0)) throw ValidationError("interval length T must be at least 1");
    Spectrum1D out;
    out.eigenvalues.push_back(-1.0 + interval_ground_offset(spec.T));
    const double T = spec.T;
    for (int n = 1; n < k; ++n) {
        // tan x = x / T on (nπ − π/2, nπ + π/2), written without poles.
        auto f = [T](double x) { return T * std::sin(x) - x * std::cos(x); };
        const double x = bisect_root(f, n * pi - 0.5 * pi, n * pi + 0.5 * pi, 1e-15);
        out.eigenvalues.push_back((x / T) * (x / T));
    }
    return out;
}

namespace {

struct Tridiag {
    std::vector<double> diag, off;  // symmetrized matrix W^{-1/2} A W^{-1/2}
    std::vector<double> w;          // node weights (trapezoid, without Δ)
    double delta = 0.0;
};

// Unknowns i = 0..n−1 at τ_i = iΔ; ũ(T) = 0 eliminated.
Tridiag build(const WeightedSpec& spec, int n) {
    const double B = spec.B;
    const double d = spec.T / n;
    const double c = -1.0 - 0.5 * B;  // ũ'(0) = c ũ(0)
    Tridiag t;
    t.delta = d;
    t.diag.resize(n);
    t.off.resize(n - 1);
    t.w.assign(n, 1.0);
    t.w[0] = 0.5;
    for (int i = 0; i < n; ++i) {
        const double tau = i * d;
        const double q = -B * B / (4.0 * (1.0 - B * tau) * (1.0 - B * tau));
        t.diag[i] = 2.0 / (d * d) + q;
    }
    // Ghost node: row 0 becomes (2/Δ² + 2c/Δ + q0) ũ0 − (2/Δ²) ũ1; symmetrize with w0 = 1/2.
    t.diag[0] += 2.0 * c / d;
    for (int i = 0; i + 1 < n; ++i) t.off[i] = -1.0 / (d * d);
    t.off[0] *= std::sqrt(2.0);
    return t;
}

void check(const WeightedSpec& spec) {
    if (!(spec.T > 1.0)) throw ValidationError("T must exceed 1");
    if (!(std::abs(spec.B) * spec.T < 1.0 / 3.0)) throw ValidationError("|B| T must be below 1/3");
    if (spec.n_grid < 16) throw ValidationError("n_grid too small");
}

std::vector<double> eigenvalues(const Tridiag& t) {
    const int n = static_cast<int>(t.diag.size());
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(t.diag.data(), n);
    Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(t.off.data(), n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw SolverError("tridiagonal eigensolver did not converge");
    return {es.eigenvalues().data(), es.eigenvalues().data() + n};
}

// Inverse iteration for the eigenvector of a symmetric tridiagonal matrix.
std::vector<double> eigenvector(const Tridiag& t, double lambda) {
    const int n = static_cast<int>(t.diag.size());
    const double shift = lambda - 1e-10 * std::max(1.0, std::abs(lambda));
    std::vector<double> x(n, 1.0), cp(n), dp(n);
    for (int it = 0; it < 3; ++it) {
        // Thomas algorithm on (A − shift I) y = x.
        double m = t.diag[0] - shift;
        cp[0] = n > 1 ? t.off[0] / m : 0.0;
        dp[0] = x[0] / m;
        for (int i = 1; i < n; ++i) {
            m = t.diag[i] - shift - t.off[i - 1] * cp[i - 1];
            cp[i] = i + 1 < n ? t.off[i] / m : 0.0;
            dp[i] = (x[i] - t.off[i - 1] * dp[i - 1]) / m;
        }
        x[n - 1] = dp[n - 1];
        for (int i = n - 2; i >= 0; --i) x[i] = dp[i] - cp[i] * x[i + 1];
        double nrm = 0.0;
        for (double v : x) nrm += v * v;
        nrm = std::sqrt(nrm);
        for (double& v : x) v /= nrm;
    }
    return x;
}

// Converts a symmetrized eigenvector to the weighted gauge on nodes 0..n (with u(T) = 0).
std::vector<double> to_weighted_gauge(const Tridiag& t, const std::vector<double>& y, double B,
                                      std::vector<double>& weights) {
    const int n = static_cast<int>(y.size());
    const double d = t.delta;
    std::vector<double> u(n + 1, 0.0);
    weights.assign(n + 1, 0.0);
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
        const double tau = i * d;
        const double ut = y[i] / std::sqrt(t.w[i]);
        u[i] = ut / std::sqrt(1.0 - B * tau);
        weights[i] = t.w[i] * d * (1.0 - B * tau);
        norm += weights[i] * u[i] * u[i];
    }
    weights[n] = 0.5 * d * (1.0 - B * n * d);
    const double scale = 1.0 / std::sqrt(norm);
    double total = 0.0;
    for (double v : u) total += v;
    for (double& v : u) v *= total < 0.0 ? -scale : scale;
    return u;
}

}  // namespace

Spectrum1D weighted_spectrum(const WeightedSpec& spec, int k) {
    check(spec);
    const Tridiag t = build(spec, spec.n_grid);
    const std::vector<double> all = eigenvalues(t);
    if (k > static_cast<int>(all.size())) throw ValidationError("k exceeds the grid size");
    Spectrum1D out;
    out.grid = linspace(0.0, spec.T, spec.n_grid);
    for (int j = 0; j < k; ++j) {
        out.eigenvalues.push_back(all[j]);
        out.eigenvectors.push_back(to_weighted_gauge(t, eigenvector(t, all[j]), spec.B, out.weights));
    }
    return out;
}

WeightedGround weighted_ground(const WeightedSpec& spec) {
    check(spec);
    const Tridiag t = build(spec, spec.n_grid);
    WeightedGround out;
    out.eigenvalue_raw = eigenvalues(t).front();
    out.eigenvalue = out.eigenvalue_raw;
    if (spec.richardson) {
        const double coarse = eigenvalues(build(spec, spec.n_grid / 2)).front();
        const double d_fine = spec.T / spec.n_grid, d_coarse = spec.T / (spec.n_grid / 2);
        const double ratio = (d_coarse * d_coarse) / (d_fine * d_fine);
        out.eigenvalue = out.eigenvalue_raw + (out.eigenvalue_raw - coarse) / (ratio - 1.0);
    }
    out.grid = linspace(0.0, spec.T, spec.n_grid);
    out.ground = to_weighted_gauge(t, eigenvector(t, out.eigenvalue_raw), spec.B, out.weights);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
        const double tau = out.grid[i];
        if (tau < spec.T / 3.0 || tau > 2.0 * spec.T / 3.0) continue;
        if (!(std::abs(out.ground[i]) > 1e-290)) continue;
        xs.push_back(tau);
        ys.push_back(std::log(std::abs(out.ground[i])));
    }
    out.decay_rate = fit_line(xs, ys).slope;
    return out;
}

}  // namespace curvebound
