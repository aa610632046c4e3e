#include "curvebound/effective1d.hpp"

#include "curvebound/eigensolver.hpp"
#include "curvebound/linalg.hpp"
#include "curvebound/numerics.hpp"
#include "curvebound/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace curvebound {

std::vector<double> EffectivePotential::samples(int n) const {
    std::vector<double> out(n);
    const double d = 2.0 * half_length / n;
    for (int j = 0; j < n; ++j) out[j] = std::max(0.0, v(-half_length + (j + 1) * d));
    return out;
}

EffectivePotential effective_potential(const CurvatureProfile& profile) {
    EffectivePotential p;
    p.half_length = profile.half_length();
    const double km = profile.kappa_max();
    p.v = [profile, km](double s) { return std::max(0.0, km - profile.kappa_at(s)); };
    p.dv = [profile](double s) { return -profile.kappa_prime_at(s); };
    for (const auto& w : profile.wells()) p.wells.push_back(w.s);
    p.gamma = profile.gamma();
    p.kappa_max = km;
    p.symmetric = profile.symmetric();
    return p;
}

namespace {

void require_wells(const EffectivePotential& pot, std::size_t n) {
    if (pot.wells.size() != n) throw ValidationError("potential does not have the required wells");
}

double arc_integral(const ScalarFn& f, double a, double b, double L, int panels) {
    // Counter-clockwise arc from a to b on the circle (−L, L].
    if (b >= a) return integrate_gl(f, a, b, panels);
    return integrate_gl(f, a, L, panels) + integrate_gl(f, -L, b, panels);
}

// ∫ over [s_w, s_end] (s_end > s_w) of ((√v)' + sign γ)/√v, sign chosen by continuity at the well.
double amplitude_integral(const EffectivePotential& pot, double s_w, double s_end, int panels, int& sign_out) {
    const double len = s_end - s_w;
    const double d0 = 1e-3 * len;
    auto integrand = [&pot](double s, int sign) {
        const double v = std::max(pot.v(s), 1e-300);
        const double r = std::sqrt(v);
        return (0.5 * pot.dv(s) / r + sign * pot.gamma) / r;
    };
    int sign = 0;
    for (int cand : {-1, 1}) {
        const double probe = std::abs(integrand(s_w + d0, cand)) * d0;
        if (probe < 0.5) {
            sign = cand;
            break;
        }
    }
    if (sign == 0) throw SolverError("amplitude integrand is singular at the well under both sign choices");
    sign_out = sign;
    auto f = [&](double s) { return integrand(s, sign); };
    const double body = integrate_gl(f, s_w + d0, s_end, panels);
    const double f1 = f(s_w + d0), f2 = f(s_w + 2 * d0);
    return body + 0.5 * d0 * (3.0 * f1 - f2);
}

}  // namespace

AgmonActions agmon_actions(const EffectivePotential& pot, int panels) {
    require_wells(pot, 2);
    const double L = pot.half_length;
    auto root = [&pot](double s) { return std::sqrt(std::max(0.0, pot.v(s))); };
    AgmonActions a;
    a.S_u = arc_integral(root, pot.s_r(), pot.s_l(), L, panels);
    a.S_d = arc_integral(root, pot.s_l(), pot.s_r(), L, panels);
    a.S = std::min(a.S_u, a.S_d);
    return a;
}

Amplitudes amplitude_factors(const EffectivePotential& pot, int panels) {
    require_wells(pot, 2);
    if (!(pot.gamma > 0.0)) throw ValidationError("wells must be non-degenerate");
    Amplitudes a;
    a.A_u = std::exp(-amplitude_integral(pot, pot.s_r(), 0.0, panels, a.sign_u));
    a.A_d = std::exp(-amplitude_integral(pot, pot.s_l(), pot.half_length, panels, a.sign_d));
    return a;
}

SplittingPrediction predicted_splitting(const EffectivePotential& pot, double h) {
    if (!(h > 0.0 && h < 1.0)) throw ValidationError("h must lie in (0, 1)");
    const AgmonActions s = agmon_actions(pot);
    const Amplitudes amp = amplitude_factors(pot);
    SplittingPrediction p;
    p.h = h;
    p.hbar = std::pow(h, 0.25);
    p.upper = {amp.A_u, pot.v(0.0), s.S_u};
    p.lower = {amp.A_d, pot.v(pot.half_length), s.S_d};
    const double bracket = p.upper.amplitude * std::sqrt(p.upper.potential_value) * std::exp(-p.upper.exponent / p.hbar) +
                           p.lower.amplitude * std::sqrt(p.lower.potential_value) * std::exp(-p.lower.exponent / p.hbar);
    p.lambda_gap = 4.0 * std::sqrt(p.hbar) * std::sqrt(pot.gamma / pi) * bracket;
    p.total = std::pow(h, 1.5) * p.lambda_gap;
    return p;
}

namespace {

std::vector<double> periodic_fd(const std::vector<double>& v, double L, double hbar, int k,
                                std::vector<std::vector<double>>* vectors) {
    const int n = static_cast<int>(v.size());
    const double d = 2.0 * L / n;
    const double c = hbar * hbar / (d * d);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(3 * n);
    for (int j = 0; j < n; ++j) {
        trip.emplace_back(j, j, 2.0 * c + v[j]);
        trip.emplace_back(j, (j + 1) % n, -c);
        trip.emplace_back(j, (j + n - 1) % n, -c);
    }
    SpMat K(n, n);
    K.setFromTriplets(trip.begin(), trip.end());
    const Eigen::VectorXd mass = Eigen::VectorXd::Constant(n, 1.0);
    const double vmin = *std::min_element(v.begin(), v.end());
    const double scale = std::max(hbar * hbar * (pi / L) * (pi / L), hbar * std::sqrt(std::max(1e-300, *std::max_element(v.begin(), v.end()))) / L);
    SubspaceOptions opts;
    opts.tolerance = 1e-12;
    const EigenSolveResult r = lowest_eigenpairs(K, mass, k, vmin - 0.1 * scale, opts);
    if (vectors) {
        vectors->clear();
        for (int j = 0; j < k; ++j) {
            Eigen::VectorXd x = r.eigenvectors.col(j) / std::sqrt(d);
            vectors->emplace_back(x.data(), x.data() + n);
        }
    }
    return r.eigenvalues;
}

std::vector<double> periodic_fourier(const std::vector<double>& v, double L, double hbar, int k,
                                     std::vector<std::vector<double>>* vectors) {
    const int n = static_cast<int>(v.size());
    if (n > 4096) throw ValidationError("fourier discretization is dense; n_s must be at most 4096");
    const double h = 2.0 * pi / n;
    const double scale = (pi / L) * (pi / L);
    Eigen::MatrixXd H(n, n);
    for (int j = 0; j < n; ++j) {
        for (int m = 0; m < n; ++m) {
            double d2;
            if (j == m) {
                d2 = -pi * pi / (3.0 * h * h) - 1.0 / 6.0;
            } else {
                const int q = j - m;
                const double sn = std::sin(q * h / 2.0);
                d2 = -((q % 2 == 0) ? 1.0 : -1.0) / (2.0 * sn * sn);
            }
            H(j, m) = -hbar * hbar * scale * d2;
        }
        H(j, j) += v[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) throw SolverError("dense periodic eigensolver failed");
    const double d = 2.0 * L / n;
    if (vectors) {
        vectors->clear();
        for (int j = 0; j < k; ++j) {
            Eigen::VectorXd x = es.eigenvectors().col(j) / std::sqrt(d);
            if (x.sum() < 0) x = -x;
            vectors->emplace_back(x.data(), x.data() + n);
        }
    }
    return {es.eigenvalues().data(), es.eigenvalues().data() + k};
}

}  // namespace

Spectrum1D solve_periodic(const EffectivePotential& pot, const PeriodicSpec& spec, int k) {
    if (spec.n_s < 256 || spec.n_s % 2 != 0) throw ValidationError("n_s must be even and at least 256");
    if (!(spec.hbar > 0.0)) throw ValidationError("hbar must be positive");
    if (k < 1 || k > spec.n_s / 4) throw ValidationError("k out of range");
    const double L = pot.half_length;
    Spectrum1D out;
    const std::vector<double> v = pot.samples(spec.n_s);
    const double d = 2.0 * L / spec.n_s;
    for (int j = 0; j < spec.n_s; ++j) out.grid.push_back(-L + (j + 1) * d);
    out.weights.assign(spec.n_s, d);
    if (spec.discretization == Discretization::fourier) {
        out.eigenvalues = periodic_fourier(v, L, spec.hbar, k, &out.eigenvectors);
        return out;
    }
    out.eigenvalues = periodic_fd(v, L, spec.hbar, k, &out.eigenvectors);
    if (spec.richardson) {
        const std::vector<double> coarse = periodic_fd(pot.samples(spec.n_s / 2), L, spec.hbar, k, nullptr);
        for (int j = 0; j < k; ++j) out.eigenvalues[j] = richardson(coarse[j], out.eigenvalues[j]);
    }
    return out;
}

std::vector<double> effective_eigs(const EffectivePotential& pot, double h, int k, int n_s) {
    if (!(h > 0.0 && h < 1.0)) throw ValidationError("h must lie in (0, 1)");
    PeriodicSpec spec;
    spec.hbar = std::pow(h, 0.25);
    spec.n_s = n_s;
    spec.discretization = n_s <= 4096 ? Discretization::fourier : Discretization::finite_difference;
    const Spectrum1D sp = solve_periodic(pot, spec, k);
    std::vector<double> mu;
    const double h32 = std::pow(h, 1.5);
    for (double lam : sp.eigenvalues) mu.push_back(-h - pot.kappa_max * h32 + h32 * lam);
    return mu;
}

TunnelingSplitting tunneling_splitting(const EffectivePotential& pot, double hbar, int n_s) {
    require_wells(pot, 2);
    if (!pot.symmetric) throw ValidationError("sector splitting needs a reflection-symmetric potential");
    if (n_s < 16 || n_s % 4 != 0) throw ValidationError("n_s must be a multiple of 4");
    const int half = n_s / 2;
    const double L = pot.half_length;
    const double d = 2.0 * L / n_s;
    const quad c = quad(hbar) * quad(hbar) / (quad(d) * quad(d));
    std::vector<double> v(half + 1);
    for (int k = 0; k <= half; ++k) v[k] = std::max(0.0, pot.v(k * d));

    BlockTridiagonal<quad> even(half + 1, 1), odd(half - 1, 1);
    for (int k = 0; k <= half; ++k) {
        const quad w = (k == 0 || k == half) ? quad(0.5) : quad(1);
        even.diag(k, 0) = w * (2 * c + quad(v[k]));
        even.mass(k, 0) = w;
        if (k > 0) even.coupling(k, 0) = -c;
    }
    for (int k = 1; k < half; ++k) {
        odd.diag(k - 1, 0) = 2 * c + quad(v[k]);
        odd.mass(k - 1, 0) = 1;
        if (k > 1) odd.coupling(k - 1, 0) = -c;
    }
    const double gap = 2.0 * hbar * std::max(pot.gamma, 1e-3);
    const GroundState<quad> ge = ground_state(even, 0.0, gap);
    const GroundState<quad> go = ground_state(odd, 0.0, gap);
    const auto& xe = ge.vector;
    const auto& xo = go.vector;
    quad overlap = 0;
    for (int k = 1; k < half; ++k) overlap += xe[k] * xo[k - 1];
    const quad up = c * xe[0] * xo[0] / overlap;
    const quad low = c * xe[half] * xo[half - 2] / overlap;
    TunnelingSplitting out;
    out.upper = static_cast<double>(up);
    out.lower = static_cast<double>(low);
    out.splitting = static_cast<double>(up + low);
    out.lambda_even = static_cast<double>(ge.eigenvalue);
    out.lambda_odd = static_cast<double>(go.eigenvalue);
    out.direct_difference = static_cast<double>(go.eigenvalue - ge.eigenvalue);
    return out;
}

}  // namespace curvebound
