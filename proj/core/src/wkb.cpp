#include "curvebound/wkb.hpp"

#include "curvebound/numerics.hpp"
#include "curvebound/ref1d.hpp"
#include "curvebound/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace curvebound {

EigenvalueSeries eigenvalue_series(double kappa_max, double gamma) {
    EigenvalueSeries s;
    s.mu2 = -kappa_max;
    s.mu3 = gamma;
    return s;
}

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

double ccw(double from, double to, double L) {
    double d = to - from;
    while (d < 0.0) d += 2.0 * L;
    while (d >= 2.0 * L) d -= 2.0 * L;
    return d;
}

// Cumulative ∫_0^{t_k} f along one side of the well, t sorted ascending.
// The first piece handles a 0/0 integrand at t = 0 by linear extrapolation.
std::vector<double> cumulative(const ScalarFn& f, const std::vector<double>& t, bool singular_start) {
    std::vector<double> out(t.size());
    double acc = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (k == 0 && singular_start) {
            const double d0 = std::min(1e-4, 0.25 * t[0]);
            const double f1 = f(d0), f2 = f(2.0 * d0);
            acc = 0.5 * d0 * (3.0 * f1 - f2) + integrate_gl(f, d0, t[0], 2);
        } else {
            acc += integrate_gl(f, prev, t[k], 2);
        }
        out[k] = acc;
        prev = t[k];
    }
    return out;
}

// Applies `fn` to each side of the well: nodes with offset of sign d, sorted by |offset|.
template <class Fn>
void per_side(const EikonalPhase& ph, Fn fn) {
    for (int d : {1, -1}) {
        std::vector<int> idx;
        for (std::size_t j = 0; j < ph.offset.size(); ++j)
            if (!std::isnan(ph.offset[j]) && ph.offset[j] * d > 0.0) idx.push_back(static_cast<int>(j));
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return std::abs(ph.offset[a]) < std::abs(ph.offset[b]); });
        if (idx.empty()) continue;
        std::vector<double> t;
        for (int j : idx) t.push_back(std::abs(ph.offset[j]));
        fn(d, idx, t);
    }
}

double interval_omega(double T) { return std::sqrt(1.0 - interval_ground_offset(T)); }

}  // namespace

EikonalPhase eikonal_phase(const EffectivePotential& pot, int well, double excluded, double eta,
                           const CurvatureSamples& samples) {
    if (well < 0 || well >= static_cast<int>(pot.wells.size())) throw ValidationError("well index out of range");
    const double L = pot.half_length;
    if (!(eta > 0.0 && eta < L)) throw ValidationError("excluded half-width must lie in (0, L)");
    EikonalPhase ph;
    ph.well = pot.wells[well];
    ph.excluded = excluded;
    ph.eta = eta;
    const double u_well = ccw(excluded, ph.well, L);
    if (u_well <= eta || u_well >= 2.0 * L - eta) throw ValidationError("the well lies inside the excluded arc");
    const int n = samples.size();
    ph.sigma.resize(n);
    ph.phi.assign(n, nan_value);
    ph.dphi.assign(n, nan_value);
    ph.offset.assign(n, nan_value);
    for (int j = 0; j < n; ++j) {
        ph.sigma[j] = samples.s(j);
        const double u = ccw(excluded, ph.sigma[j], L);
        if (u > eta && u < 2.0 * L - eta) {
            const double off = u - u_well;
            ph.offset[j] = std::abs(off) < 1e-9 * L ? 0.0 : off;
        }
    }
    const double s_w = ph.well;
    auto root = [&pot](double s) { return std::sqrt(std::max(0.0, pot.v(s))); };
    per_side(ph, [&](int d, const std::vector<int>& idx, const std::vector<double>& t) {
        auto f = [&](double x) { return root(s_w + d * x); };
        const std::vector<double> c = cumulative(f, t, false);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            ph.phi[idx[k]] = c[k];
            ph.dphi[idx[k]] = d * root(ph.sigma[idx[k]]);
        }
    });
    for (int j = 0; j < n; ++j)
        if (std::abs(ph.offset[j]) == 0.0) ph.phi[j] = ph.dphi[j] = 0.0;
    return ph;
}

TransportAmplitude transport_amplitude(const EffectivePotential& pot, const EikonalPhase& ph) {
    if (!(pot.gamma > 0.0)) throw ValidationError("well must be non-degenerate");
    TransportAmplitude a;
    a.gamma = pot.gamma;
    const double g = pot.gamma;
    const double c0 = std::pow(g / pi, 0.25);
    a.xi0.assign(ph.phi.size(), nan_value);
    const double s_w = ph.well;
    // Along t = |σ − s_ω|: (Φ″ − γ) / (2Φ′) with Φ′ = √v, Φ″ = ± v′ / (2√v).
    per_side(ph, [&](int d, const std::vector<int>& idx, const std::vector<double>& t) {
        auto f = [&](double x) {
            const double s = s_w + d * x;
            const double r = std::sqrt(std::max(pot.v(s), 1e-300));
            return (d * 0.5 * pot.dv(s) / r - g) / (2.0 * r);
        };
        const double probe = std::min(1e-4, 0.25 * t.front());
        if (std::abs(f(probe)) * probe > 0.5) throw SolverError("transport integrand blows up at the well; wrong well classification");
        const std::vector<double> c = cumulative(f, t, true);
        for (std::size_t k = 0; k < idx.size(); ++k) a.xi0[idx[k]] = c0 * std::exp(-c[k]);
    });
    for (std::size_t j = 0; j < ph.offset.size(); ++j)
        if (ph.offset[j] == 0.0) a.xi0[j] = c0;
    return a;
}

WKBQuasimode build_quasimode(const RobinOperator2D& op, const EikonalPhase& ph, const TransportAmplitude& amp,
                             const WkbCutoffs& cut) {
    if (op.kind != DomainKind::single_well) throw ValidationError("quasimode requires a single-well operator");
    if (static_cast<int>(ph.phi.size()) != op.grid.samples.size()) throw ValidationError("phase and operator grids differ");
    if (!(cut.sigma_ramp > 0.0)) throw ValidationError("σ-cutoff ramp must be positive");
    const double L = op.grid.samples.half_length;
    const double dist_well = std::min(ccw(ph.excluded, ph.well, L), ccw(ph.well, ph.excluded, L));
    if (dist_well <= cut.eta + cut.sigma_ramp) throw ValidationError("σ-cutoff plateau does not contain the well");
    WKBQuasimode q;
    q.hbar = op.grid.hbar;
    q.T = op.grid.T;
    q.cutoffs = cut;
    const double h = q.hbar;
    const double T = q.T;
    const int nt = op.width;

    std::vector<double> u(nt);
    if (cut.transverse == TransverseProfile::halfline) {
        const Cutoff chi{cut.tau_plateau, cut.tau_support};
        for (int i = 0; i < nt; ++i) u[i] = std::sqrt(2.0) * std::exp(-op.grid.tau[i]) * chi(op.grid.tau[i] / T);
    } else {
        const double w = interval_omega(T);
        const double e = std::exp(-2.0 * w * T);
        const double norm2 = (1.0 - e) / (2.0 * w) - 2.0 * T * e + e * (1.0 - e) / (2.0 * w);
        const double c = 1.0 / std::sqrt(norm2);
        for (int i = 0; i < nt; ++i) {
            const double t = op.grid.tau[i];
            u[i] = c * (std::exp(-w * t) - std::exp(w * (t - 2.0 * T)));
        }
    }

    q.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(op.size()));
    q.chi_sigma.assign(op.blocks, 0.0);
    const double pre = std::pow(h, -0.25);
    for (int c = 0; c < op.blocks; ++c) {
        const int j = op.grid.columns[c];
        const double dist = std::min(ccw(ph.excluded, ph.sigma[j], L), ccw(ph.sigma[j], ph.excluded, L));
        const double chi = smooth_step((dist - cut.eta) / cut.sigma_ramp);
        q.chi_sigma[c] = chi;
        if (chi == 0.0) continue;
        if (std::isnan(ph.phi[j]) || std::isnan(amp.xi0[j])) throw SolverError("phase undefined on a quasimode column");
        const double col = pre * chi * std::exp(-ph.phi[j] / h) * amp.xi0[j];
        for (int i = 0; i < nt; ++i) q.values[static_cast<Eigen::Index>(op.index(c, i))] = col * u[i];
    }
    q.norm = std::sqrt(q.values.dot(op.M.cwiseProduct(q.values)));
    return q;
}

WkbProblem build_quasimode(const CurvatureProfile& profile, double hbar, const GridDims& dims, int well,
                           const WkbCutoffs& cutoffs) {
    WkbProblem p;
    p.pot = effective_potential(profile);
    if (well < 0 || well >= static_cast<int>(p.pot.wells.size())) throw ValidationError("well index out of range");
    const double L = p.pot.half_length;
    double excluded;
    if (p.pot.wells.size() == 2) excluded = p.pot.wells[1 - well];
    else {
        excluded = p.pot.wells[well] + L;
        if (excluded > L) excluded -= 2.0 * L;
    }
    p.op = assemble(profile, hbar, dims, Domain::single_well(excluded, cutoffs.eta, L));
    p.phase = eikonal_phase(p.pot, well, excluded, cutoffs.eta, p.op.grid.samples);
    p.amplitude = transport_amplitude(p.pot, p.phase);
    p.quasimode = build_quasimode(p.op, p.phase, p.amplitude, cutoffs);
    return p;
}

namespace {

Eigen::VectorXd residual_field(const RobinOperator2D& op, const WKBQuasimode& q, double mu) {
    if (q.values.size() != static_cast<Eigen::Index>(op.size())) throw ValidationError("quasimode and operator grids differ");
    return (op.K * q.values - mu * op.M.cwiseProduct(q.values)).cwiseQuotient(op.M);
}

struct Accumulated {
    double all = 0.0, interior = 0.0, cut = 0.0, core = 0.0, weighted = 0.0;
};

// M-weighted sums of r²; the restricted parts skip the Robin row.
template <class Value>
Accumulated accumulate(const RobinOperator2D& op, const WKBQuasimode& q, const EikonalPhase& ph, Value value) {
    Accumulated a;
    for (int c = 0; c < op.blocks; ++c) {
        const int j = op.grid.columns[c];
        const double chi = q.chi_sigma[c];
        double col = 0.0, inner = 0.0;
        for (int i = 0; i < op.width; ++i) {
            const auto p = static_cast<Eigen::Index>(op.index(c, i));
            const double r = value(c, i);
            const double t = op.M[p] * r * r;
            col += t;
            if (i > 0) inner += t;
        }
        a.all += col;
        a.interior += inner;
        if (chi > 0.0 && chi < 1.0) a.cut += inner;
        if (chi == 1.0) {
            a.core += inner;
            a.weighted += inner * std::exp(2.0 * ph.phi[j] / q.hbar);
        }
    }
    return a;
}

double mass_norm(const RobinOperator2D& op, const Eigen::VectorXd& v) {
    const double nn = v.dot(op.M.cwiseProduct(v));
    if (!(nn > 0.0)) throw SolverError("quasimode has zero norm");
    return std::sqrt(nn);
}

}  // namespace

WkbResidual quasimode_residual(const RobinOperator2D& op, const WKBQuasimode& q, const EikonalPhase& ph, double mu) {
    const Eigen::VectorXd res = residual_field(op, q, mu);
    WkbResidual r;
    r.mu = mu;
    const double nrm = mass_norm(op, q.values);
    r.rayleigh = q.values.dot(op.K * q.values) / (nrm * nrm);
    const Accumulated a = accumulate(op, q, ph, [&](int c, int i) { return res[static_cast<Eigen::Index>(op.index(c, i))]; });
    r.residual = std::sqrt(a.all) / nrm;
    r.interior = std::sqrt(a.interior) / nrm;
    r.cutoff_residual = std::sqrt(a.cut) / nrm;
    r.core_residual = std::sqrt(a.core) / nrm;
    r.weighted_core = std::sqrt(a.weighted) / nrm;
    return r;
}

ContinuumResidual continuum_residual(const CurvatureProfile& profile, double hbar, const GridDims& dims, int well,
                                     const WkbCutoffs& cutoffs, double mu) {
    GridDims fine_dims = dims;
    fine_dims.n_tau = 2 * dims.n_tau;
    const WkbProblem a = build_quasimode(profile, hbar, dims, well, cutoffs);
    const WkbProblem b = build_quasimode(profile, hbar, fine_dims, well, cutoffs);
    if (a.op.blocks != b.op.blocks || a.op.grid.T != b.op.grid.T) throw SolverError("nested grids do not share σ-columns");
    ContinuumResidual out;
    out.mu = mu;
    out.coarse = quasimode_residual(a.op, a.quasimode, a.phase, mu);
    out.fine = quasimode_residual(b.op, b.quasimode, b.phase, mu);
    const Eigen::VectorXd ra = residual_field(a.op, a.quasimode, mu);
    const Eigen::VectorXd rb = residual_field(b.op, b.quasimode, mu);
    const Accumulated acc = accumulate(a.op, a.quasimode, a.phase, [&](int c, int i) {
        const double x = ra[static_cast<Eigen::Index>(a.op.index(c, i))];
        const double y = rb[static_cast<Eigen::Index>(b.op.index(c, 2 * i))];
        return (4.0 * y - x) / 3.0;
    });
    const double nrm = mass_norm(a.op, a.quasimode.values);
    out.extrapolated = std::sqrt(acc.interior) / nrm;
    out.cutoff_part = std::sqrt(acc.cut) / nrm;
    out.core_part = std::sqrt(acc.core) / nrm;
    out.weighted_core = std::sqrt(acc.weighted) / nrm;
    return out;
}

}  // namespace curvebound
