#include "curvebound/interaction.hpp"

#include "curvebound/effective1d.hpp"
#include "curvebound/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace curvebound {

namespace {

double circular_distance(double a, double b, double L) {
    double d = std::fmod(std::abs(a - b), 2.0 * L);
    return std::min(d, 2.0 * L - d);
}

// φ on the single-well columns, scattered onto the full grid (column = node).
std::vector<quad> scatter(const SingleWellResult& sw, int n_nodes) {
    const int nt = sw.op.width;
    std::vector<quad> out(std::size_t(n_nodes) * nt, quad(0));
    for (int c = 0; c < sw.op.blocks; ++c) {
        const int j = sw.op.grid.columns[c];
        for (int i = 0; i < nt; ++i) out[std::size_t(j) * nt + i] = sw.phi[sw.op.index(c, i)];
    }
    return out;
}

quad mass_product(const RobinOperator2D& op, const std::vector<quad>& a, const std::vector<quad>& b) {
    CompensatedSum<quad> s;
    for (std::size_t p = 0; p < a.size(); ++p) s.add(quad(op.M[static_cast<Eigen::Index>(p)]) * a[p] * b[p]);
    return s.value();
}

// ⟨(K − μM) a, b⟩ in quad precision.
quad shifted_form(const RobinOperator2D& op, double mu, const std::vector<quad>& a, const std::vector<quad>& b) {
    CompensatedSum<quad> s;
    for (int k = 0; k < op.K.outerSize(); ++k)
        for (SpMat::InnerIterator it(op.K, k); it; ++it) s.add(quad(it.value()) * a[it.col()] * b[it.row()]);
    s.add(-quad(mu) * mass_product(op, a, b));
    return s.value();
}

// ħ⁴ ∫ â⁻¹ (f_ℓ ∂_σ f_r − f_r ∂_σ f_ℓ) dτ at node j, fourth-order centered ∂_σ.
quad flux(const RobinOperator2D& op, const std::vector<quad>& fl, const std::vector<quad>& fr, int j) {
    const TubularGrid& g = op.grid;
    const CurvatureSamples& smp = g.samples;
    const int nt = op.width;
    const double h = g.hbar;
    const quad inv12d = quad(1) / (quad(12) * quad(smp.delta()));
    auto at = [&](const std::vector<quad>& f, int jj, int i) { return f[std::size_t(smp.wrap(jj)) * nt + i]; };
    auto deriv = [&](const std::vector<quad>& f, int i) {
        return (-at(f, j + 2, i) + 8 * at(f, j + 1, i) - 8 * at(f, j - 1, i) + at(f, j - 2, i)) * inv12d;
    };
    CompensatedSum<quad> s;
    for (int i = 0; i < nt; ++i) {
        const double a = 1.0 - h * h * g.tau[i] * smp.kappa[j];
        const quad term = at(fl, j, i) * deriv(fr, i) - at(fr, j, i) * deriv(fl, i);
        s.add(quad(g.tau_cell[i] / a) * term);
    }
    return quad(h * h * h * h) * s.value();
}

}  // namespace

InteractionBasis build_interaction_basis(const CurvatureProfile& profile, double hbar, const WellPairConfig& cfg) {
    if (profile.wells().size() != 2) throw ValidationError("interaction basis needs exactly two wells");
    const double L = profile.half_length();
    const double s_r = profile.s_r(), s_l = profile.s_l();
    const double gap_a = circular_distance(s_r, s_l, L);
    const double limit = 0.25 * std::min(gap_a, 2.0 * L - gap_a);
    if (!(cfg.eta > 0.0 && cfg.eta < limit)) throw ValidationError("cutoff margin η must lie in (0, quarter of the inter-well arcs)");

    InteractionBasis b;
    b.hbar = hbar;
    b.op = assemble(profile, hbar, cfg.dims, Domain::full());
    const CurvatureSamples& smp = b.op.grid.samples;
    const int n = smp.size();
    const int nt = b.op.width;

    const SingleWellResult right = single_well_ground(profile, hbar, Domain::single_well(s_l, cfg.eta, L), cfg.dims);
    if (right.op.width != nt || right.op.grid.T != b.op.grid.T) throw SolverError("single-well and full grids differ");
    b.mu_r = right.mu;
    b.phi_r = scatter(right, n);
    b.reflected = profile.symmetric();
    if (b.reflected) {
        b.mu_l = b.mu_r;
        b.phi_l.assign(b.phi_r.size(), quad(0));
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < nt; ++i) b.phi_l[std::size_t(j) * nt + i] = b.phi_r[std::size_t(smp.mirror(j)) * nt + i];
    } else {
        const SingleWellResult left = single_well_ground(profile, hbar, Domain::single_well(s_r, cfg.eta, L), cfg.dims);
        b.mu_l = left.mu;
        b.phi_l = scatter(left, n);
    }

    b.f_r = b.phi_r;
    b.f_l = b.phi_l;
    for (int j = 0; j < n; ++j) {
        const double s = smp.s(j);
        const quad cr = smooth_step((circular_distance(s, s_l, L) - cfg.eta) / cfg.eta);
        const quad cl = smooth_step((circular_distance(s, s_r, L) - cfg.eta) / cfg.eta);
        for (int i = 0; i < nt; ++i) {
            b.f_r[std::size_t(j) * nt + i] *= cr;
            b.f_l[std::size_t(j) * nt + i] *= cl;
        }
    }
    const quad rr = mass_product(b.op, b.f_r, b.f_r);
    const quad ll = mass_product(b.op, b.f_l, b.f_l);
    const quad lr = mass_product(b.op, b.f_l, b.f_r);
    b.defect_r = static_cast<double>(rr - 1);
    b.defect_l = static_cast<double>(ll - 1);
    b.overlap_lr = static_cast<double>(lr);
    b.gram_determinant = static_cast<double>(rr * ll - lr * lr);
    return b;
}

InteractionMatrix interaction_splitting(const CurvatureProfile& profile, const InteractionBasis& b) {
    const CurvatureSamples& smp = b.op.grid.samples;
    if (b.f_r.size() != b.op.size() || b.f_l.size() != b.op.size()) throw ValidationError("basis and operator grids differ");
    InteractionMatrix m;
    m.w_u = static_cast<double>(flux(b.op, b.f_l, b.f_r, smp.origin_index()));
    m.w_d = -static_cast<double>(flux(b.op, b.f_l, b.f_r, smp.seam_index()));
    m.w_lr = m.w_u + m.w_d;
    if (m.w_lr == 0.0 || !std::isfinite(m.w_lr)) throw SolverError("flux quadrature underflow");
    m.bilinear_lr = static_cast<double>(shifted_form(b.op, b.mu_l, b.f_l, b.f_r));
    m.bilinear_rl = static_cast<double>(shifted_form(b.op, b.mu_r, b.f_r, b.f_l));
    m.splitting_estimate = 2.0 * std::abs(m.w_lr);

    const EffectivePotential pot = effective_potential(profile);
    const AgmonActions S = agmon_actions(pot);
    const Amplitudes A = amplitude_factors(pot);
    const double h = b.hbar;
    const double pre = 2.0 * std::pow(h, 2.5) * std::sqrt(pot.gamma / pi);
    m.analytic_u = pre * std::sqrt(pot.v(0.0)) * A.A_u * std::exp(-S.S_u / h);
    m.analytic_d = pre * std::sqrt(pot.v(pot.half_length)) * A.A_d * std::exp(-S.S_d / h);
    m.analytic_splitting = 2.0 * (m.analytic_u + m.analytic_d);
    return m;
}

}  // namespace curvebound
