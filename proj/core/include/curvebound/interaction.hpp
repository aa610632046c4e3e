#pragma once

#include "curvebound/geometry.hpp"
#include "curvebound/tubular2d.hpp"
#include "curvebound/types.hpp"

#include <vector>

namespace curvebound {

// ω_ℓ = {|σ − s_r| > η}, ω_r = {|σ − s_ℓ| > η}; χ_α vanishes on the excluded
// arc and equals 1 beyond 2η from the other well.
struct WellPairConfig {
    double eta = 0.45;
    GridDims dims;
};

struct InteractionBasis {
    double hbar = 0.0;
    double mu_r = 0.0;  // single-well ground energies
    double mu_l = 0.0;
    RobinOperator2D op;  // full domain
    std::vector<quad> f_r, f_l;    // χ_α φ_α on the full grid
    std::vector<quad> phi_r, phi_l;  // φ_α extended by zero
    double defect_r = 0.0;  // ⟨f_r, f_r⟩ − 1
    double defect_l = 0.0;
    double overlap_lr = 0.0;
    double gram_determinant = 0.0;
    bool reflected = false;  // φ_ℓ = U φ_r
};

InteractionBasis build_interaction_basis(const CurvatureProfile& profile, double hbar, const WellPairConfig& config);

struct InteractionMatrix {
    double w_u = 0.0;  // flux at σ = 0
    double w_d = 0.0;  // flux at σ = L
    double w_lr = 0.0;       // w_u + w_d
    double bilinear_lr = 0.0;  // ⟨(K − μ_ℓ M) f_ℓ, f_r⟩
    double bilinear_rl = 0.0;  // ⟨(K − μ_r M) f_r, f_ℓ⟩
    double splitting_estimate = 0.0;  // 2|w_lr|
    double analytic_u = 0.0;  // leading-order WKB evaluation
    double analytic_d = 0.0;
    double analytic_splitting = 0.0;
};

InteractionMatrix interaction_splitting(const CurvatureProfile& profile, const InteractionBasis& basis);

}  // namespace curvebound
