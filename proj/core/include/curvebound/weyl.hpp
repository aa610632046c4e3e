#pragma once

#include "curvebound/effective1d.hpp"
#include "curvebound/geometry.hpp"
#include "curvebound/tubular2d.hpp"

#include <functional>
#include <vector>

namespace curvebound {

// ∫_{−L}^{L} √((E + κ(s))₊) ds, split at the roots of E + κ.
double kappa_integral(const std::function<double(double)>& kappa, double half_length, double E);
double kappa_integral(const CurvatureProfile& profile, double E);

struct WeylPredictions {
    double h = 0.0;
    double negative = 0.0;   // |Γ| √(1 − Λ) / (π h^{1/2})
    double low_lying = 0.0;  // (π h^{1/4})⁻¹ ∫ √((E + κ)₊) ds
};

WeylPredictions weyl_predictions(const CurvatureProfile& profile, double h, double Lambda, double E);

enum class ThresholdKind {
    negative,   // μ < −Λ h
    low_lying,  // μ < −h + E h^{3/2}
};

struct CountingOptions {
    GridDims dims{32, {TauMap::Kind::uniform, 2.0}, 8.0};  // T is set by the â range at counting scales
    int budget = 200;
    bool dense_fallback = false;  // bracket eigenpairs only
};

struct CountingReport {
    double h = 0.0;
    ThresholdKind kind = ThresholdKind::negative;
    double parameter = 0.0;  // Λ or E
    double threshold = 0.0;  // in h-units
    int observed = 0;
    double predicted = 0.0;
    double relative_error = 0.0;
    double T = 0.0;
};

// Counts eigenvalues of the full tubular operator at ħ = h^{1/4}, μ = h λ̂,
// by the inertia of K − λ̂M.
CountingReport counting_check(const CurvatureProfile& profile, double h, ThresholdKind kind, double parameter,
                              const CountingOptions& opts = {});

// μ_n^± = −h ± C h² − κ_max h^{3/2} + h^{3/2} λ_n(ħ²D² + v) with ħ² = (1 ± C h^{1/2}) h^{1/2}.
std::vector<double> bracket_eigenvalues(const EffectivePotential& pot, double h, double C, int sign, int n,
                                        int n_s = 256);

struct BracketSpec {
    double h = 0.0;
    double C_plus = 0.0;
    double C_minus = 0.0;
    // Same fit with μ_n − h(1 + λ₁(H₀^T)): the Dirichlet depth T removed.
    double C_plus_corrected = 0.0;
    double C_minus_corrected = 0.0;
    double T = 0.0;
    std::vector<double> mu;  // tubular eigenvalues in h-units
};

struct BracketReport {
    std::vector<BracketSpec> fits;
    double C_plus_max = 0.0;
    double C_minus_max = 0.0;
    double spread_plus = 0.0;   // max/min of C₊ over the h-grid
    double spread_minus = 0.0;
    double spread_plus_corrected = 0.0;
    double spread_minus_corrected = 0.0;
};

BracketReport bracket_check(const CurvatureProfile& profile, const std::vector<double>& h_grid, int n_max,
                            const CountingOptions& opts = {});

}  // namespace curvebound
