#pragma once

#include "curvebound/effective1d.hpp"
#include "curvebound/geometry.hpp"
#include "curvebound/tubular2d.hpp"

#include <Eigen/Dense>

#include <vector>

namespace curvebound {

// Sampled on the nodes of a CurvatureSamples grid; nodes outside ω hold NaN.
struct EikonalPhase {
    double well = 0.0;
    double excluded = 0.0;  // center of the arc removed from ω
    double eta = 0.0;
    std::vector<double> sigma;
    std::vector<double> phi;
    std::vector<double> dphi;  // dΦ/dσ = ±√v
    std::vector<double> offset;  // signed arc offset σ − s_ω inside ω
};

struct TransportAmplitude {
    double gamma = 0.0;
    std::vector<double> xi0;
};

struct EigenvalueSeries {
    double mu0 = -1.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    double mu3 = 0.0;

    double value(double hbar) const { return mu0 + hbar * (mu1 + hbar * (mu2 + hbar * mu3)); }
};

EigenvalueSeries eigenvalue_series(double kappa_max, double gamma);

enum class TransverseProfile {
    halfline,  // √2 e^{−τ} times χ(τ/T)
    interval,  // ground state of the Robin–Dirichlet interval [0, T]
};

struct WkbCutoffs {
    double eta = 0.45;         // ω is the complement of |σ − excluded| ≤ η
    double sigma_ramp = 0.45;  // χ_ǒ rises from 0 at distance η to 1 at η + ramp
    TransverseProfile transverse = TransverseProfile::interval;
    double tau_plateau = 0.5;  // χ(τ/T), halfline profile only
    double tau_support = 0.9;
};

// Φ and ξ₀ around pot.wells[well] on the nodes of `samples`, excluding the
// arc of half-width eta around `excluded`.
EikonalPhase eikonal_phase(const EffectivePotential& pot, int well, double excluded, double eta,
                           const CurvatureSamples& samples);
TransportAmplitude transport_amplitude(const EffectivePotential& pot, const EikonalPhase& phase);

struct WKBQuasimode {
    double hbar = 0.0;
    double T = 0.0;
    WkbCutoffs cutoffs;
    Eigen::VectorXd values;      // operator ordering
    std::vector<double> chi_sigma;  // per column
    double norm = 0.0;           // weighted L² norm
};

WKBQuasimode build_quasimode(const RobinOperator2D& op, const EikonalPhase& phase, const TransportAmplitude& amp,
                             const WkbCutoffs& cutoffs);

struct WkbProblem {
    EffectivePotential pot;
    EikonalPhase phase;
    TransportAmplitude amplitude;
    RobinOperator2D op;
    WKBQuasimode quasimode;
};

// Single-well operator on ω and its quasimode; the other well is excluded
// (the point opposite the well when the profile has one well).
WkbProblem build_quasimode(const CurvatureProfile& profile, double hbar, const GridDims& dims, int well,
                           const WkbCutoffs& cutoffs);

struct WkbResidual {
    double mu = 0.0;
    double residual = 0.0;          // ‖M⁻¹(K − μM)ψ‖_M / ‖ψ‖_M
    double interior = 0.0;          // same, without the Robin row τ = 0
    double rayleigh = 0.0;          // ⟨Kψ, ψ⟩ / ⟨Mψ, ψ⟩
    double cutoff_residual = 0.0;   // restricted to columns with 0 < χ_ǒ < 1
    double core_residual = 0.0;     // restricted to columns with χ_ǒ = 1
    double weighted_core = 0.0;     // e^{Φ/ħ}-weighted residual on χ_ǒ = 1
};

WkbResidual quasimode_residual(const RobinOperator2D& op, const WKBQuasimode& q, const EikonalPhase& phase,
                               double mu);

// Continuum residual: interior residual fields on nested τ-grids n_tau and
// 2 n_tau, Richardson-combined at shared nodes. Robin row τ = 0 excluded.
struct ContinuumResidual {
    double mu = 0.0;
    WkbResidual coarse;
    WkbResidual fine;
    double extrapolated = 0.0;
    double cutoff_part = 0.0;
    double core_part = 0.0;
    double weighted_core = 0.0;
};

ContinuumResidual continuum_residual(const CurvatureProfile& profile, double hbar, const GridDims& dims, int well,
                                     const WkbCutoffs& cutoffs, double mu);

}  // namespace curvebound
