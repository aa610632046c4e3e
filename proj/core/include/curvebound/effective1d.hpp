#pragma once

#include "curvebound/geometry.hpp"
#include "curvebound/ref1d.hpp"

#include <functional>
#include <vector>

namespace curvebound {

struct EffectivePotential {
    double half_length = 0.0;
    std::function<double(double)> v;   // periodic, ≥ 0
    std::function<double(double)> dv;  // dv/ds
    std::vector<double> wells;         // sorted; {s_r, s_ℓ} for two wells
    double gamma = 0.0;
    double kappa_max = 0.0;
    bool symmetric = false;

    double s_r() const { return wells.front(); }
    double s_l() const { return wells.back(); }
    std::vector<double> samples(int n) const;  // on s_j = −L + (j + 1) Δ
};

// v = κ_max − κ from a curvature profile (exact evaluation through the curve).
EffectivePotential effective_potential(const CurvatureProfile& profile);

struct AgmonActions {
    double S_u = 0.0;
    double S_d = 0.0;
    double S = 0.0;
};

AgmonActions agmon_actions(const EffectivePotential& pot, int panels = 64);

struct Amplitudes {
    double A_u = 0.0;
    double A_d = 0.0;
    int sign_u = 0;  // selected γ sign in each integrand
    int sign_d = 0;
};

Amplitudes amplitude_factors(const EffectivePotential& pot, int panels = 64);

struct SplittingTerm {
    double amplitude = 0.0;
    double potential_value = 0.0;
    double exponent = 0.0;
};

struct SplittingPrediction {
    double h = 0.0;
    double hbar = 0.0;
    SplittingTerm upper, lower;
    double total = 0.0;       // μ2^eff − μ1^eff in h-units
    double lambda_gap = 0.0;  // λ2 − λ1 of ħ²D² + v
};

SplittingPrediction predicted_splitting(const EffectivePotential& pot, double h);

enum class Discretization { fourier, finite_difference };

struct PeriodicSpec {
    double hbar = 0.1;
    int n_s = 2048;
    Discretization discretization = Discretization::fourier;
    bool richardson = false;  // finite differences only: extrapolate from n_s/2
};

Spectrum1D solve_periodic(const EffectivePotential& pot, const PeriodicSpec& spec, int k);

// μ_j^eff = −h − κ_max h^{3/2} + h^{3/2} λ_j(h^{1/4}).
std::vector<double> effective_eigs(const EffectivePotential& pot, double h, int k, int n_s = 2048);

// λ2 − λ1 of the finite-difference operator from its reflection sectors in
// quad precision, via the discrete flux identity at s = 0 and s = L.
struct TunnelingSplitting {
    double splitting = 0.0;
    double upper = 0.0;  // contribution of the s = 0 cut
    double lower = 0.0;  // contribution of the s = L cut
    double lambda_even = 0.0;
    double lambda_odd = 0.0;
    double direct_difference = 0.0;  // λ_odd − λ_even from the two Rayleigh quotients
};

TunnelingSplitting tunneling_splitting(const EffectivePotential& pot, double hbar, int n_s);

}  // namespace curvebound
