#pragma once

#include <functional>
#include <vector>

namespace curvebound {

struct HalfLineModes {
    double eigenvalue = -1.0;
    std::function<double(double)> ground;  // u0(τ) = √2 e^{−τ}
};

HalfLineModes halfline_modes();

struct IntervalSpec {
    double T = 10.0;
};

struct Spectrum1D {
    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> eigenvectors;  // optional, sampled on grid
    std::vector<double> grid;
    std::vector<double> weights;  // inner product <u,v> = Σ w_i u_i v_i
};

Spectrum1D interval_spectrum_exact(const IntervalSpec& spec, int k);

// 1 + λ1(H0^T), accurate to full relative precision.
double interval_ground_offset(double T);

struct WeightedSpec {
    double T = 20.0;
    double B = 0.0;
    int n_grid = 4000;
    bool richardson = true;  // extrapolate from n_grid/2 and n_grid
};

struct WeightedGround {
    double eigenvalue = 0.0;      // extrapolated when spec.richardson
    double eigenvalue_raw = 0.0;  // plain second-order value at n_grid
    std::vector<double> grid;     // τ_i = i T / n_grid, i = 0..n_grid
    std::vector<double> ground;   // u in the weighted gauge, u(T) = 0
    std::vector<double> weights;  // trapezoid × (1 − Bτ)
    double decay_rate = 0.0;      // slope of log|u| on the middle third
};

WeightedGround weighted_ground(const WeightedSpec& spec);

// k lowest eigenpairs of the discretized weighted operator (no extrapolation).
Spectrum1D weighted_spectrum(const WeightedSpec& spec, int k);

}  // namespace curvebound
