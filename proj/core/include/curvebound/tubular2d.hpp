#pragma once

#include "curvebound/effective1d.hpp"
#include "curvebound/eigensolver.hpp"
#include "curvebound/geometry.hpp"
#include "curvebound/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <string>
#include <vector>

namespace curvebound {

// τ = g(ξ), ξ ∈ [0, 1]. sinh: g = a sinh(βξ) with a sinh β = T.
struct TauMap {
    enum class Kind { uniform, sinh };
    Kind kind = Kind::sinh;
    double scale = 2.0;  // a

    double g(double xi, double T) const;
    double dg(double xi, double T) const;
};

struct GridDims {
    int n_tau = 64;
    TauMap map;
    double D = 0.0;  // requested truncation constant, T = D / ħ before capping
};

enum class DomainKind { full, single_well, even_sector, odd_sector };

struct Domain {
    DomainKind kind = DomainKind::full;
    // single_well: nodes strictly inside the counter-clockwise arc (arc_begin, arc_end).
    double arc_begin = 0.0;
    double arc_end = 0.0;

    static Domain full() { return {}; }
    static Domain even_sector() { return {DomainKind::even_sector, 0.0, 0.0}; }
    static Domain odd_sector() { return {DomainKind::odd_sector, 0.0, 0.0}; }
    // Complement of the closed arc |σ − excluded| ≤ eta.
    static Domain single_well(double excluded, double eta, double half_length);
};

// Largest T ≤ D/ħ keeping â = 1 − ħ²τκ within [1/2, 3/2].
double truncation_length(double hbar, double D, double kappa_min, double kappa_max);

struct TubularGrid {
    double hbar = 0.0;
    double T = 0.0;
    double D = 0.0;  // effective, T ħ
    int n_tau = 0;
    TauMap map;
    CurvatureSamples samples;      // shared σ-grid
    std::vector<int> columns;      // grid node index per column
    std::vector<double> col_weight;
    std::vector<double> tau;       // τ_i, i = 0..n_tau (last is the Dirichlet node)
    std::vector<double> tau_cell;  // m_i = g'(ξ_i) Δξ, halved at i = 0
    double delta_sigma() const { return samples.delta(); }
};

// K from the quadratic form, M lumped; unknown (c, i) at c * n_tau + i.
struct RobinOperator2D {
    TubularGrid grid;
    DomainKind kind = DomainKind::full;
    // Block representation: diag/inner per column, coupling between columns c−1 and c.
    int blocks = 0;
    int width = 0;
    std::vector<double> diag, inner, coupling, mass;
    std::vector<double> wrap;  // coupling between the last and the first column (full domain)
    SpMat K;
    Eigen::VectorXd M;

    std::size_t size() const { return mass.size(); }
    std::size_t index(int column, int i) const { return std::size_t(column) * width + i; }
    BlockTridiagonal<quad> to_block_quad() const;
    // Quadratic form evaluated term by term (independent of K).
    double form_value(const Eigen::VectorXd& u) const;
    double weight(int column, double tau) const;  // â
};

RobinOperator2D assemble(const CurvatureProfile& profile, double hbar, const GridDims& dims, const Domain& domain);
RobinOperator2D assemble(const CurvatureSamples& samples, double hbar, const GridDims& dims, const Domain& domain);

// Lowest k eigenpairs; dense when requested or when the problem is small.
EigenSolveResult solve_lowest(const RobinOperator2D& op, int k, bool dense = false);
// Sparse first; a failed sparse solve is repeated densely when `fallback` is set.
EigenSolveResult solve_lowest_fallback(const RobinOperator2D& op, int k, bool fallback);

// Full-domain ground state and first excitation for reflection-symmetric
// profiles: sector ground states in quad precision and the flux identity.
struct SectorSplitting {
    double splitting = 0.0;
    double upper = 0.0;
    double lower = 0.0;
    double mu_even = 0.0;
    double mu_odd = 0.0;
    double direct_difference = 0.0;
    std::vector<quad> even;  // sector ground states
    std::vector<quad> odd;
};

SectorSplitting symmetric_splitting(const CurvatureProfile& profile, double hbar, const GridDims& dims);

// Sector vector extended to the full grid by σ-reflection (odd sector:
// antisymmetric), M-normalized on `full`.
Eigen::VectorXd unfold_sector(const RobinOperator2D& full, const RobinOperator2D& sector, const std::vector<quad>& v);

struct SingleWellResult {
    double mu = 0.0;
    double mu2 = 0.0;
    double gap = 0.0;
    std::vector<quad> phi;  // positive, M-normalized
    RobinOperator2D op;
};

SingleWellResult single_well_ground(const CurvatureProfile& profile, double hbar, const Domain& omega,
                                    const GridDims& dims, bool dense_fallback = false);

struct DecayReport {
    double normal_slope = 0.0;
    double tangential_slope = 0.0;
    double tangential_intercept = 0.0;
    int normal_points = 0;
    int tangential_points = 0;
};

struct DecayOptions {
    double tau_min = 1.0;
    double tau_max = 10.0;
    double phi_min = 0.5;
    double phi_margin = 0.3;      // Φ ≤ S/2 − margin
    double floor = 1e-10;         // relative amplitude below which samples are dropped
};

// vec: full-domain grid vector; phase(σ) is the Agmon distance to `well`.
DecayReport decay_diagnostics(const RobinOperator2D& op, const Eigen::VectorXd& vec, double well,
                              const std::function<double(double)>& phase, double S,
                              const DecayOptions& opts = {});

// Binary triplet dump: 8-byte magic, rows, cols (u64), then (u64, u64, f64) little endian.
void write_matrix_dump(const SpMat& m, const std::string& path);
SpMat read_matrix_dump(const std::string& path);

}  // namespace curvebound
