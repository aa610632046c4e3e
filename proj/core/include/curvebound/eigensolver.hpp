#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

namespace curvebound {

using SpMat = Eigen::SparseMatrix<double>;

struct SolverStats {
    int iterations = 0;
    std::vector<double> residuals;  // ||K x - lambda M x|| / ||M x||
};

struct EigenSolveResult {
    std::vector<double> eigenvalues;
    Eigen::MatrixXd eigenvectors;  // columns, M-orthonormal
    SolverStats stats;
};

struct SubspaceOptions {
    int block = 0;           // 0: max(k + 2, 2k)
    int max_iterations = 300;
    double tolerance = 1e-11;
    double contract = 1e-9;    // accepted once the residual stops improving
    bool verify_count = true;  // inertia check that no lower eigenvalue was missed
};

// k eigenpairs of K x = lambda M x closest above `shift` (lowest when the
// shift lies below the spectrum). M is diagonal.
EigenSolveResult lowest_eigenpairs(const SpMat& k_mat, const Eigen::VectorXd& mass, int k,
                                   double shift, const SubspaceOptions& opts = {});

// Dense generalized solver, for small problems and as an oracle.
EigenSolveResult dense_lowest(const SpMat& k_mat, const Eigen::VectorXd& mass, int k);

// Number of eigenvalues of K x = lambda M x strictly below lambda (Sylvester inertia).
int count_below(const SpMat& k_mat, const Eigen::VectorXd& mass, double lambda);

}  // namespace curvebound
