#include "curvebound/eigensolver.hpp"

#include "curvebound/types.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>

namespace curvebound {

namespace {

SpMat shifted(const SpMat& k_mat, const Eigen::VectorXd& mass, double shift) {
    SpMat a = k_mat;
    for (Eigen::Index i = 0; i < a.rows(); ++i) a.coeffRef(i, i) -= shift * mass[i];
    a.makeCompressed();
    return a;
}

void m_orthonormalize(Eigen::MatrixXd& x, const Eigen::VectorXd& mass) {
    for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            for (Eigen::Index i = 0; i < j; ++i) {
                const double c = x.col(i).dot(mass.cwiseProduct(x.col(j)));
                x.col(j) -= c * x.col(i);
            }
            const double nrm = std::sqrt(x.col(j).dot(mass.cwiseProduct(x.col(j))));
            x.col(j) /= nrm;
        }
    }
}

}  // namespace

EigenSolveResult lowest_eigenpairs(const SpMat& k_mat, const Eigen::VectorXd& mass, int k,
                                   double shift, const SubspaceOptions& opts) {
    const Eigen::Index n = k_mat.rows();
    if (k < 1 || k > n) throw ValidationError("requested eigenpair count out of range");
    const int p = static_cast<int>(std::min<Eigen::Index>(n, opts.block > 0 ? opts.block : std::max(k + 2, 2 * k)));

    Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
    double s = shift;
    bool ok = false;
    for (int attempt = 0; attempt < 6 && !ok; ++attempt) {
        ldlt.compute(shifted(k_mat, mass, s));
        ok = ldlt.info() == Eigen::Success && ldlt.vectorD().cwiseAbs().minCoeff() > 1e-14;
        if (!ok) s += (attempt % 2 == 0 ? 1e-3 : -2e-3) * std::max(1.0, std::abs(shift));
    }
    if (!ok) throw SolverError("sparse factorization failed at every shift");

    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::MatrixXd x(n, p);
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = 0; i < n; ++i) x(i, j) = dist(rng);
    x.col(0).setOnes();
    m_orthonormalize(x, mass);

    EigenSolveResult out;
    Eigen::VectorXd theta;
    double previous = INFINITY;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        Eigen::MatrixXd y(n, p);
        for (int j = 0; j < p; ++j) y.col(j) = ldlt.solve(mass.cwiseProduct(x.col(j)));
        const Eigen::MatrixXd ky = k_mat * y;
        Eigen::MatrixXd a = y.transpose() * ky;
        Eigen::MatrixXd b = y.transpose() * mass.asDiagonal() * y;
        a = 0.5 * (a + a.transpose()).eval();
        b = 0.5 * (b + b.transpose()).eval();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> small(a, b);
        if (small.info() != Eigen::Success) throw SolverError("Rayleigh-Ritz step failed");
        x = y * small.eigenvectors();
        theta = small.eigenvalues();
        m_orthonormalize(x, mass);

        const Eigen::MatrixXd kx = k_mat * x;
        out.stats.residuals.assign(k, 0.0);
        double worst = 0.0;
        for (int j = 0; j < k; ++j) {
            const Eigen::VectorXd mxj = mass.cwiseProduct(x.col(j));
            const double r = (kx.col(j) - theta[j] * mxj).norm() / mxj.norm();
            out.stats.residuals[j] = r;
            worst = std::max(worst, r);
        }
        out.stats.iterations = it;
        const double scale = std::max(1.0, std::abs(theta[0]));
        if (worst <= opts.tolerance * scale) break;
        if (worst <= opts.contract * scale && worst > 0.9 * previous) break;
        previous = worst;
        if (it == opts.max_iterations) throw SolverError("subspace iteration did not converge");
    }

    out.eigenvalues.assign(theta.data(), theta.data() + k);
    out.eigenvectors = x.leftCols(k);
    for (int j = 0; j < k; ++j)
        if (out.eigenvectors.col(j).sum() < 0) out.eigenvectors.col(j) *= -1.0;

    if (opts.verify_count) {
        const double top = out.eigenvalues.back();
        const double above = top + 1e-8 * std::max(1.0, std::abs(top));
        int ritz_below = 0;
        for (Eigen::Index j = 0; j < theta.size(); ++j)
            if (theta[j] < above) ++ritz_below;
        if (count_below(k_mat, mass, above) != ritz_below) throw SolverError("subspace iteration missed an eigenvalue");
    }
    return out;
}

EigenSolveResult dense_lowest(const SpMat& k_mat, const Eigen::VectorXd& mass, int k) {
    const Eigen::MatrixXd a(k_mat);
    const Eigen::MatrixXd b = mass.asDiagonal();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b);
    if (es.info() != Eigen::Success) throw SolverError("dense eigensolver failed");
    EigenSolveResult out;
    out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
    out.eigenvectors = es.eigenvectors().leftCols(k);
    for (int j = 0; j < k; ++j) {
        if (out.eigenvectors.col(j).sum() < 0) out.eigenvectors.col(j) *= -1.0;
        const Eigen::VectorXd mx = mass.cwiseProduct(out.eigenvectors.col(j));
        out.stats.residuals.push_back((k_mat * out.eigenvectors.col(j) - out.eigenvalues[j] * mx).norm() / mx.norm());
    }
    return out;
}

int count_below(const SpMat& k_mat, const Eigen::VectorXd& mass, double lambda) {
    Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(shifted(k_mat, mass, lambda));
    if (ldlt.info() != Eigen::Success) throw SolverError("inertia factorization failed");
    const Eigen::VectorXd d = ldlt.vectorD();
    int neg = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d[i] == 0.0) throw SolverError("singular pivot in inertia count");
        if (d[i] < 0.0) ++neg;
    }
    return neg;
}

}  // namespace curvebound
