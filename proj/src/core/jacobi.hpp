#pragma once
#include <Eigen/Dense>
#include <vector>

namespace cdkpop {

// Full eigendecomposition of a symmetric matrix, A = P diag(e) P^T.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;  // sorted descending
    Eigen::MatrixXd P;                // eigenvector i in column i, orthonormal
};

// Cyclic Jacobi eigensolver. Input must be symmetric within 1e-10 (relative
// to its largest entry); anything worse throws.
SpectralDecomposition spectral(const Eigen::MatrixXd& A);

double min_eigenvalue(const Eigen::MatrixXd& A);

}  // namespace cdkpop
