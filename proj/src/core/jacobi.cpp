#include "core/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cdkpop {

namespace {

constexpr double kAsymmetryTol = 1e-10;
constexpr int kMaxSweeps = 64;

double off_diag_norm(const Eigen::MatrixXd& A) {
    double s = 0.0;
    for (int p = 0; p < A.rows(); ++p)
        for (int q = p + 1; q < A.cols(); ++q) s += A(p, q) * A(p, q);
    return std::sqrt(2.0 * s);
}

}  // namespace

SpectralDecomposition spectral(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("spectral: matrix not square");
    const int n = static_cast<int>(A.rows());
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
    if (asym > kAsymmetryTol * scale)
        throw std::invalid_argument("spectral: matrix asymmetric beyond tolerance");

    Eigen::MatrixXd D = 0.5 * (A + A.transpose());
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);

    const double tol = 1e-15 * scale * n;
    for (int sweep = 0; sweep < kMaxSweeps && off_diag_norm(D) > tol; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = D(p, q);
                if (std::abs(apq) <= 1e-18 * scale) continue;
                const double tau = (D(q, q) - D(p, p)) / (2.0 * apq);
                double t;
                if (tau >= 0)
                    t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
                else
                    t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // rotate rows and columns p, q of D
                for (int k = 0; k < n; ++k) {
                    const double dkp = D(k, p), dkq = D(k, q);
                    D(k, p) = c * dkp - s * dkq;
                    D(k, q) = s * dkp + c * dkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double dpk = D(p, k), dqk = D(q, k);
                    D(p, k) = c * dpk - s * dqk;
                    D(q, k) = s * dpk + c * dqk;
                }
                D(p, q) = 0.0;
                D(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    const double vkp = P(k, p), vkq = P(k, q);
                    P(k, p) = c * vkp - s * vkq;
                    P(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return D(i, i) > D(j, j); });

    SpectralDecomposition out;
    out.eigenvalues.resize(n);
    out.P.resize(n, n);
    for (int i = 0; i < n; ++i) {
        out.eigenvalues[i] = D(order[i], order[i]);
        out.P.col(i) = P.col(order[i]);
    }
    return out;
}

double min_eigenvalue(const Eigen::MatrixXd& A) {
    auto dec = spectral(A);
    return dec.eigenvalues.empty() ? 0.0 : dec.eigenvalues.back();
}

}  // namespace cdkpop
