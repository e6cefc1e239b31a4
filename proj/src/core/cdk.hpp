#pragma once
#include <utility>
#include <vector>

#include "core/poly.hpp"

namespace cdkpop {

// Regularized spectral model of a pseudo-moment matrix: eigenvectors read
// as polynomials over the degree-d monomial basis, eigenvalues descending
// and clamped at zero, with the trailing near-zero pairs flagged as the
// kernel. Evaluation sums p_i(x)^2 / (e_i + beta).
struct ChristoffelModel {
    int n = 0, d = 0;
    double beta = 0.0;
    double kernel_tol = 0.0;
    // (p_i, e_i) with e_i descending
    std::vector<std::pair<Polynomial, double>> eigen_pairs;
    int kernel_dim = 0;

    int range_dim() const { return static_cast<int>(eigen_pairs.size()) - kernel_dim; }
};

// spectral model of the order-d moment matrix of y
ChristoffelModel build_christoffel(const MomentSequence& y, int d, double beta,
                                   double kernel_tol = 1e-3);

// sum over every eigenpair of p_i(x)^2 / (e_i + beta)
double christoffel_eval(const ChristoffelModel& model, const std::vector<double>& x);

// the non-kernel part sum_{i <= s-r} p_i^2 / (e_i + beta), expanded to one
// polynomial of degree 2d
Polynomial range_polynomial(const ChristoffelModel& model);

// expected mass of the non-kernel part under the generating moments,
// in closed form: sum_{i <= s-r} e_i / (e_i + beta)
double christoffel_mass(const ChristoffelModel& model);

// the same mass obtained symbolically as L_y of the expanded non-kernel
// part; agrees with the closed form up to numerical error
double christoffel_mass(const ChristoffelModel& model, const MomentSequence& y);

// Sublevel-set description ready for localizing-matrix assembly: points
// satisfying every polynomial are exactly those with non-kernel sum <= gamma
// and p_j(x)^2 <= beta for each kernel direction.
struct SublevelConstraints {
    Polynomial range_constraint{0};           // gamma - non-kernel sum
    std::vector<Polynomial> kernel_constraints;  // beta - p_j^2 per kernel pair
    double gamma = 0.0;
};

SublevelConstraints sublevel_constraints(const ChristoffelModel& model, double gamma);

// univariate restriction of y to the moments supported on coordinate i
MomentSequence marginal_sequence(const MomentSequence& y, int i);

// order-1 spectral model of the 2x2 marginal moment matrix of coordinate i
ChristoffelModel marginal_christoffel(const MomentSequence& y, int i, double beta,
                                      double kernel_tol = 1e-3);

}  // namespace cdkpop
