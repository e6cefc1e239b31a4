#pragma once
#include <Eigen/Dense>
#include <string>
#include <vector>

namespace cdkpop {

// One nonzero of a symmetric constraint or objective matrix. Entries are
// stored for the upper triangle only (row <= col); an off-diagonal entry
// (r, c, v) stands for A(r,c) = A(c,r) = v, so it contributes 2*v*X(r,c)
// to the inner product <A, X>.
struct BlockEntry {
    int block;
    int row;
    int col;
    double value;
};

// One equality row <A_i, X> + f_i . u = b_i.
struct LinearMap {
    std::vector<BlockEntry> entries;
    std::vector<double> free_coefs;  // empty or size n_free
    double b = 0.0;
};

// Block-diagonal SDP in standard primal form:
//   minimize    sum_b <C_b, X_b> + c_u . u
//   subject to  <A_i, X> + f_i . u = b_i   (i = 1..m)
//               X_b PSD, u free scalars.
struct ConicProgram {
    std::vector<int> blocks;               // PSD block sizes
    std::vector<BlockEntry> objective;     // nonzeros of the C_b
    std::vector<LinearMap> constraints;
    int n_free = 0;
    std::vector<double> free_objective;    // empty or size n_free

    int num_constraints() const { return static_cast<int>(constraints.size()); }
    // throws std::invalid_argument on shape violations
    void validate() const;
};

enum class SolverStatus { Optimal, NearOptimal, Infeasible, Unbounded, NumericalFailure };

std::string to_string(SolverStatus s);

struct SolverSettings {
    double tol_gap = 1e-8;
    double tol_feas = 1e-8;
    int max_iters = 200;
    double step_fraction = 0.98;  // fraction-to-boundary
};

// Snapshot of one interior-point iteration, kept for diagnostics and for
// checking weak duality and step behavior in tests.
struct IterateInfo {
    int iter;
    double mu;
    double primal_obj;
    double dual_obj;
    double gap;          // relative complementarity gap
    double primal_feas;  // ||b - A(X)|| / (1 + ||b||)
    double dual_feas;    // ||C - S - A'(y)||_F / (1 + ||C||_F)
    double step_primal;
    double step_dual;
};

struct ConicSolution {
    SolverStatus status = SolverStatus::NumericalFailure;
    std::vector<Eigen::MatrixXd> X;  // primal blocks
    std::vector<Eigen::MatrixXd> S;  // dual slack blocks
    std::vector<double> y;           // equality multipliers
    std::vector<double> u;           // free scalar values
    double objective = 0.0;          // primal objective
    double dual_objective = 0.0;
    double gap = 0.0;                // relative primal-dual gap at exit
    int iterations = 0;
    std::vector<IterateInfo> trace;
};

// Primal-dual Nesterov-Todd interior-point method with Mehrotra
// predictor-corrector. Single-threaded; distinct programs may be solved
// concurrently from different threads.
ConicSolution solve(const ConicProgram& prog, const SolverSettings& settings = {});

}  // namespace cdkpop
