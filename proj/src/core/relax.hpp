#pragma once
#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "core/conic.hpp"
#include "core/poly.hpp"

namespace cdkpop {

// minimize objective(x) over { x : g(x) >= 0 for each constraint g },
// with optionally marked equalities g(x) = 0
struct POPInstance {
    int n = 0;
    Polynomial objective{0};
    std::vector<Polynomial> constraints;
    std::vector<bool> eq_mask;  // empty means all inequalities

    // smallest admissible relaxation order
    int d_min() const;
    void validate() const;
};

// half-degree ceil(deg(g)/2), the order consumed by a localizing block
int half_degree(const Polynomial& g);

// Symmetric indexing of the pseudo-moment matrix M_d(y): entry (i, j)
// references the moment with exponent rows[i] + rows[j].
class MomentIndexer {
  public:
    MomentIndexer(int n, int d) : rows_(n, d) {}
    const Basis& rows() const { return rows_; }
    MultiIndex entry(int i, int j) const { return add_indices(rows_[i], rows_[j]); }

  private:
    Basis rows_;
};

// Indexing of the localizing matrix M_{d-ceil(deg g/2)}(g y): entry (i, j)
// is the sparse linear functional sum_gamma g_gamma * y_{rows[i]+rows[j]+gamma}.
class LocalizingIndexer {
  public:
    // throws when d is too small to localize g
    LocalizingIndexer(const Polynomial& g, int n, int d);
    const Basis& rows() const { return rows_; }
    const Polynomial& weight() const { return g_; }
    std::vector<std::pair<MultiIndex, double>> entry(int i, int j) const;

  private:
    Polynomial g_;
    Basis rows_;
};

// Dense moment relaxation of order d as a block SDP: one PSD block for
// M_d(y), one per localizing matrix (order-zero blocks degenerate to scalar
// nonnegativity), equality rows tying every repeated moment to a canonical
// moment-block entry, the normalization y_0 = 1, and objective L_y(f).
ConicProgram build_relaxation(const POPInstance& pop, int d);

struct RelaxationResult {
    int order = 0;
    double bound = 0.0;                     // lower bound f_d
    MomentSequence y{0, 0};                 // pseudo-moments up to degree 2d
    Eigen::MatrixXd moment_matrix;          // M_d(y), rebuilt from y
    std::vector<Eigen::MatrixXd> localizing;  // one per constraint
    SolverStatus solver_status = SolverStatus::NumericalFailure;
    ConicSolution conic;
};

RelaxationResult solve_relaxation(const POPInstance& pop, int d,
                                  const SolverSettings& settings = {});

enum class RankTolMode { Absolute, Relative };

struct FlatnessReport {
    bool flat = false;
    int flat_order = -1;     // smallest d' with rank M_{d'} = rank M_{d'-gap}
    std::vector<int> ranks;  // numerical rank of M_{d'}(y) for d' = 0..d
};

// Rank pattern of the nested moment matrices; flat when some order d' in
// [gap, d] satisfies rank M_{d'} = rank M_{d'-gap}. In Absolute mode an
// eigenvalue counts toward the rank when it reaches rank_tol itself; in
// Relative mode when it reaches rank_tol times the largest eigenvalue.
FlatnessReport flatness_check(const RelaxationResult& result, int gap, double rank_tol = 1e-3,
                              RankTolMode mode = RankTolMode::Absolute);

// Flat rank-1 certificate turned into a candidate minimizer: the degree-one
// pseudo-moments, verified to be feasible and to attain the bound. Returns
// nothing when the certificate or the verification fails.
std::optional<std::vector<double>> extract_rank1_minimizer(const POPInstance& pop,
                                                           const RelaxationResult& result,
                                                           double rank_tol = 1e-3,
                                                           RankTolMode mode = RankTolMode::Absolute);

}  // namespace cdkpop
