#pragma once
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "core/cdk.hpp"
#include "core/instances.hpp"
#include "core/relax.hpp"
#include "core/sparsity.hpp"

namespace cdkpop {

// Relative optimality gap in percent: |ub - lb| / |ub| * 100, degrading to
// the absolute difference (times 100) when the upper bound is zero.
double relative_gap(double upper, double lower);

// Companion convention dividing by the lower bound instead; both readings
// are recorded in heuristic traces so reports can quote either.
double relative_gap_vs_lower(double upper, double lower);

enum class Termination { GapMet, UpperBoundCrossed, MaxIters, SolverFailure };

std::string to_string(Termination t);

// Iterated sublevel-restriction heuristic at fixed relaxation order d.
// Each round fits the spectral model of the order-d_c moment matrix at the
// current optimum, then intersects the feasible set with its sublevel set
// at threshold (1 - epsilon) * gamma_k, excluding that optimum.
struct H1Settings {
    int d = 1;
    int d_c = 0;            // model order for the added constraints; 0 means d
    double epsilon = 0.05;  // penalization factor in (0, 1)
    double delta = 0.005;   // gap tolerance as a fraction of the upper bound
    int max_iters = 15;     // modification rounds; at most max_iters + 1 solves
    double beta = 1e-5;
    double kernel_tol = 1e-3;

    void validate(const POPInstance& pop) const;
    int model_order() const { return d_c > 0 ? d_c : d; }
};

// Single-shot marginal-restriction heuristic: per-coordinate order-1
// Christoffel models evaluated at a trusted local solution decide which
// coordinates get a sublevel constraint, then the relaxation is re-solved
// once.
struct H2Settings {
    int d = 1;
    double tau = 1.5;  // acceptance threshold on the marginal value, > 1
    double beta = 1e-3;
    double kernel_tol = 1e-3;

    void validate(const POPInstance& pop) const;
};

// Hooks into a local solver: `initial` produces the starting upper-bound
// point, `refine` polishes a hint (the degree-one pseudo-moments of the
// current iterate). Either may be empty; without them the heuristic runs
// with no upper bound, so neither the gap test nor the crossing test can
// fire.
struct LocalDriver {
    std::function<std::optional<LocalSolveResult>()> initial;
    std::function<std::optional<LocalSolveResult>(const std::vector<double>&)> refine;
};

// Driver wrapping the multistart interval-hull descent, with refinement
// from a single start. Failures surface as empty results, never throws.
LocalDriver hull_local_driver(const POPInstance& pop, int starts, std::uint64_t seed);

struct IterationRecord {
    int k = 0;
    double bound = std::numeric_limits<double>::quiet_NaN();
    SolverStatus solver_status = SolverStatus::NumericalFailure;
    // H1: the single mass gamma_k; H2: one marginal value per coordinate
    std::vector<double> gammas;
    int constraints_added = 0;    // appended after this solve, kernel included
    int kernel_constraints = 0;
    std::optional<double> upper_bound;      // best value seen up to this round
    std::optional<double> gap_percent;      // |ub - lb| / |ub| convention
    std::optional<double> gap_percent_alt;  // |ub - lb| / |lb| convention
    double wall_time_ms = 0.0;              // solve plus modelling for this round
};

struct HeuristicTrace {
    std::vector<IterationRecord> iterations;
    double final_bound = std::numeric_limits<double>::quiet_NaN();
    Termination termination = Termination::MaxIters;
    std::optional<double> upper_bound;
    // H2 bookkeeping: which coordinates passed the filter; the flag records
    // a run where none did, leaving the bound untouched
    std::vector<int> coordinates_added;
    bool no_constraints_added = false;
    double wall_time_ms = 0.0;
};

// Iterate solve / model / restrict until the bound meets the upper bound
// (GapMet), exceeds it (UpperBoundCrossed, the crossing bound is kept),
// the round budget runs out (MaxIters), or the solver gives up
// (SolverFailure, the last clean bound is kept). The upper bound starts
// from local.initial and shrinks through local.refine at each iterate.
HeuristicTrace run_h1(const POPInstance& pop, const H1Settings& settings,
                      const LocalDriver& local = {},
                      const SolverSettings& solver = {});

// Solve once, filter coordinates by their marginal value at local_point
// (accept when gamma_i <= tau), add the lifted sublevel constraints for the
// accepted coordinates, and re-solve once. Termination is MaxIters on the
// regular single-round path.
HeuristicTrace run_h2(const POPInstance& pop, const H2Settings& settings,
                      const std::vector<double>& local_point,
                      const SolverSettings& solver = {});

// run_h1 over a clique decomposition: every round fits one spectral model
// per variable group from that group's own moments, restricts to all group
// sublevel sets at once (each cut assembled over its group's variables
// only), and re-solves the group-structured relaxation. gammas holds one
// threshold base per group each round. A decomposition missing its
// assignment or split is completed first; a single group reproduces run_h1.
HeuristicTrace run_h1cs(const POPInstance& pop, const CliqueDecomposition& cliques,
                        const H1Settings& settings, const LocalDriver& local = {},
                        const SolverSettings& solver = {});

// run_h2 over a clique decomposition: coordinates are filtered per (group,
// member) pair, so a variable shared by two groups can receive a sublevel
// constraint from each. gammas holds the marginal values in group-major
// order; coordinates_added repeats a variable once per accepting group.
HeuristicTrace run_h2cs(const POPInstance& pop, const CliqueDecomposition& cliques,
                        const H2Settings& settings, const std::vector<double>& local_point,
                        const SolverSettings& solver = {});

}  // namespace cdkpop
