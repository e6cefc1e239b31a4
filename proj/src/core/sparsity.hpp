#pragma once
#include <vector>

#include "core/relax.hpp"

namespace cdkpop {

// Ordered variable groups used to split one large moment relaxation into
// coupled small blocks, together with the bookkeeping that routes each
// constraint and each objective monomial to a single group. Indices are
// 0-based; every variable must appear in at least one group.
struct CliqueDecomposition {
    std::vector<std::vector<int>> cliques;

    // group index per constraint; the constraint's variables must lie
    // inside the assigned group
    std::vector<int> constraint_assignment;

    // one ambient polynomial per group, supported on that group's
    // variables; the parts add back to the objective, coefficient for
    // coefficient
    std::vector<Polynomial> objective_split;

    int num_cliques() const { return static_cast<int>(cliques.size()); }

    // throws unless each clique is nonempty, strictly increasing, inside
    // [0, n), and the union covers every variable
    void validate(int n) const;
    // additionally checks the assignment and the objective split against
    // the instance, naming the offending constraint or monomial
    void validate(const POPInstance& pop) const;
};

// embed a polynomial written in the group's local variables into all n
// ambient variables
Polynomial lift_clique_polynomial(const Polynomial& p, int n, const std::vector<int>& clique);

// rewrite an ambient polynomial supported on the group over its local
// variables; throws when a monomial leaves the group
Polynomial restrict_to_clique(const Polynomial& g, const std::vector<int>& clique);

// Variable groups from the coupling structure of the instance: two
// variables are linked when they share an objective monomial or appear in
// the same constraint, the link graph is made chordal by minimum-degree
// elimination, and the groups are its maximal cliques. Constraints and
// objective monomials go to the first covering group.
CliqueDecomposition detect_cliques(const POPInstance& pop);

// Declared variable groups: fills a missing assignment or objective split
// by the same first-covering rule, validates everything against the
// instance, and returns the completed decomposition.
CliqueDecomposition detect_cliques(const POPInstance& pop, CliqueDecomposition declared);

// Group-structured moment relaxation of order d as a block SDP: one PSD
// moment block per group, localizing blocks assembled over the assigned
// group's variables only, equality rows identifying moments shared between
// groups, one normalization per group, and the objective through the split
// parts. A single-group decomposition reproduces the dense relaxation.
ConicProgram build_sparse_relaxation(const POPInstance& pop, const CliqueDecomposition& dec, int d);

struct SparseRelaxationResult {
    int order = 0;
    double bound = 0.0;                            // lower bound
    std::vector<MomentSequence> clique_moments;    // per group, local variables
    std::vector<Eigen::MatrixXd> moment_matrices;  // per group, rebuilt from y
    SolverStatus solver_status = SolverStatus::NumericalFailure;
    ConicSolution conic;
};

// Each group's pseudo-moments are read from that group's own solution
// block, so the agreement of shared moments across groups reflects how
// well the solver honored the identifying rows.
SparseRelaxationResult solve_sparse_relaxation(const POPInstance& pop,
                                               const CliqueDecomposition& dec, int d,
                                               const SolverSettings& settings = {});

}  // namespace cdkpop
