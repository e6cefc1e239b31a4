#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "core/poly.hpp"
#include "core/relax.hpp"
#include "core/sparsity.hpp"

namespace cdkpop {

// Random box QCQP: min x'Qx + q'x over [0,1]^n. Q is a symmetrized matrix
// of standard normals, q standard normal, and a fraction of the independent
// entries of (Q, q) is zeroed by a seeded shuffle. The box is encoded with
// the quadratic constraints x_i(1 - x_i) >= 0, which keep the order-1
// relaxation bounded for indefinite Q.
POPInstance gen_box_qcqp(int n, double zero_fraction, std::uint64_t seed);

// Random block QCQP: consecutive overlapping variable groups, one dense
// symmetric normal coupling per group, a dense linear term, and the same
// quadratic box constraints. Returns the instance with its declared
// decomposition.
std::pair<POPInstance, CliqueDecomposition> gen_block_qcqp(int p,
                                                           const std::vector<int>& block_sizes,
                                                           const std::vector<int>& overlaps,
                                                           std::uint64_t seed);
// uniform block size and overlap
std::pair<POPInstance, CliqueDecomposition> gen_block_qcqp(int p, int block_size, int overlap,
                                                           std::uint64_t seed);

// Two-variable nonconvex quadratic with four quadratic constraints and
// global minimizer (2, 2): the order-1 bound is -3, the order-2 bound -2
// is exact and flat.
POPInstance nonconvex_quadratic_fixture();

// Five-variable quadratic minimized over the union of two disjoint balls,
// encoded as the single quartic constraint -g1(x) g2(x) >= 0 with
// g1 = 1 - |x|^2 and g2 = 0.1 - |x - 1|^2.
POPInstance union_balls_fixture();

struct BallPair {
    std::vector<double> center1, center2;
    double radius1 = 0.0, radius2 = 0.0;
};

// centers and radii of the two balls behind union_balls_fixture
BallPair union_balls_geometry();

struct LocalSolveResult {
    std::vector<double> x;
    double value = 0.0;
};

// Multistart projected gradient descent with Armijo backtracking. Iterates
// clamp to the per-coordinate interval hull read off the univariate
// constraints; the remaining constraints filter the converged candidates.
// Start 0 sits at the interval midpoints, later starts draw uniformly from
// the hull. Throws when no start converges to a feasible point.
LocalSolveResult local_solve(const POPInstance& pop, int starts, std::uint64_t seed,
                             int iters = 500);

// the same descent from a single explicit start
LocalSolveResult local_refine(const POPInstance& pop, const std::vector<double>& x0,
                              int iters = 500);

// Variant for a union of two balls: iterates project onto the nearest
// ball. Starts 0 and 1 sit at the two centers, later starts draw uniformly
// from a box covering both balls.
LocalSolveResult local_solve_balls(const POPInstance& pop, const BallPair& balls, int starts,
                                   std::uint64_t seed, int iters = 500);

// moments of the uniform measure on the unit box, housed up to degree 2d
MomentSequence uniform_box_moments(int n, int d);

}  // namespace cdkpop
