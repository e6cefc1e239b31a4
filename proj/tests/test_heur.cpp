#include <algorithm>
#include <cmath>
#include <vector>

#include "core/cdk.hpp"
#include "core/heur.hpp"
#include "core/instances.hpp"
#include "core/relax.hpp"
#include "doctest.h"

using namespace cdkpop;

namespace {

// pseudo-moments of the order-1 optimum of the two-variable fixture,
// numerically rank 3
MomentSequence rank3_reference_moments() {
    MomentSequence y(2, 2);
    y.set({0, 0}, 1.0);
    y.set({1, 0}, 1.6562);
    y.set({0, 1}, 2.0833);
    y.set({2, 0}, 3.3124);
    y.set({1, 1}, 3.4061);
    y.set({0, 2}, 4.4997);
    return y;
}

LocalDriver fixed_upper_bound(std::vector<double> x, double value) {
    LocalDriver d;
    d.initial = [x = std::move(x), value]() -> std::optional<LocalSolveResult> {
        return LocalSolveResult{x, value};
    };
    return d;
}

bool monotone_nondecreasing(const HeuristicTrace& tr, double slack) {
    for (size_t i = 1; i < tr.iterations.size(); ++i) {
        double prev = tr.iterations[i - 1].bound;
        if (tr.iterations[i].bound < prev - slack * (1.0 + std::abs(prev))) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("heur") {

TEST_CASE("relative gap conventions") {
    CHECK(relative_gap(-2.0, -3.0) == doctest::Approx(50.0));
    CHECK(relative_gap(0.0, -0.1) == doctest::Approx(10.0));
    CHECK(relative_gap(-5.7161, -7.3367) == doctest::Approx(28.3516).epsilon(1e-4));
    CHECK(relative_gap_vs_lower(-5.7161, -7.3367) == doctest::Approx(22.0886).epsilon(1e-4));
    CHECK(relative_gap_vs_lower(0.1, 0.0) == doctest::Approx(10.0));
    CHECK(relative_gap(-2.0, -2.0) == doctest::Approx(0.0));
}

TEST_CASE("settings validation rejects out-of-range parameters") {
    POPInstance pop = nonconvex_quadratic_fixture();
    H1Settings h1;
    h1.epsilon = 0.0;
    CHECK_THROWS_AS(run_h1(pop, h1), std::invalid_argument);
    h1.epsilon = 1.0;
    CHECK_THROWS_AS(run_h1(pop, h1), std::invalid_argument);
    h1 = H1Settings{};
    h1.d_c = 2;  // exceeds d = 1
    CHECK_THROWS_AS(run_h1(pop, h1), std::invalid_argument);
    h1 = H1Settings{};
    h1.delta = -1.0;
    CHECK_THROWS_AS(run_h1(pop, h1), std::invalid_argument);

    H2Settings h2;
    h2.tau = 1.0;
    CHECK_THROWS_AS(run_h2(pop, h2, {2.0, 2.0}), std::invalid_argument);
    h2 = H2Settings{};
    CHECK_THROWS_AS(run_h2(pop, h2, {2.0}), std::invalid_argument);
}

TEST_CASE("explicit sublevel thresholds reshape the order-1 bound") {
    POPInstance pop = nonconvex_quadratic_fixture();
    ChristoffelModel model = build_christoffel(rank3_reference_moments(), 1, 1e-5);
    REQUIRE(model.kernel_dim == 0);

    const std::vector<std::pair<double, double>> table = {
        {1.50, -2.313158}, {1.15, -1.857731}, {2.85, -3.000000}, {1.01, -1.52121}};
    for (const auto& [gamma, expected] : table) {
        CAPTURE(gamma);
        POPInstance shrunk = pop;
        shrunk.constraints.push_back(sublevel_constraints(model, gamma).range_constraint);
        RelaxationResult res = solve_relaxation(shrunk, 1);
        REQUIRE(res.solver_status == SolverStatus::Optimal);
        CHECK(std::abs(res.bound - expected) <= 2e-3);
    }
}

TEST_CASE("excluding the optimum leaves a fixed threshold violation") {
    POPInstance pop = nonconvex_quadratic_fixture();
    RelaxationResult res = solve_relaxation(pop, 1);
    REQUIRE(res.solver_status == SolverStatus::Optimal);

    const double epsilon = 0.05;
    ChristoffelModel model = build_christoffel(res.y, 1, 1e-5, 1e-6);
    double gamma = christoffel_mass(model);
    SublevelConstraints sub = sublevel_constraints(model, (1.0 - epsilon) * gamma);

    // the generating pseudo-moments sit exactly epsilon * gamma below the
    // cut, which is what forces the next bound to move
    double violation = res.y.riesz(sub.range_constraint);
    CHECK(std::abs(violation + epsilon * gamma) <= 1e-6 * (1.0 + gamma));
}

TEST_CASE("iterated restriction climbs the two-variable order-1 bound") {
    POPInstance pop = nonconvex_quadratic_fixture();
    H1Settings s;
    s.d = 1;
    s.d_c = 1;
    s.epsilon = 0.05;
    s.beta = 1e-5;
    s.kernel_tol = 1e-6;
    s.max_iters = 26;

    HeuristicTrace tr = run_h1(pop, s);

    REQUIRE(tr.iterations.size() == 27);
    CHECK(tr.termination == Termination::MaxIters);
    CHECK(!tr.upper_bound.has_value());
    CHECK(!tr.iterations[0].gap_percent.has_value());

    CHECK(std::abs(tr.iterations[0].bound - (-3.0)) <= 1e-4);
    CHECK(std::abs(tr.iterations[1].bound - (-3.0)) <= 1e-3);
    CHECK(monotone_nondecreasing(tr, 1e-6));
    CHECK(std::abs(tr.final_bound - (-2.101190)) <= 0.02 * 2.101190);
    CHECK(tr.final_bound == tr.iterations.back().bound);

    // the mass starts just below the full basis size and decays
    REQUIRE(tr.iterations[0].gammas.size() == 1);
    CHECK(std::abs(tr.iterations[0].gammas[0] - 2.999768) <= 1e-3);
    CHECK(tr.iterations[0].kernel_constraints == 0);
    CHECK(tr.iterations[0].constraints_added == 1);

    // a kernel direction eventually opens up and drives the climb; the
    // exact round where the trailing eigenvalue crosses the tolerance
    // depends on which point of the degenerate order-1 optimal face the
    // solver reports, so only the mechanism is pinned
    int first_kernel = -1;
    int total_kernel = 0;
    for (const auto& rec : tr.iterations) {
        if (rec.kernel_constraints > 0 && first_kernel < 0) first_kernel = rec.k;
        total_kernel += rec.kernel_constraints;
    }
    CHECK(first_kernel >= 5);
    CHECK(first_kernel <= 20);
    CHECK(total_kernel >= 6);
    // the bound sits flat at the order-1 value until the kernel cut lands
    CHECK(std::abs(tr.iterations[first_kernel].bound - (-3.0)) <= 1e-3);
    CHECK(tr.iterations[first_kernel + 1].bound > -3.0 + 1e-2);
}

TEST_CASE("gap tolerance stops the climb once the bound is close") {
    POPInstance pop = nonconvex_quadratic_fixture();
    H1Settings s;
    s.d = 1;
    s.epsilon = 0.05;
    s.beta = 1e-5;
    s.kernel_tol = 1e-6;
    s.max_iters = 26;
    s.delta = 0.05;  // five percent

    HeuristicTrace tr = run_h1(pop, s, fixed_upper_bound({2.0, 2.0}, -2.2));

    REQUIRE(tr.termination == Termination::GapMet);
    CHECK(tr.iterations.size() < 27);
    const IterationRecord& last = tr.iterations.back();
    REQUIRE(last.gap_percent.has_value());
    CHECK(*last.gap_percent <= 5.0);
    CHECK(tr.final_bound >= -2.2 * 1.05 - 1e-9);
    CHECK(tr.final_bound <= -2.2 + 1e-9);
    REQUIRE(tr.upper_bound.has_value());
    CHECK(*tr.upper_bound == doctest::Approx(-2.2));
}

TEST_CASE("a crossed upper bound halts with the crossing bound kept") {
    POPInstance pop = nonconvex_quadratic_fixture();
    H1Settings s;
    s.d = 1;
    s.epsilon = 0.05;
    s.beta = 1e-5;
    s.kernel_tol = 1e-6;
    s.max_iters = 26;
    s.delta = 0.0;

    HeuristicTrace tr = run_h1(pop, s, fixed_upper_bound({2.0, 2.0}, -2.5));

    REQUIRE(tr.termination == Termination::UpperBoundCrossed);
    CHECK(tr.final_bound > -2.5);
    CHECK(tr.final_bound == tr.iterations.back().bound);
    CHECK(tr.iterations.size() >= 15);
    CHECK(tr.iterations.size() < 27);
    // every earlier bound respected the cap
    for (size_t i = 0; i + 1 < tr.iterations.size(); ++i)
        CHECK(tr.iterations[i].bound <= -2.5 + 1e-9);
}

TEST_CASE("an exact upper bound is recognized immediately") {
    POPInstance pop = nonconvex_quadratic_fixture();
    H1Settings s;
    s.d = 2;
    s.epsilon = 0.05;
    s.beta = 1e-5;
    s.max_iters = 5;

    HeuristicTrace tr = run_h1(pop, s, fixed_upper_bound({2.0, 2.0}, -2.0));

    REQUIRE(tr.termination == Termination::GapMet);
    CHECK(tr.iterations.size() == 1);
    CHECK(tr.iterations[0].constraints_added == 0);
    CHECK(std::abs(tr.final_bound - (-2.0)) <= 1e-4);
}

TEST_CASE("an infeasible instance surfaces as a solver failure") {
    POPInstance pop;
    pop.n = 1;
    pop.objective = Polynomial::monomial(1, {1});
    Polynomial lower(1);  // x - 1 >= 0
    lower.add_term({1}, 1.0);
    lower.add_term({0}, -1.0);
    Polynomial upper(1);  // -x >= 0
    upper.add_term({1}, -1.0);
    pop.constraints = {lower, upper};

    H1Settings s;
    s.d = 1;
    HeuristicTrace tr = run_h1(pop, s);

    CHECK(tr.termination == Termination::SolverFailure);
    CHECK(tr.iterations.size() == 1);
    CHECK(tr.iterations[0].solver_status != SolverStatus::Optimal);
    CHECK(std::isnan(tr.final_bound));
}

TEST_CASE("marginal filter accepts both coordinates at a loose threshold") {
    POPInstance pop = nonconvex_quadratic_fixture();
    H2Settings s;
    s.d = 1;
    s.tau = 1.5;

    HeuristicTrace tr = run_h2(pop, s, {2.0, 2.0});

    REQUIRE(tr.iterations.size() == 2);
    CHECK(tr.termination == Termination::MaxIters);
    CHECK(!tr.no_constraints_added);
    CHECK(tr.coordinates_added == std::vector<int>{0, 1});
    // the order-1 optimum is a face, not a point, so the marginal values
    // carry the solver's choice within it; the bands stay wide enough for
    // that while keeping the two coordinates separated
    REQUIRE(tr.iterations[0].gammas.size() == 2);
    CHECK(std::abs(tr.iterations[0].gammas[0] - 1.208) <= 8e-2);
    CHECK(std::abs(tr.iterations[0].gammas[1] - 1.043) <= 8e-2);
    CHECK(tr.iterations[0].gammas[0] > tr.iterations[0].gammas[1]);
    CHECK(std::abs(tr.iterations[0].bound - (-3.0)) <= 1e-3);
    CHECK(std::abs(tr.final_bound - (-2.0)) <= 1e-3);
}

TEST_CASE("marginal filter is exactly the threshold comparison") {
    POPInstance pop = nonconvex_quadratic_fixture();
    H2Settings s;
    s.d = 1;
    s.tau = 1.1;  // between the two marginal values

    HeuristicTrace tr = run_h2(pop, s, {2.0, 2.0});

    CHECK(tr.coordinates_added == std::vector<int>{1});
    // the surviving coordinate alone does not move the order-1 bound
    CHECK(std::abs(tr.final_bound - (-3.0)) <= 1e-3);

    // every accepted coordinate sits at or below tau, every rejected one above
    const auto& gammas = tr.iterations[0].gammas;
    for (int i = 0; i < pop.n; ++i) {
        bool accepted = std::find(tr.coordinates_added.begin(), tr.coordinates_added.end(), i) !=
                        tr.coordinates_added.end();
        CHECK(accepted == (gammas[i] <= s.tau));
    }
}

TEST_CASE("a threshold below every marginal adds nothing") {
    POPInstance pop = nonconvex_quadratic_fixture();
    H2Settings s;
    s.d = 1;
    s.tau = 1.01;

    HeuristicTrace tr = run_h2(pop, s, {2.0, 2.0});

    CHECK(tr.no_constraints_added);
    CHECK(tr.coordinates_added.empty());
    CHECK(tr.iterations.size() == 1);
    CHECK(std::abs(tr.final_bound - (-3.0)) <= 1e-3);
}

TEST_CASE("five-variable marginal filter keeps one coordinate") {
    POPInstance pop = union_balls_fixture();
    H2Settings s;
    s.d = 2;
    s.tau = 1.5;
    s.beta = 1e-3;

    const std::vector<double> xbar = {1.2602, 0.9712, 0.9292, 0.8395, 1.0262};
    HeuristicTrace tr = run_h2(pop, s, xbar);

    REQUIRE(tr.iterations.size() == 2);
    CHECK(tr.coordinates_added == std::vector<int>{0});

    const std::vector<double> expected = {1.2053, 2.5616, 4.2382, 8.1868, 1.5787};
    REQUIRE(tr.iterations[0].gammas.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CAPTURE(i);
        CHECK(std::abs(tr.iterations[0].gammas[i] - expected[i]) <=
              2e-2 * (1.0 + expected[i]));
    }

    CHECK(std::abs(tr.iterations[0].bound - (-7.336874)) <= 5e-3);
    CHECK(std::abs(tr.final_bound - (-6.19039)) <= 5e-3);

    // the strengthened bound against the best known feasible value, in both
    // gap conventions
    const double ub = -5.716418;
    CHECK(std::abs(relative_gap(ub, tr.final_bound) - 8.29) <= 0.12);
    CHECK(std::abs(relative_gap_vs_lower(ub, tr.final_bound) - 7.66) <= 0.12);
}

TEST_CASE("five-variable restriction climbs with a full-order model") {
    POPInstance pop = union_balls_fixture();
    H1Settings s;
    s.d = 2;
    s.d_c = 2;
    s.epsilon = 0.08;
    s.beta = 0.05;
    s.kernel_tol = 1e-3;
    s.max_iters = 5;

    HeuristicTrace tr = run_h1(pop, s);

    REQUIRE(tr.iterations.size() == 6);
    CHECK(tr.termination == Termination::MaxIters);
    CHECK(std::abs(tr.iterations[0].bound - (-7.336874)) <= 5e-3);
    CHECK(monotone_nondecreasing(tr, 1e-6));
    CHECK(std::abs(tr.final_bound - (-6.730381)) <= 0.02 * 6.730381);
    // the rank-two optimum leaves most of the degree-2 basis in the kernel
    CHECK(tr.iterations[0].kernel_constraints >= 15);
}

TEST_CASE("five-variable restriction climbs with an order-1 model") {
    POPInstance pop = union_balls_fixture();
    H1Settings s;
    s.d = 2;
    s.d_c = 1;
    s.epsilon = 0.05;
    s.beta = 1e-5;
    s.kernel_tol = 1e-3;
    s.max_iters = 5;

    HeuristicTrace tr = run_h1(pop, s);

    REQUIRE(tr.iterations.size() == 6);
    CHECK(tr.termination == Termination::MaxIters);
    CHECK(monotone_nondecreasing(tr, 1e-6));
    CHECK(std::abs(tr.final_bound - (-6.703677)) <= 0.02 * 6.703677);
    // order-1 model over six basis elements, two atoms worth of range
    CHECK(tr.iterations[0].kernel_constraints == 4);
    CHECK(tr.iterations[0].constraints_added == 5);
    REQUIRE(tr.iterations[0].gammas.size() == 1);
    CHECK(std::abs(tr.iterations[0].gammas[0] - 2.0) <= 1e-3);
}

TEST_CASE("ten-variable box instance tightens toward the exact optimum") {
    POPInstance pop = gen_box_qcqp(10, 0.0, 1);
    LocalDriver local = hull_local_driver(pop, 50, 1 * 1000 + 17);

    H1Settings s;
    s.d = 1;
    s.epsilon = 0.05;
    s.beta = 1e-5;
    s.kernel_tol = 1e-3;
    s.delta = 1e-5;
    s.max_iters = 1;

    HeuristicTrace tr = run_h1(pop, s, local);

    REQUIRE(tr.iterations.size() == 2);
    CHECK(tr.termination == Termination::MaxIters);
    REQUIRE(tr.upper_bound.has_value());
    CHECK(std::abs(*tr.upper_bound - (-9.18907)) <= 1e-4);
    CHECK(std::abs(tr.iterations[0].bound - (-9.80964)) <= 1e-3);
    CHECK(std::abs(tr.final_bound - (-9.48171)) <= 1e-2);
    // strictly above the plain order-1 bound yet still a valid lower bound
    CHECK(tr.final_bound > tr.iterations[0].bound + 1e-6);
    CHECK(tr.final_bound <= *tr.upper_bound + 1e-4);
}

TEST_CASE("a box instance solved exactly at order 1 stops at once") {
    POPInstance pop = gen_box_qcqp(10, 0.0, 3);
    LocalDriver local = hull_local_driver(pop, 50, 3 * 1000 + 17);

    H1Settings s;
    s.d = 1;
    s.epsilon = 0.05;
    s.beta = 1e-5;
    s.kernel_tol = 1e-3;
    s.delta = 1e-5;
    s.max_iters = 1;

    HeuristicTrace tr = run_h1(pop, s, local);

    CHECK(tr.termination == Termination::GapMet);
    CHECK(tr.iterations.size() == 1);
    CHECK(std::abs(tr.final_bound - (-20.38545)) <= 1e-3);
    REQUIRE(tr.iterations[0].gap_percent.has_value());
    CHECK(*tr.iterations[0].gap_percent <= 1e-3);
}

}  // TEST_SUITE
