#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/cdk.hpp"
#include "core/instances.hpp"
#include "core/relax.hpp"
#include "core/rng.hpp"

using namespace cdkpop;

namespace {

// order-1 optimal pseudo-moments of the two-variable fixture, numerical
// rank 3 at the order-1 bound -3
MomentSequence rank3_pseudo_moments() {
    MomentSequence y(2, 2);
    y.set({0, 0}, 1.0);
    y.set({1, 0}, 1.6562);
    y.set({0, 1}, 2.0833);
    y.set({2, 0}, 3.3124);
    y.set({1, 1}, 3.4061);
    y.set({0, 2}, 4.4997);
    return y;
}

}  // namespace

TEST_SUITE_BEGIN("cdk");

TEST_CASE("rank-3 pseudo-moments give a kernel-free model with mass near 3") {
    MomentSequence y = rank3_pseudo_moments();
    ChristoffelModel model = build_christoffel(y, 1, 1e-5, 1e-3);
    CHECK(model.n == 2);
    CHECK(model.d == 1);
    CHECK(model.eigen_pairs.size() == 3);
    CHECK(model.kernel_dim == 0);
    for (size_t i = 1; i < model.eigen_pairs.size(); ++i)
        CHECK(model.eigen_pairs[i - 1].second >= model.eigen_pairs[i].second);

    CHECK(christoffel_mass(model) == doctest::Approx(2.9995465900755827).epsilon(1e-9));
    // symbolic and closed-form mass agree
    CHECK(std::abs(christoffel_mass(model, y) - christoffel_mass(model)) <= 1e-8);

    // eigenvector coefficient vectors are orthonormal
    MomentIndexer mi(2, 1);
    for (size_t a = 0; a < model.eigen_pairs.size(); ++a)
        for (size_t b = a; b < model.eigen_pairs.size(); ++b) {
            double dot = 0.0;
            for (int j = 0; j < 3; ++j)
                dot += model.eigen_pairs[a].first.coef(mi.rows()[j]) *
                       model.eigen_pairs[b].first.coef(mi.rows()[j]);
            CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) <= 1e-8);
        }
}

TEST_CASE("mass identity holds on mixture moments") {
    Xoshiro256 rng(314);
    std::vector<std::vector<double>> atoms;
    for (int k = 0; k < 4; ++k)
        atoms.push_back({2.0 * rng.uniform01() - 1.0, 2.0 * rng.uniform01() - 1.0});

    MomentSequence y(2, 4);
    for (const auto& z : atoms) {
        MomentSequence dz = MomentSequence::dirac(z, 4);
        for (int p = 0; p < y.basis().size(); ++p) y[p] += 0.25 * dz[p];
    }

    for (double beta : {1e-3, 1e-6}) {
        ChristoffelModel m1 = build_christoffel(y, 1, beta, 1e-9);
        CHECK(std::abs(christoffel_mass(m1, y) - christoffel_mass(m1)) <= 1e-8);
        ChristoffelModel m2 = build_christoffel(y, 2, beta, 1e-9);
        CHECK(std::abs(christoffel_mass(m2, y) - christoffel_mass(m2)) <= 1e-8);
        // four atoms leave the order-2 matrix rank deficient
        CHECK(christoffel_mass(m2) <= 4.0 + 1e-6);
    }
}

TEST_CASE("identity moment matrix evaluates to the scaled squared norm") {
    MomentSequence y(2, 2);
    y.set({0, 0}, 1.0);
    y.set({2, 0}, 1.0);
    y.set({0, 2}, 1.0);
    const double beta = 1e-4;
    ChristoffelModel model = build_christoffel(y, 1, beta, 1e-6);
    CHECK(model.kernel_dim == 0);
    for (double px : {0.0, 0.7, -1.3})
        for (double py : {0.4, -0.2}) {
            const double expect = (1.0 + px * px + py * py) / (1.0 + beta);
            CHECK(christoffel_eval(model, {px, py}) == doctest::Approx(expect).epsilon(1e-10));
        }
}

TEST_CASE("uniform-square models match the closed-form values") {
    MomentSequence y = uniform_box_moments(2, 2);

    ChristoffelModel m1 = build_christoffel(y, 1, 1e-9, 1e-12);
    CHECK(m1.kernel_dim == 0);
    // 12x^2 + 12y^2 - 12x - 12y + 7 at reference points
    CHECK(christoffel_eval(m1, {0.0, 1.25}) == doctest::Approx(10.75).epsilon(1e-6));
    CHECK(christoffel_eval(m1, {0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-6));

    ChristoffelModel m2 = build_christoffel(y, 2, 1e-9, 1e-12);
    CHECK(m2.kernel_dim == 0);
    CHECK(christoffel_eval(m2, {0.0, 1.25}) == doctest::Approx(77.328125).epsilon(1e-6));
    CHECK(christoffel_eval(m2, {0.5, 0.5}) == doctest::Approx(3.5).epsilon(1e-6));
    // expected mass equals the basis size when the matrix has full rank
    CHECK(christoffel_mass(m2, y) == doctest::Approx(6.0).epsilon(1e-6));

    // the mean point minimizes over a grid spilling past the square
    const double vmin = christoffel_eval(m1, {0.5, 0.5});
    for (double gx = -0.25; gx <= 1.2501; gx += 0.05)
        for (double gy = -0.25; gy <= 1.2501; gy += 0.05)
            CHECK(christoffel_eval(m1, {gx, gy}) >= vmin - 1e-12);

    // growth along a ray leaving the square
    double prev = christoffel_eval(m2, {1.0, 1.0});
    for (double t : {1.25, 1.5, 2.0, 3.0}) {
        const double v = christoffel_eval(m2, {t, t});
        CHECK(v > prev);
        prev = v;
    }

    // stationarity at the mean point via central differences
    const double h = 1e-5;
    const double dx =
        (christoffel_eval(m1, {0.5 + h, 0.5}) - christoffel_eval(m1, {0.5 - h, 0.5})) / (2 * h);
    const double dy =
        (christoffel_eval(m1, {0.5, 0.5 + h}) - christoffel_eval(m1, {0.5, 0.5 - h})) / (2 * h);
    CHECK(std::abs(dx) <= 1e-6);
    CHECK(std::abs(dy) <= 1e-6);
}

TEST_CASE("point-mass moments produce a full kernel and unit mass") {
    const std::vector<double> z{0.3, -0.7};
    MomentSequence y = MomentSequence::dirac(z, 2);
    ChristoffelModel model = build_christoffel(y, 1, 1e-5, 1e-3);
    CHECK(model.kernel_dim == 2);
    CHECK(model.range_dim() == 1);
    CHECK(christoffel_mass(model) == doctest::Approx(1.0).epsilon(1e-4));

    // nonnegative everywhere by construction
    Xoshiro256 rng(555);
    for (int t = 0; t < 10000; ++t) {
        std::vector<double> x{4.0 * rng.uniform01() - 2.0, 4.0 * rng.uniform01() - 2.0};
        CHECK(christoffel_eval(model, x) >= 0.0);
    }
}

TEST_CASE("sublevel constraints state exactly the spectral membership test") {
    const std::vector<double> z{0.3, -0.7};
    MomentSequence y = MomentSequence::dirac(z, 2);
    ChristoffelModel model = build_christoffel(y, 1, 1e-5, 1e-3);
    SublevelConstraints sc = sublevel_constraints(model, 1.0);
    CHECK(sc.kernel_constraints.size() == 2);
    CHECK(sc.range_constraint.degree() == 2);
    for (const auto& kc : sc.kernel_constraints) CHECK(kc.degree() == 2);

    // the generating point satisfies every constraint
    CHECK(sc.range_constraint.eval(z) >= 0.0);
    for (const auto& kc : sc.kernel_constraints) CHECK(kc.eval(z) >= 0.0);

    // membership agreement between expanded polynomials and eigenpairs
    Xoshiro256 rng(987);
    int inside = 0;
    for (int t = 0; t < 500; ++t) {
        std::vector<double> x{4.0 * rng.uniform01() - 2.0, 4.0 * rng.uniform01() - 2.0};
        bool poly_ok = sc.range_constraint.eval(x) >= 0.0;
        for (const auto& kc : sc.kernel_constraints) poly_ok = poly_ok && kc.eval(x) >= 0.0;

        double range_sum = 0.0;
        for (int i = 0; i < model.range_dim(); ++i) {
            const double pv = model.eigen_pairs[i].first.eval(x);
            range_sum += pv * pv / (model.eigen_pairs[i].second + model.beta);
        }
        bool spec_ok = range_sum <= sc.gamma;
        for (int j = model.range_dim(); j < 3; ++j) {
            const double pv = model.eigen_pairs[j].first.eval(x);
            spec_ok = spec_ok && pv * pv <= model.beta;
        }
        CHECK(poly_ok == spec_ok);
        inside += poly_ok;
    }
    // the sublevel set is small but the generating point's neighborhood is in it
    CHECK(inside < 500);

    // kernel-free models emit no kernel constraints
    SublevelConstraints free_sc = sublevel_constraints(build_christoffel(rank3_pseudo_moments(), 1, 1e-5, 1e-3), 2.0);
    CHECK(free_sc.kernel_constraints.empty());
}

TEST_CASE("regularization sharpens the model away from the support") {
    MomentSequence y = MomentSequence::dirac({0.3, -0.7}, 2);
    const std::vector<double> far{3.0, 3.0};
    double prev = 0.0;
    for (double beta : {1e-2, 1e-3, 1e-4}) {
        ChristoffelModel model = build_christoffel(y, 1, beta, 1e-3);
        const double v = christoffel_eval(model, far);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("marginal sequences restrict to one coordinate") {
    MomentSequence y = rank3_pseudo_moments();
    MomentSequence m = marginal_sequence(y, 1);
    CHECK(m.n() == 1);
    CHECK(m.order() == 2);
    CHECK(m.value({0}) == 1.0);
    CHECK(m.value({1}) == 2.0833);
    CHECK(m.value({2}) == 4.4997);

    MomentSequence u = uniform_box_moments(2, 2);
    MomentSequence mu = marginal_sequence(u, 0);
    for (int k = 0; k <= 4; ++k) CHECK(mu.value({k}) == doctest::Approx(1.0 / (k + 1)));

    // marginal of a point mass is the univariate point mass
    MomentSequence dz = MomentSequence::dirac({0.4, -1.2}, 4);
    MomentSequence m1 = marginal_sequence(dz, 1);
    MomentSequence expect = MomentSequence::dirac({-1.2}, 4);
    for (int k = 0; k <= 4; ++k)
        CHECK(m1.value({k}) == doctest::Approx(expect.value({k})).epsilon(1e-14));

    CHECK_THROWS_AS(marginal_sequence(y, 2), std::out_of_range);
    CHECK_THROWS_AS(marginal_sequence(y, -1), std::out_of_range);
}

TEST_CASE("marginal point-mass model stays near one at its point") {
    MomentSequence y = MomentSequence::dirac({0.4, -1.2}, 2);
    ChristoffelModel model = marginal_christoffel(y, 0, 1e-3, 1e-3);
    CHECK(model.n == 1);
    CHECK(model.d == 1);
    CHECK(model.kernel_dim == 1);
    const double v = christoffel_eval(model, {0.4});
    CHECK(v <= 1.01);
    CHECK(v >= 0.9);
}

TEST_CASE("two-ball marginal thresholds at the reference local point") {
    POPInstance pop = union_balls_fixture();
    RelaxationResult r2 = solve_relaxation(pop, 2);
    REQUIRE(r2.solver_status == SolverStatus::Optimal);
    CHECK(r2.bound == doctest::Approx(-7.336874).epsilon(2e-4));

    const std::vector<double> xbar{1.2602, 0.9712, 0.9292, 0.8395, 1.0262};
    const std::vector<double> expect{1.2053, 2.5616, 4.2382, 8.1868, 1.5787};
    for (int i = 0; i < 5; ++i) {
        ChristoffelModel mi = marginal_christoffel(r2.y, i, 1e-3, 1e-3);
        const double gi = christoffel_eval(mi, {xbar[i]});
        CHECK(gi == doctest::Approx(expect[i]).epsilon(2e-2));
    }
}

TEST_SUITE_END();
