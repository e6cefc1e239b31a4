#include "core/instances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "core/rng.hpp"

namespace cdkpop {

namespace {

MultiIndex unit(int n, int i, int k = 1) {
    MultiIndex a(n, 0);
    a[i] = k;
    return a;
}

std::vector<Polynomial> quadratic_box_constraints(int n) {
    std::vector<Polynomial> gs;
    gs.reserve(n);
    for (int i = 0; i < n; ++i)
        gs.push_back(Polynomial(n, {{unit(n, i), 1.0}, {unit(n, i, 2), -1.0}}));
    return gs;
}

}  // namespace

POPInstance gen_box_qcqp(int n, double zero_fraction, std::uint64_t seed) {
    if (n <= 0) throw std::invalid_argument("gen_box_qcqp: dimension must be positive");
    if (!(zero_fraction >= 0.0 && zero_fraction <= 1.0))
        throw std::invalid_argument("gen_box_qcqp: zero fraction outside [0, 1]");

    Xoshiro256 rng(seed);
    std::vector<std::vector<double>> G(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G[i][j] = rng.normal();
    std::vector<std::vector<double>> Q(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Q[i][j] = 0.5 * (G[i][j] + G[j][i]);
    std::vector<double> q(n);
    for (int i = 0; i < n; ++i) q[i] = rng.normal();

    // zero an exact fraction of the independent entries: upper triangle and
    // diagonal of Q, then q
    const int count = n * (n + 1) / 2 + n;
    std::vector<int> idx(count);
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    const int nz = static_cast<int>(zero_fraction * count);
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(n * (n + 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) pairs.emplace_back(i, j);
    for (int t = 0; t < nz; ++t) {
        const int k = idx[t];
        if (k < static_cast<int>(pairs.size())) {
            auto [i, j] = pairs[k];
            Q[i][j] = 0.0;
            Q[j][i] = 0.0;
        } else {
            q[k - static_cast<int>(pairs.size())] = 0.0;
        }
    }

    POPInstance pop;
    pop.n = n;
    Polynomial f(n);
    for (int i = 0; i < n; ++i) {
        if (Q[i][i] != 0.0) f.add_term(unit(n, i, 2), Q[i][i]);
        for (int j = i + 1; j < n; ++j) {
            if (Q[i][j] == 0.0) continue;
            MultiIndex a(n, 0);
            a[i] = 1;
            a[j] = 1;
            f.add_term(a, 2.0 * Q[i][j]);
        }
        if (q[i] != 0.0) f.add_term(unit(n, i), q[i]);
    }
    pop.objective = std::move(f);
    pop.constraints = quadratic_box_constraints(n);
    return pop;
}

std::pair<POPInstance, CliqueDecomposition> gen_block_qcqp(int p,
                                                           const std::vector<int>& block_sizes,
                                                           const std::vector<int>& overlaps,
                                                           std::uint64_t seed) {
    if (p <= 0) throw std::invalid_argument("gen_block_qcqp: need at least one block");
    if (static_cast<int>(block_sizes.size()) != p)
        throw std::invalid_argument("gen_block_qcqp: one size per block required");
    if (static_cast<int>(overlaps.size()) != p - 1)
        throw std::invalid_argument("gen_block_qcqp: one overlap per adjacent pair required");
    for (int bs : block_sizes)
        if (bs <= 0) throw std::invalid_argument("gen_block_qcqp: block sizes must be positive");
    for (int l = 0; l + 1 < p; ++l)
        if (overlaps[l] <= 0 || overlaps[l] >= std::min(block_sizes[l], block_sizes[l + 1]))
            throw std::invalid_argument(
                "gen_block_qcqp: overlaps must be positive and smaller than both groups");

    CliqueDecomposition dec;
    int start = 0;
    for (int l = 0; l < p; ++l) {
        std::vector<int> I(block_sizes[l]);
        std::iota(I.begin(), I.end(), start);
        dec.cliques.push_back(std::move(I));
        if (l + 1 < p) start += block_sizes[l] - overlaps[l];
    }
    const int n = dec.cliques.back().back() + 1;
    dec.validate(n);

    Xoshiro256 rng(seed);
    std::vector<std::vector<std::vector<double>>> Qs;
    for (int l = 0; l < p; ++l) {
        const int m = block_sizes[l];
        std::vector<std::vector<double>> G(m, std::vector<double>(m));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) G[i][j] = rng.normal();
        std::vector<std::vector<double>> Q(m, std::vector<double>(m));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) Q[i][j] = 0.5 * (G[i][j] + G[j][i]);
        Qs.push_back(std::move(Q));
    }
    std::vector<double> q(n);
    for (int i = 0; i < n; ++i) q[i] = rng.normal();

    POPInstance pop;
    pop.n = n;
    Polynomial f(n);
    for (int l = 0; l < p; ++l) {
        const auto& I = dec.cliques[l];
        const int m = static_cast<int>(I.size());
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                MultiIndex e(n, 0);
                e[I[a]] += 1;
                e[I[b]] += 1;
                f.add_term(e, Qs[l][a][b]);
            }
    }
    for (int i = 0; i < n; ++i) f.add_term(unit(n, i), q[i]);
    pop.objective = std::move(f);
    pop.constraints = quadratic_box_constraints(n);
    dec = detect_cliques(pop, std::move(dec));
    return {std::move(pop), std::move(dec)};
}

std::pair<POPInstance, CliqueDecomposition> gen_block_qcqp(int p, int block_size, int overlap,
                                                           std::uint64_t seed) {
    return gen_block_qcqp(p, std::vector<int>(p, block_size),
                          std::vector<int>(std::max(p - 1, 0), overlap), seed);
}

POPInstance nonconvex_quadratic_fixture() {
    POPInstance pop;
    pop.n = 2;
    pop.objective = Polynomial(2, {{{2, 0}, -2.0},
                                   {{0, 2}, -2.0},
                                   {{1, 1}, 2.0},
                                   {{1, 0}, 2.0},
                                   {{0, 1}, 6.0},
                                   {{0, 0}, -10.0}});
    pop.constraints = {
        Polynomial(2, {{{2, 0}, -1.0}, {{1, 0}, 2.0}}),
        Polynomial(2, {{{0, 0}, 1.0}, {{2, 0}, -1.0}, {{1, 1}, 2.0}, {{0, 2}, -1.0}}),
        Polynomial(2, {{{0, 0}, -8.0}, {{0, 1}, 6.0}, {{0, 2}, -1.0}}),
        Polynomial(2, {{{1, 0}, 1.0}, {{0, 2}, -0.3}}),
    };
    return pop;
}

POPInstance union_balls_fixture() {
    const int n = 5;
    const double Q[5][5] = {
        {-1.4396, -0.2259, 0.0983, -0.0085, -2.3838},
        {-0.2259, 0.8043, 0.3730, 1.2719, 0.1370},
        {0.0983, 0.3730, -1.0236, 0.0597, 0.5024},
        {-0.0085, 1.2719, 0.0597, 0.9421, 1.2085},
        {-2.3838, 0.1370, 0.5024, 1.2085, 0.7885},
    };
    const double q[5] = {-1.269, -2.988, 2.535, -0.4151, 0.1464};

    POPInstance pop;
    pop.n = n;
    Polynomial f(n);
    for (int i = 0; i < n; ++i) {
        f.add_term(unit(n, i, 2), Q[i][i]);
        for (int j = i + 1; j < n; ++j) {
            MultiIndex a(n, 0);
            a[i] = 1;
            a[j] = 1;
            f.add_term(a, 2.0 * Q[i][j]);
        }
        f.add_term(unit(n, i), q[i]);
    }
    pop.objective = std::move(f);

    Polynomial g1 = Polynomial::constant(n, 1.0);
    Polynomial g2 = Polynomial::constant(n, 0.1 - n);
    for (int i = 0; i < n; ++i) {
        g1.add_term(unit(n, i, 2), -1.0);
        g2.add_term(unit(n, i, 2), -1.0);
        g2.add_term(unit(n, i), 2.0);
    }
    pop.constraints = {mul(g1, g2).scaled(-1.0)};
    return pop;
}

BallPair union_balls_geometry() {
    BallPair b;
    b.center1.assign(5, 0.0);
    b.center2.assign(5, 1.0);
    b.radius1 = 1.0;
    b.radius2 = std::sqrt(0.1);
    return b;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
    double lo = -kInf, hi = kInf;
};

// interval hull per coordinate from the univariate constraints of degree
// <= 2; multivariate constraints are left to the feasibility filter
std::vector<Interval> coordinate_hull(const POPInstance& pop) {
    std::vector<Interval> hull(pop.n);
    for (size_t j = 0; j < pop.constraints.size(); ++j) {
        if (!pop.eq_mask.empty() && pop.eq_mask[j]) continue;
        const Polynomial& g = pop.constraints[j];
        if (g.degree() > 2) continue;
        int var = -1;
        bool univariate = true;
        for (const auto& [a, c] : g.terms())
            for (int i = 0; i < pop.n && univariate; ++i)
                if (a[i] > 0) {
                    if (var < 0) var = i;
                    else if (var != i) univariate = false;
                }
        if (!univariate || var < 0) continue;

        const double a2 = g.coef(unit(pop.n, var, 2));
        const double a1 = g.coef(unit(pop.n, var));
        const double a0 = g.coef(MultiIndex(pop.n, 0));
        Interval& iv = hull[var];
        if (a2 < 0.0) {
            const double disc = a1 * a1 - 4.0 * a2 * a0;
            if (disc < 0.0)
                throw std::runtime_error("local solve: empty univariate constraint");
            const double r1 = (-a1 + std::sqrt(disc)) / (2.0 * a2);
            const double r2 = (-a1 - std::sqrt(disc)) / (2.0 * a2);
            iv.lo = std::max(iv.lo, std::min(r1, r2));
            iv.hi = std::min(iv.hi, std::max(r1, r2));
        } else if (a2 == 0.0 && a1 != 0.0) {
            if (a1 > 0.0) iv.lo = std::max(iv.lo, -a0 / a1);
            else iv.hi = std::min(iv.hi, -a0 / a1);
        }
        // a convex quadratic holds outside its roots; that region is not an
        // interval, so it stays with the filter
    }
    for (const auto& iv : hull)
        if (iv.lo > iv.hi) throw std::runtime_error("local solve: empty coordinate interval");
    return hull;
}

std::vector<double> clamp_to_hull(std::vector<double> x, const std::vector<Interval>& hull) {
    for (size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], hull[i].lo, hull[i].hi);
    return x;
}

// one descent run: Armijo backtracking on the projected step, stopping once
// the step norm collapses
template <typename Proj>
std::pair<std::vector<double>, double> descend(const Polynomial& f, std::vector<double> x,
                                               const Proj& proj, int iters) {
    double fx = f.eval(x);
    const int n = static_cast<int>(x.size());
    for (int it = 0; it < iters; ++it) {
        const std::vector<double> g = gradient(f, x);
        double eta = 1.0;
        std::vector<double> xn = x;
        double fn = fx;
        while (eta > 1e-12) {
            std::vector<double> step(n);
            for (int i = 0; i < n; ++i) step[i] = x[i] - eta * g[i];
            xn = proj(std::move(step));
            fn = f.eval(xn);
            double decrease = 0.0;
            for (int i = 0; i < n; ++i) decrease += g[i] * (x[i] - xn[i]);
            if (fn <= fx - 1e-4 * decrease) break;
            eta *= 0.5;
        }
        double norm2 = 0.0;
        for (int i = 0; i < n; ++i) norm2 += (xn[i] - x[i]) * (xn[i] - x[i]);
        x = std::move(xn);
        fx = fn;
        if (std::sqrt(norm2) < 1e-10) break;
    }
    return {std::move(x), fx};
}

bool feasible_point(const POPInstance& pop, const std::vector<double>& x, double tol = 1e-8) {
    for (size_t j = 0; j < pop.constraints.size(); ++j) {
        const double v = pop.constraints[j].eval(x);
        const bool eq = !pop.eq_mask.empty() && pop.eq_mask[j];
        if (eq ? std::abs(v) > tol : v < -tol) return false;
    }
    return true;
}

template <typename Proj, typename StartGen>
LocalSolveResult best_of_starts(const POPInstance& pop, const Proj& proj, int starts,
                                StartGen&& make_start, int iters) {
    LocalSolveResult best;
    best.value = kInf;
    bool found = false;
    for (int s = 0; s < starts; ++s) {
        auto [x, fx] = descend(pop.objective, make_start(s), proj, iters);
        if (!feasible_point(pop, x)) continue;
        if (fx < best.value) {
            best.value = fx;
            best.x = std::move(x);
            found = true;
        }
    }
    if (!found) throw std::runtime_error("local solve: no feasible point found");
    return best;
}

}  // namespace

LocalSolveResult local_solve(const POPInstance& pop, int starts, std::uint64_t seed, int iters) {
    pop.validate();
    if (starts <= 0) throw std::invalid_argument("local solve: need at least one start");
    const auto hull = coordinate_hull(pop);

    // draw every start up front so the stream is independent of descent order
    Xoshiro256 rng(seed);
    std::vector<std::vector<double>> points(starts);
    for (int s = 0; s < starts; ++s) {
        std::vector<double>& x = points[s];
        x.resize(pop.n);
        for (int i = 0; i < pop.n; ++i) {
            const Interval& iv = hull[i];
            if (s == 0) {
                if (std::isfinite(iv.lo) && std::isfinite(iv.hi)) x[i] = 0.5 * (iv.lo + iv.hi);
                else if (std::isfinite(iv.lo)) x[i] = iv.lo;
                else if (std::isfinite(iv.hi)) x[i] = iv.hi;
                else x[i] = 0.0;
            } else {
                const double u = rng.uniform01();
                if (std::isfinite(iv.lo) && std::isfinite(iv.hi)) x[i] = iv.lo + u * (iv.hi - iv.lo);
                else if (std::isfinite(iv.lo)) x[i] = iv.lo + u;
                else if (std::isfinite(iv.hi)) x[i] = iv.hi - u;
                else x[i] = u;
            }
        }
    }

    auto proj = [&hull](std::vector<double> x) { return clamp_to_hull(std::move(x), hull); };
    return best_of_starts(pop, proj, starts, [&points](int s) { return points[s]; }, iters);
}

LocalSolveResult local_refine(const POPInstance& pop, const std::vector<double>& x0, int iters) {
    pop.validate();
    if (static_cast<int>(x0.size()) != pop.n)
        throw std::invalid_argument("local refine: start dimension mismatch");
    const auto hull = coordinate_hull(pop);
    auto proj = [&hull](std::vector<double> x) { return clamp_to_hull(std::move(x), hull); };
    return best_of_starts(pop, proj, 1, [&x0](int) { return x0; }, iters);
}

LocalSolveResult local_solve_balls(const POPInstance& pop, const BallPair& balls, int starts,
                                   std::uint64_t seed, int iters) {
    pop.validate();
    if (starts <= 0) throw std::invalid_argument("local solve: need at least one start");
    if (static_cast<int>(balls.center1.size()) != pop.n ||
        static_cast<int>(balls.center2.size()) != pop.n)
        throw std::invalid_argument("local solve: ball dimension mismatch");

    auto proj = [&balls](std::vector<double> x) {
        auto dist = [&x](const std::vector<double>& c) {
            double d2 = 0.0;
            for (size_t i = 0; i < x.size(); ++i) d2 += (x[i] - c[i]) * (x[i] - c[i]);
            return std::sqrt(d2);
        };
        const double d1 = dist(balls.center1), d2 = dist(balls.center2);
        const double out1 = std::max(d1 - balls.radius1, 0.0);
        const double out2 = std::max(d2 - balls.radius2, 0.0);
        const std::vector<double>& c = (out1 <= out2) ? balls.center1 : balls.center2;
        const double r = (out1 <= out2) ? balls.radius1 : balls.radius2;
        const double d = (out1 <= out2) ? d1 : d2;
        if (d <= r) return x;
        std::vector<double> y(x.size());
        for (size_t i = 0; i < x.size(); ++i) y[i] = c[i] + (x[i] - c[i]) * (r / d);
        return y;
    };

    double span = 0.0;
    for (int i = 0; i < pop.n; ++i) {
        const double d = balls.center1[i] - balls.center2[i];
        span += d * d;
    }
    const double radius = 0.5 * std::sqrt(span) + std::max(balls.radius1, balls.radius2);

    Xoshiro256 rng(seed);
    std::vector<std::vector<double>> points(starts);
    for (int s = 0; s < starts; ++s) {
        if (s == 0) points[s] = balls.center1;
        else if (s == 1 && starts > 1) points[s] = balls.center2;
        else {
            points[s].resize(pop.n);
            for (int i = 0; i < pop.n; ++i) {
                const double u = rng.uniform01();
                const double mid = 0.5 * (balls.center1[i] + balls.center2[i]);
                points[s][i] = mid + (2.0 * u - 1.0) * radius;
            }
        }
    }
    return best_of_starts(pop, proj, starts, [&points](int s) { return points[s]; }, iters);
}

MomentSequence uniform_box_moments(int n, int d) {
    MomentSequence y(n, 2 * d);
    for (int p = 0; p < y.basis().size(); ++p) {
        const MultiIndex& a = y.basis()[p];
        double v = 1.0;
        for (int e : a) v /= static_cast<double>(e + 1);
        y[p] = v;
    }
    return y;
}

}  // namespace cdkpop
