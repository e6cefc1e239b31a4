#include "core/relax.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/jacobi.hpp"

namespace cdkpop {

int half_degree(const Polynomial& g) { return (g.degree() + 1) / 2; }

int POPInstance::d_min() const {
    int d = half_degree(objective);
    for (const auto& g : constraints) d = std::max(d, half_degree(g));
    return std::max(d, 1);
}

void POPInstance::validate() const {
    if (n <= 0) throw std::invalid_argument("pop: dimension must be positive");
    if (objective.n() != n) throw std::invalid_argument("pop: objective dimension mismatch");
    for (const auto& g : constraints)
        if (g.n() != n) throw std::invalid_argument("pop: constraint dimension mismatch");
    if (!eq_mask.empty() && eq_mask.size() != constraints.size())
        throw std::invalid_argument("pop: equality mask length mismatch");
}

LocalizingIndexer::LocalizingIndexer(const Polynomial& g, int n, int d)
    : g_(g), rows_(n, d - std::min(d, half_degree(g))) {
    if (d < half_degree(g))
        throw std::invalid_argument("localizing indexer: order too small for constraint degree");
}

std::vector<std::pair<MultiIndex, double>> LocalizingIndexer::entry(int i, int j) const {
    std::vector<std::pair<MultiIndex, double>> out;
    MultiIndex ab = add_indices(rows_[i], rows_[j]);
    out.reserve(g_.terms().size());
    for (const auto& [gamma, c] : g_.terms()) out.emplace_back(add_indices(ab, gamma), c);
    return out;
}

namespace {

// canonical home of each moment y_alpha inside the moment block: the first
// upper-triangle entry (i, j) in scan order whose row exponents sum to
// alpha; every alpha of degree <= 2d has one
struct CanonicalMap {
    Basis rows;                             // basis(n, d)
    Basis full;                             // basis(n, 2d)
    std::vector<std::pair<int, int>> home;  // per full index

    CanonicalMap(int n, int d) : rows(n, d), full(n, 2 * d), home(full.size(), {-1, -1}) {
        for (int i = 0; i < rows.size(); ++i)
            for (int j = i; j < rows.size(); ++j) {
                const int p = full.at(add_indices(rows[i], rows[j]));
                if (home[p].first < 0) home[p] = {i, j};
            }
    }
};

// accumulate "w * X(r, c)" into a coefficient list, using the half-weight
// convention that makes the solver's inner product contribute w * X(r, c)
void add_coef(std::vector<BlockEntry>& es, int blk, int r, int c, double w) {
    if (r > c) std::swap(r, c);
    const double v = (r == c) ? w : 0.5 * w;
    for (auto& e : es) {
        if (e.block == blk && e.row == r && e.col == c) {
            e.value += v;
            return;
        }
    }
    es.push_back({blk, r, c, v});
}

// inequality list with marked equalities doubled as opposite inequalities
std::vector<Polynomial> expand_constraints(const POPInstance& pop) {
    std::vector<Polynomial> gs;
    for (size_t j = 0; j < pop.constraints.size(); ++j) {
        gs.push_back(pop.constraints[j]);
        if (!pop.eq_mask.empty() && pop.eq_mask[j]) gs.push_back(pop.constraints[j].scaled(-1.0));
    }
    return gs;
}

}  // namespace

ConicProgram build_relaxation(const POPInstance& pop, int d) {
    pop.validate();
    if (d < pop.d_min())
        throw std::invalid_argument("relaxation order below the minimum for this problem");

    const CanonicalMap cm(pop.n, d);
    const auto gs = expand_constraints(pop);

    ConicProgram prog;
    prog.blocks.push_back(cm.rows.size());
    std::vector<LocalizingIndexer> loc;
    loc.reserve(gs.size());
    for (const auto& g : gs) {
        loc.emplace_back(g, pop.n, d);
        prog.blocks.push_back(loc.back().rows().size());
    }

    for (const auto& [alpha, c] : pop.objective.terms()) {
        auto [hi, hj] = cm.home[cm.full.at(alpha)];
        add_coef(prog.objective, 0, hi, hj, c);
    }

    // ties inside the moment block: each repeated occurrence of a moment
    // equals its canonical home
    for (int i = 0; i < cm.rows.size(); ++i)
        for (int j = i; j < cm.rows.size(); ++j) {
            auto [hi, hj] = cm.home[cm.full.at(add_indices(cm.rows[i], cm.rows[j]))];
            if (hi == i && hj == j) continue;
            LinearMap row;
            add_coef(row.entries, 0, i, j, 1.0);
            add_coef(row.entries, 0, hi, hj, -1.0);
            row.b = 0.0;
            prog.constraints.push_back(std::move(row));
        }

    // localizing blocks: every entry equals its weighted moment combination
    for (size_t l = 0; l < loc.size(); ++l) {
        const int blk = static_cast<int>(l) + 1;
        const int sl = loc[l].rows().size();
        for (int p = 0; p < sl; ++p)
            for (int q = p; q < sl; ++q) {
                LinearMap row;
                add_coef(row.entries, blk, p, q, 1.0);
                for (const auto& [alpha, c] : loc[l].entry(p, q)) {
                    auto [hi, hj] = cm.home[cm.full.at(alpha)];
                    add_coef(row.entries, 0, hi, hj, -c);
                }
                row.b = 0.0;
                prog.constraints.push_back(std::move(row));
            }
    }

    // normalization pinning the constant moment
    LinearMap norm;
    add_coef(norm.entries, 0, 0, 0, 1.0);
    norm.b = 1.0;
    prog.constraints.push_back(std::move(norm));

    return prog;
}

RelaxationResult solve_relaxation(const POPInstance& pop, int d, const SolverSettings& settings) {
    ConicProgram prog = build_relaxation(pop, d);
    ConicSolution sol = solve(prog, settings);

    const CanonicalMap cm(pop.n, d);
    RelaxationResult res;
    res.order = d;
    res.solver_status = sol.status;
    res.y = MomentSequence(pop.n, 2 * d);
    for (int p = 0; p < cm.full.size(); ++p) {
        auto [hi, hj] = cm.home[p];
        res.y[p] = sol.X[0](hi, hj);
    }
    res.bound = sol.objective;

    const int s0 = cm.rows.size();
    res.moment_matrix.resize(s0, s0);
    for (int i = 0; i < s0; ++i)
        for (int j = 0; j < s0; ++j)
            res.moment_matrix(i, j) = res.y[cm.full.at(add_indices(cm.rows[i], cm.rows[j]))];

    for (const auto& g : pop.constraints) {
        LocalizingIndexer li(g, pop.n, d);
        const int sl = li.rows().size();
        Eigen::MatrixXd L(sl, sl);
        for (int p = 0; p < sl; ++p)
            for (int q = 0; q < sl; ++q) {
                double v = 0.0;
                for (const auto& [alpha, c] : li.entry(p, q)) v += c * res.y[cm.full.at(alpha)];
                L(p, q) = v;
            }
        res.localizing.push_back(std::move(L));
    }

    res.conic = std::move(sol);
    return res;
}

FlatnessReport flatness_check(const RelaxationResult& result, int gap, double rank_tol,
                              RankTolMode mode) {
    const int n = result.y.n();
    const int d = result.order;
    FlatnessReport rep;
    rep.ranks.resize(d + 1, 0);
    for (int dp = 0; dp <= d; ++dp) {
        const int s = static_cast<int>(basis_size(n, dp));
        Eigen::MatrixXd sub = result.moment_matrix.topLeftCorner(s, s);
        Eigen::MatrixXd subT = sub.transpose();
        sub = 0.5 * (sub + subT);
        auto dec = spectral(sub);
        const double thresh =
            (mode == RankTolMode::Absolute)
                ? rank_tol
                : rank_tol * std::max(dec.eigenvalues.front(), 0.0);
        int r = 0;
        for (double e : dec.eigenvalues)
            if (e >= thresh) ++r;
        rep.ranks[dp] = r;
    }
    for (int dp = gap; dp <= d; ++dp) {
        if (rep.ranks[dp] == rep.ranks[dp - gap]) {
            rep.flat = true;
            rep.flat_order = dp;
            break;
        }
    }
    return rep;
}

std::optional<std::vector<double>> extract_rank1_minimizer(const POPInstance& pop,
                                                           const RelaxationResult& result,
                                                           double rank_tol, RankTolMode mode) {
    FlatnessReport rep = flatness_check(result, pop.d_min(), rank_tol, mode);
    if (!rep.flat || rep.ranks[result.order] != 1) return std::nullopt;

    std::vector<double> x(pop.n);
    for (int i = 0; i < pop.n; ++i) {
        MultiIndex e(pop.n, 0);
        e[i] = 1;
        x[i] = result.y.value(e);
    }
    for (const auto& g : pop.constraints)
        if (g.eval(x) < -1e-6) return std::nullopt;
    if (std::abs(pop.objective.eval(x) - result.bound) > 1e-4 * (1.0 + std::abs(result.bound)))
        return std::nullopt;
    return x;
}

}  // namespace cdkpop
