#include "core/sparsity.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cdkpop {
namespace {

std::vector<int> support(const MultiIndex& a) {
    std::vector<int> vars;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] > 0) vars.push_back(static_cast<int>(i));
    return vars;
}

std::vector<int> support(const Polynomial& g) {
    std::set<int> vars;
    for (const auto& [a, c] : g.terms())
        for (size_t i = 0; i < a.size(); ++i)
            if (a[i] > 0) vars.insert(static_cast<int>(i));
    return {vars.begin(), vars.end()};
}

// both sides sorted ascending
bool covers(const std::vector<int>& clique, const std::vector<int>& vars) {
    return std::includes(clique.begin(), clique.end(), vars.begin(), vars.end());
}

int first_covering(const std::vector<std::vector<int>>& cliques, const std::vector<int>& vars) {
    for (size_t l = 0; l < cliques.size(); ++l)
        if (covers(cliques[l], vars)) return static_cast<int>(l);
    return -1;
}

std::string join_vars(const std::vector<int>& vars) {
    std::string s;
    for (size_t k = 0; k < vars.size(); ++k) {
        if (k) s += ", ";
        s += "x" + std::to_string(vars[k]);
    }
    return s;
}

// fills a missing constraint assignment or objective split by the
// first-covering-group rule; existing fields are left untouched
void complete_decomposition(CliqueDecomposition& dec, const POPInstance& pop) {
    if (dec.constraint_assignment.empty() && !pop.constraints.empty()) {
        dec.constraint_assignment.reserve(pop.constraints.size());
        for (size_t j = 0; j < pop.constraints.size(); ++j) {
            const auto vars = support(pop.constraints[j]);
            const int l = first_covering(dec.cliques, vars);
            if (l < 0)
                throw std::invalid_argument("cliques: constraint " + std::to_string(j) +
                                            " fits no single group (variables " + join_vars(vars) +
                                            ")");
            dec.constraint_assignment.push_back(l);
        }
    }
    if (dec.objective_split.empty()) {
        dec.objective_split.assign(dec.cliques.size(), Polynomial(pop.n));
        for (const auto& [a, c] : pop.objective.terms()) {
            const int l = first_covering(dec.cliques, support(a));
            if (l < 0)
                throw std::invalid_argument("cliques: objective monomial " + Basis::to_string(a) +
                                            " is covered by no group");
            dec.objective_split[l].add_term(a, c);
        }
    }
}

MultiIndex lift_exponent(const MultiIndex& local, int n, const std::vector<int>& clique) {
    MultiIndex e(n, 0);
    for (size_t k = 0; k < clique.size(); ++k) e[clique[k]] = local[k];
    return e;
}

}  // namespace

void CliqueDecomposition::validate(int n) const {
    if (cliques.empty()) throw std::invalid_argument("cliques: decomposition is empty");
    std::vector<char> seen(n, 0);
    for (const auto& I : cliques) {
        if (I.empty()) throw std::invalid_argument("cliques: empty group");
        for (size_t k = 0; k < I.size(); ++k) {
            if (I[k] < 0 || I[k] >= n) throw std::invalid_argument("cliques: index out of range");
            if (k > 0 && I[k] <= I[k - 1])
                throw std::invalid_argument("cliques: group not strictly increasing");
            seen[I[k]] = 1;
        }
    }
    for (int i = 0; i < n; ++i)
        if (!seen[i])
            throw std::invalid_argument("cliques: variable x" + std::to_string(i) +
                                        " is covered by no group");
}

void CliqueDecomposition::validate(const POPInstance& pop) const {
    pop.validate();
    validate(pop.n);
    const int p = num_cliques();

    if (constraint_assignment.size() != pop.constraints.size())
        throw std::invalid_argument("cliques: one group assignment per constraint required");
    for (size_t j = 0; j < pop.constraints.size(); ++j) {
        const int l = constraint_assignment[j];
        if (l < 0 || l >= p)
            throw std::invalid_argument("cliques: assignment of constraint " + std::to_string(j) +
                                        " is out of range");
        const auto vars = support(pop.constraints[j]);
        if (!covers(cliques[l], vars))
            throw std::invalid_argument("cliques: constraint " + std::to_string(j) +
                                        " leaves its group (variables " + join_vars(vars) + ")");
    }

    if (static_cast<int>(objective_split.size()) != p)
        throw std::invalid_argument("cliques: one objective part per group required");
    Polynomial sum(pop.n);
    for (int l = 0; l < p; ++l) {
        if (objective_split[l].n() != pop.n)
            throw std::invalid_argument("cliques: objective part dimension mismatch");
        for (const auto& [a, c] : objective_split[l].terms())
            if (!covers(cliques[l], support(a)))
                throw std::invalid_argument("cliques: objective part " + std::to_string(l) +
                                            " holds monomial " + Basis::to_string(a) +
                                            " outside its group");
        sum += objective_split[l];
    }
    if (!(sum.terms() == pop.objective.terms())) {
        for (const auto& [a, c] : pop.objective.terms())
            if (sum.coef(a) != c)
                throw std::invalid_argument("cliques: objective parts disagree with the objective "
                                            "at monomial " +
                                            Basis::to_string(a));
        throw std::invalid_argument("cliques: objective parts carry monomials the objective lacks");
    }
}

Polynomial lift_clique_polynomial(const Polynomial& p, int n, const std::vector<int>& clique) {
    if (p.n() != static_cast<int>(clique.size()))
        throw std::invalid_argument("clique lift: polynomial dimension mismatch");
    Polynomial out(n);
    for (const auto& [a, c] : p.terms()) out.add_term(lift_exponent(a, n, clique), c);
    return out;
}

Polynomial restrict_to_clique(const Polynomial& g, const std::vector<int>& clique) {
    Polynomial out(static_cast<int>(clique.size()));
    for (const auto& [a, c] : g.terms()) {
        MultiIndex local(clique.size(), 0);
        int placed = 0;
        for (size_t k = 0; k < clique.size(); ++k) {
            local[k] = a[clique[k]];
            placed += a[clique[k]];
        }
        if (placed != degree(a))
            throw std::invalid_argument("clique restriction: monomial " + Basis::to_string(a) +
                                        " leaves the group");
        out.add_term(local, c);
    }
    return out;
}

CliqueDecomposition detect_cliques(const POPInstance& pop) {
    pop.validate();
    const int n = pop.n;

    // link graph: every pair inside one objective monomial, every pair
    // inside the variable set of a whole constraint (each constraint must
    // land in a single group)
    std::vector<std::set<int>> adj(n);
    auto link = [&](const std::vector<int>& vars) {
        for (size_t a = 0; a < vars.size(); ++a)
            for (size_t b = a + 1; b < vars.size(); ++b) {
                adj[vars[a]].insert(vars[b]);
                adj[vars[b]].insert(vars[a]);
            }
    };
    for (const auto& [a, c] : pop.objective.terms()) link(support(a));
    for (const auto& g : pop.constraints) link(support(g));

    // minimum-degree elimination; each eliminated vertex contributes the
    // candidate group {v} + live neighbors, and its neighbors are joined
    // pairwise so later candidates stay cliques of the filled-in graph
    std::vector<char> alive(n, 1);
    std::vector<std::vector<int>> candidates;
    for (int left = n; left > 0; --left) {
        int v = -1;
        for (int i = 0; i < n; ++i) {
            if (!alive[i]) continue;
            if (v < 0 || adj[i].size() < adj[v].size()) v = i;
        }
        std::vector<int> group(adj[v].begin(), adj[v].end());
        group.push_back(v);
        std::sort(group.begin(), group.end());
        candidates.push_back(std::move(group));

        const std::vector<int> nb(adj[v].begin(), adj[v].end());
        for (size_t a = 0; a < nb.size(); ++a)
            for (size_t b = a + 1; b < nb.size(); ++b) {
                adj[nb[a]].insert(nb[b]);
                adj[nb[b]].insert(nb[a]);
            }
        for (int w : nb) adj[w].erase(v);
        adj[v].clear();
        alive[v] = 0;
    }

    CliqueDecomposition dec;
    for (size_t a = 0; a < candidates.size(); ++a) {
        bool maximal = true;
        for (size_t b = 0; b < candidates.size() && maximal; ++b)
            if (b != a && covers(candidates[b], candidates[a]) &&
                (candidates[b].size() > candidates[a].size() || b < a))
                maximal = false;
        if (maximal) dec.cliques.push_back(candidates[a]);
    }
    std::sort(dec.cliques.begin(), dec.cliques.end());

    complete_decomposition(dec, pop);
    dec.validate(pop);
    return dec;
}

CliqueDecomposition detect_cliques(const POPInstance& pop, CliqueDecomposition declared) {
    pop.validate();
    declared.validate(pop.n);
    complete_decomposition(declared, pop);
    declared.validate(pop);
    return declared;
}

namespace {

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

// position of one pseudo-moment inside the block layout
struct MomentHome {
    int block;
    int row;
    int col;
};

// canonical home of every moment reachable from some group's moment block:
// the first (group, upper-triangle entry) in scan order that generates it
std::map<MultiIndex, MomentHome, GradedLex> pool_homes(const std::vector<Basis>& rows,
                                                       const CliqueDecomposition& dec, int n) {
    std::map<MultiIndex, MomentHome, GradedLex> home;
    for (int l = 0; l < dec.num_cliques(); ++l)
        for (int i = 0; i < rows[l].size(); ++i)
            for (int j = i; j < rows[l].size(); ++j) {
                MultiIndex amb =
                    lift_exponent(add_indices(rows[l][i], rows[l][j]), n, dec.cliques[l]);
                home.try_emplace(std::move(amb), MomentHome{l, i, j});
            }
    return home;
}

// inequality list with marked equalities doubled as opposite inequalities,
// carrying each copy's group along
std::pair<std::vector<Polynomial>, std::vector<int>> expand_constraints(
    const POPInstance& pop, const CliqueDecomposition& dec) {
    std::vector<Polynomial> gs;
    std::vector<int> owner;
    for (size_t j = 0; j < pop.constraints.size(); ++j) {
        gs.push_back(pop.constraints[j]);
        owner.push_back(dec.constraint_assignment[j]);
        if (!pop.eq_mask.empty() && pop.eq_mask[j]) {
            gs.push_back(pop.constraints[j].scaled(-1.0));
            owner.push_back(dec.constraint_assignment[j]);
        }
    }
    return {std::move(gs), std::move(owner)};
}

}  // namespace

ConicProgram build_sparse_relaxation(const POPInstance& pop, const CliqueDecomposition& dec,
                                     int d) {
    dec.validate(pop);
    if (d < pop.d_min())
        throw std::invalid_argument("relaxation order below the minimum for this problem");

    const int n = pop.n;
    const int p = dec.num_cliques();
    std::vector<Basis> rows;
    rows.reserve(p);
    for (const auto& I : dec.cliques) rows.emplace_back(static_cast<int>(I.size()), d);

    const auto home = pool_homes(rows, dec, n);
    auto home_at = [&](const MultiIndex& amb) -> const MomentHome& {
        auto it = home.find(amb);
        if (it == home.end())
            throw std::out_of_range("moment outside the group-supported pool: " +
                                    Basis::to_string(amb));
        return it->second;
    };

    const auto [gs, owner] = expand_constraints(pop, dec);

    ConicProgram prog;
    for (int l = 0; l < p; ++l) prog.blocks.push_back(rows[l].size());
    std::vector<LocalizingIndexer> loc;
    loc.reserve(gs.size());
    for (size_t j = 0; j < gs.size(); ++j) {
        loc.emplace_back(restrict_to_clique(gs[j], dec.cliques[owner[j]]),
                         static_cast<int>(dec.cliques[owner[j]].size()), d);
        prog.blocks.push_back(loc.back().rows().size());
    }

    for (const auto& [alpha, c] : pop.objective.terms()) {
        const MomentHome& h = home_at(alpha);
        add_coef(prog.objective, h.block, h.row, h.col, c);
    }

    // ties inside and across the moment blocks: each repeated occurrence of
    // a moment equals its canonical home; the constant moment is exempt
    // because every group pins it through its own normalization row
    for (int l = 0; l < p; ++l)
        for (int i = 0; i < rows[l].size(); ++i)
            for (int j = i; j < rows[l].size(); ++j) {
                MultiIndex amb =
                    lift_exponent(add_indices(rows[l][i], rows[l][j]), n, dec.cliques[l]);
                if (degree(amb) == 0) continue;
                const MomentHome& h = home_at(amb);
                if (h.block == l && h.row == i && h.col == j) continue;
                LinearMap row;
                add_coef(row.entries, l, i, j, 1.0);
                add_coef(row.entries, h.block, h.row, h.col, -1.0);
                row.b = 0.0;
                prog.constraints.push_back(std::move(row));
            }

    // localizing blocks over the owning group's variables: every entry
    // equals its weighted moment combination
    for (size_t lj = 0; lj < loc.size(); ++lj) {
        const int blk = p + static_cast<int>(lj);
        const auto& I = dec.cliques[owner[lj]];
        const int sl = loc[lj].rows().size();
        for (int q = 0; q < sl; ++q)
            for (int r = q; r < sl; ++r) {
                LinearMap row;
                add_coef(row.entries, blk, q, r, 1.0);
                for (const auto& [alpha, c] : loc[lj].entry(q, r)) {
                    const MomentHome& h = home_at(lift_exponent(alpha, n, I));
                    add_coef(row.entries, h.block, h.row, h.col, -c);
                }
                row.b = 0.0;
                prog.constraints.push_back(std::move(row));
            }
    }

    // one normalization per group pinning its constant moment
    for (int l = 0; l < p; ++l) {
        LinearMap norm;
        add_coef(norm.entries, l, 0, 0, 1.0);
        norm.b = 1.0;
        prog.constraints.push_back(std::move(norm));
    }

    return prog;
}

SparseRelaxationResult solve_sparse_relaxation(const POPInstance& pop,
                                               const CliqueDecomposition& dec, int d,
                                               const SolverSettings& settings) {
    ConicProgram prog = build_sparse_relaxation(pop, dec, d);
    ConicSolution sol = solve(prog, settings);

    SparseRelaxationResult res;
    res.order = d;
    res.solver_status = sol.status;
    res.bound = sol.objective;

    for (int l = 0; l < dec.num_cliques(); ++l) {
        const int nl = static_cast<int>(dec.cliques[l].size());
        const Basis lrows(nl, d);
        const Basis lfull(nl, 2 * d);
        std::vector<std::pair<int, int>> lhome(lfull.size(), {-1, -1});
        for (int i = 0; i < lrows.size(); ++i)
            for (int j = i; j < lrows.size(); ++j) {
                const int pos = lfull.at(add_indices(lrows[i], lrows[j]));
                if (lhome[pos].first < 0) lhome[pos] = {i, j};
            }

        MomentSequence yl(nl, 2 * d);
        for (int q = 0; q < lfull.size(); ++q) yl[q] = sol.X[l](lhome[q].first, lhome[q].second);

        Eigen::MatrixXd M(lrows.size(), lrows.size());
        for (int i = 0; i < lrows.size(); ++i)
            for (int j = 0; j < lrows.size(); ++j)
                M(i, j) = yl[lfull.at(add_indices(lrows[i], lrows[j]))];

        res.clique_moments.push_back(std::move(yl));
        res.moment_matrices.push_back(std::move(M));
    }

    res.conic = std::move(sol);
    return res;
}

}  // namespace cdkpop
