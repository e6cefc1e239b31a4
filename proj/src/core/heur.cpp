#include "core/heur.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cdkpop {
namespace {

bool solved(SolverStatus s) {
    return s == SolverStatus::Optimal || s == SolverStatus::NearOptimal;
}

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<double> degree_one_moments(const MomentSequence& y) {
    std::vector<double> x(y.n());
    for (int i = 0; i < y.n(); ++i) {
        MultiIndex e(y.n(), 0);
        e[i] = 1;
        x[i] = y.value(e);
    }
    return x;
}

// raise a univariate polynomial to n variables living on coordinate i
Polynomial lift_univariate(const Polynomial& p, int n, int i) {
    Polynomial out(n);
    for (const auto& [a, c] : p.terms()) {
        MultiIndex e(n, 0);
        e[i] = a[0];
        out.add_term(e, c);
    }
    return out;
}

void append_constraint(POPInstance& pop, const Polynomial& g) {
    pop.constraints.push_back(g);
    if (!pop.eq_mask.empty()) pop.eq_mask.push_back(false);
}

void append_cut(POPInstance& pop, CliqueDecomposition& dec, const Polynomial& g, int clique) {
    append_constraint(pop, g);
    dec.constraint_assignment.push_back(clique);
}

// global degree-one point assembled group by group; a shared coordinate is
// read from the first group holding it
std::vector<double> clique_degree_one_point(const std::vector<MomentSequence>& ys,
                                            const CliqueDecomposition& dec, int n) {
    std::vector<double> x(n, 0.0);
    std::vector<char> got(n, 0);
    for (int l = 0; l < dec.num_cliques(); ++l) {
        const auto& I = dec.cliques[l];
        for (size_t k = 0; k < I.size(); ++k) {
            if (got[I[k]]) continue;
            MultiIndex e(I.size(), 0);
            e[k] = 1;
            x[I[k]] = ys[l].value(e);
            got[I[k]] = 1;
        }
    }
    return x;
}

// Rescale an inequality to unit sup-norm coefficients. The feasible set is
// unchanged; the spectral cuts carry weights up to 1/beta, which would
// otherwise dominate the row scaling of the assembled program.
Polynomial normalized_cut(const Polynomial& g) {
    double scale = 0.0;
    for (const auto& [a, c] : g.terms()) scale = std::max(scale, std::abs(c));
    return scale > 0.0 ? g.scaled(1.0 / scale) : g;
}

void record_gap(IterationRecord& rec, const std::optional<double>& ub, double bound) {
    rec.upper_bound = ub;
    if (ub) {
        rec.gap_percent = relative_gap(*ub, bound);
        rec.gap_percent_alt = relative_gap_vs_lower(*ub, bound);
    }
}

}  // namespace

double relative_gap(double upper, double lower) {
    double diff = std::abs(upper - lower);
    return upper != 0.0 ? diff / std::abs(upper) * 100.0 : diff * 100.0;
}

double relative_gap_vs_lower(double upper, double lower) {
    double diff = std::abs(upper - lower);
    return lower != 0.0 ? diff / std::abs(lower) * 100.0 : diff * 100.0;
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::GapMet: return "GapMet";
        case Termination::UpperBoundCrossed: return "UpperBoundCrossed";
        case Termination::MaxIters: return "MaxIters";
        case Termination::SolverFailure: return "SolverFailure";
    }
    return "Unknown";
}

void H1Settings::validate(const POPInstance& pop) const {
    pop.validate();
    if (d < pop.d_min()) throw std::invalid_argument("relaxation order below the admissible minimum");
    if (d_c < 0 || d_c > d) throw std::invalid_argument("model order must be 0 (meaning d) or lie in [1, d]");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("penalization factor must lie in (0, 1)");
    if (delta < 0.0) throw std::invalid_argument("gap tolerance must be nonnegative");
    if (max_iters < 0) throw std::invalid_argument("iteration budget must be nonnegative");
    if (beta <= 0.0) throw std::invalid_argument("regularization must be positive");
    if (kernel_tol <= 0.0) throw std::invalid_argument("kernel tolerance must be positive");
}

void H2Settings::validate(const POPInstance& pop) const {
    pop.validate();
    if (d < pop.d_min()) throw std::invalid_argument("relaxation order below the admissible minimum");
    if (tau <= 1.0) throw std::invalid_argument("acceptance threshold must exceed 1");
    if (beta <= 0.0) throw std::invalid_argument("regularization must be positive");
    if (kernel_tol <= 0.0) throw std::invalid_argument("kernel tolerance must be positive");
}

LocalDriver hull_local_driver(const POPInstance& pop, int starts, std::uint64_t seed) {
    LocalDriver driver;
    driver.initial = [pop, starts, seed]() -> std::optional<LocalSolveResult> {
        try {
            return local_solve(pop, starts, seed);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    };
    driver.refine = [pop](const std::vector<double>& hint) -> std::optional<LocalSolveResult> {
        try {
            LocalSolveResult r = local_refine(pop, hint);
            if (!std::isfinite(r.value)) return std::nullopt;
            return r;
        } catch (const std::exception&) {
            return std::nullopt;
        }
    };
    return driver;
}

HeuristicTrace run_h1(const POPInstance& pop, const H1Settings& settings,
                      const LocalDriver& local, const SolverSettings& solver) {
    settings.validate(pop);
    const int dc = settings.model_order();
    const Clock::time_point run0 = Clock::now();

    HeuristicTrace trace;
    POPInstance work = pop;

    std::optional<double> ub;
    if (local.initial) {
        if (auto r = local.initial()) ub = r->value;
    }

    for (int k = 0; k <= settings.max_iters; ++k) {
        const Clock::time_point it0 = Clock::now();
        RelaxationResult res = solve_relaxation(work, settings.d, solver);

        IterationRecord rec;
        rec.k = k;
        rec.bound = res.bound;
        rec.solver_status = res.solver_status;

        if (!solved(res.solver_status)) {
            record_gap(rec, ub, res.bound);
            rec.wall_time_ms = ms_since(it0);
        trace.iterations.push_back(std::move(rec));
            trace.termination = Termination::SolverFailure;
            break;
        }

        // shrink the upper bound through the polished degree-one moments
        if (local.refine) {
            if (auto r = local.refine(degree_one_moments(res.y))) {
                ub = ub ? std::min(*ub, r->value) : r->value;
            }
        }
        record_gap(rec, ub, res.bound);
        trace.final_bound = res.bound;

        // a hair of solver noise above an exact upper bound is not a
        // genuine crossing; the gap test below absorbs it
        if (ub && res.bound > *ub + 1e-6 * (1.0 + std::abs(*ub))) {
            rec.wall_time_ms = ms_since(it0);
        trace.iterations.push_back(std::move(rec));
            trace.termination = Termination::UpperBoundCrossed;
            break;
        }
        if (ub && *rec.gap_percent <= settings.delta * 100.0) {
            rec.wall_time_ms = ms_since(it0);
        trace.iterations.push_back(std::move(rec));
            trace.termination = Termination::GapMet;
            break;
        }
        if (k == settings.max_iters) {
            rec.wall_time_ms = ms_since(it0);
        trace.iterations.push_back(std::move(rec));
            trace.termination = Termination::MaxIters;
            break;
        }

        ChristoffelModel model = build_christoffel(res.y, dc, settings.beta, settings.kernel_tol);
        double gamma = christoffel_mass(model);
        SublevelConstraints sub = sublevel_constraints(model, (1.0 - settings.epsilon) * gamma);
        append_constraint(work, normalized_cut(sub.range_constraint));
        for (const Polynomial& g : sub.kernel_constraints)
            append_constraint(work, normalized_cut(g));

        rec.gammas = {gamma};
        rec.kernel_constraints = static_cast<int>(sub.kernel_constraints.size());
        rec.constraints_added = 1 + rec.kernel_constraints;
        rec.wall_time_ms = ms_since(it0);
        trace.iterations.push_back(std::move(rec));
    }

    trace.upper_bound = ub;
    trace.wall_time_ms = ms_since(run0);
    return trace;
}

HeuristicTrace run_h2(const POPInstance& pop, const H2Settings& settings,
                      const std::vector<double>& local_point, const SolverSettings& solver) {
    settings.validate(pop);
    if (static_cast<int>(local_point.size()) != pop.n)
        throw std::invalid_argument("local point dimension mismatch");
    const Clock::time_point it0 = Clock::now();

    HeuristicTrace trace;
    RelaxationResult base = solve_relaxation(pop, settings.d, solver);

    IterationRecord rec;
    rec.k = 0;
    rec.bound = base.bound;
    rec.solver_status = base.solver_status;

    if (!solved(base.solver_status)) {
        rec.wall_time_ms = ms_since(it0);
        trace.iterations.push_back(std::move(rec));
        trace.termination = Termination::SolverFailure;
        trace.wall_time_ms = ms_since(it0);
        return trace;
    }
    trace.final_bound = base.bound;

    POPInstance work = pop;
    for (int i = 0; i < pop.n; ++i) {
        ChristoffelModel marginal =
            marginal_christoffel(base.y, i, settings.beta, settings.kernel_tol);
        double gamma_i = christoffel_eval(marginal, {local_point[i]});
        rec.gammas.push_back(gamma_i);
        if (gamma_i > settings.tau) continue;

        trace.coordinates_added.push_back(i);
        SublevelConstraints sub = sublevel_constraints(marginal, gamma_i);
        append_constraint(work, normalized_cut(lift_univariate(sub.range_constraint, pop.n, i)));
        for (const Polynomial& g : sub.kernel_constraints)
            append_constraint(work, normalized_cut(lift_univariate(g, pop.n, i)));
        rec.constraints_added += 1 + static_cast<int>(sub.kernel_constraints.size());
        rec.kernel_constraints += static_cast<int>(sub.kernel_constraints.size());
    }

    rec.wall_time_ms = ms_since(it0);
    trace.iterations.push_back(std::move(rec));

    if (trace.coordinates_added.empty()) {
        trace.no_constraints_added = true;
        trace.termination = Termination::MaxIters;
        trace.wall_time_ms = ms_since(it0);
        return trace;
    }

    const Clock::time_point it1 = Clock::now();
    RelaxationResult strengthened = solve_relaxation(work, settings.d, solver);
    IterationRecord rec1;
    rec1.k = 1;
    rec1.bound = strengthened.bound;
    rec1.solver_status = strengthened.solver_status;
    rec1.wall_time_ms = ms_since(it1);
    trace.iterations.push_back(std::move(rec1));

    if (!solved(strengthened.solver_status)) {
        trace.termination = Termination::SolverFailure;
        trace.wall_time_ms = ms_since(it0);
        return trace;
    }
    trace.final_bound = strengthened.bound;
    trace.termination = Termination::MaxIters;
    trace.wall_time_ms = ms_since(it0);
    return trace;
}

HeuristicTrace run_h1cs(const POPInstance& pop, const CliqueDecomposition& cliques,
                        const H1Settings& settings, const LocalDriver& local,
                        const SolverSettings& solver) {
    settings.validate(pop);
    const int dc = settings.model_order();
    const Clock::time_point run0 = Clock::now();

    HeuristicTrace trace;
    POPInstance work = pop;
    CliqueDecomposition wdec = detect_cliques(pop, cliques);

    std::optional<double> ub;
    if (local.initial) {
        if (auto r = local.initial()) ub = r->value;
    }

    for (int k = 0; k <= settings.max_iters; ++k) {
        const Clock::time_point it0 = Clock::now();
        SparseRelaxationResult res = solve_sparse_relaxation(work, wdec, settings.d, solver);

        IterationRecord rec;
        rec.k = k;
        rec.bound = res.bound;
        rec.solver_status = res.solver_status;

        if (!solved(res.solver_status)) {
            record_gap(rec, ub, res.bound);
            rec.wall_time_ms = ms_since(it0);
        trace.iterations.push_back(std::move(rec));
            trace.termination = Termination::SolverFailure;
            break;
        }

        if (local.refine) {
            if (auto r = local.refine(clique_degree_one_point(res.clique_moments, wdec, pop.n))) {
                ub = ub ? std::min(*ub, r->value) : r->value;
            }
        }
        record_gap(rec, ub, res.bound);
        trace.final_bound = res.bound;

        // a hair of solver noise above an exact upper bound is not a
        // genuine crossing; the gap test below absorbs it
        if (ub && res.bound > *ub + 1e-6 * (1.0 + std::abs(*ub))) {
            rec.wall_time_ms = ms_since(it0);
        trace.iterations.push_back(std::move(rec));
            trace.termination = Termination::UpperBoundCrossed;
            break;
        }
        if (ub && *rec.gap_percent <= settings.delta * 100.0) {
            rec.wall_time_ms = ms_since(it0);
        trace.iterations.push_back(std::move(rec));
            trace.termination = Termination::GapMet;
            break;
        }
        if (k == settings.max_iters) {
            rec.wall_time_ms = ms_since(it0);
        trace.iterations.push_back(std::move(rec));
            trace.termination = Termination::MaxIters;
            break;
        }

        for (int l = 0; l < wdec.num_cliques(); ++l) {
            ChristoffelModel model =
                build_christoffel(res.clique_moments[l], dc, settings.beta, settings.kernel_tol);
            double gamma = christoffel_mass(model);
            SublevelConstraints sub = sublevel_constraints(model, (1.0 - settings.epsilon) * gamma);
            append_cut(work, wdec,
                       normalized_cut(lift_clique_polynomial(sub.range_constraint, pop.n,
                                                             wdec.cliques[l])),
                       l);
            for (const Polynomial& g : sub.kernel_constraints)
                append_cut(work, wdec,
                           normalized_cut(lift_clique_polynomial(g, pop.n, wdec.cliques[l])), l);

            rec.gammas.push_back(gamma);
            rec.kernel_constraints += static_cast<int>(sub.kernel_constraints.size());
            rec.constraints_added += 1 + static_cast<int>(sub.kernel_constraints.size());
        }
        rec.wall_time_ms = ms_since(it0);
        trace.iterations.push_back(std::move(rec));
    }

    trace.upper_bound = ub;
    trace.wall_time_ms = ms_since(run0);
    return trace;
}

HeuristicTrace run_h2cs(const POPInstance& pop, const CliqueDecomposition& cliques,
                        const H2Settings& settings, const std::vector<double>& local_point,
                        const SolverSettings& solver) {
    settings.validate(pop);
    if (static_cast<int>(local_point.size()) != pop.n)
        throw std::invalid_argument("local point dimension mismatch");
    const CliqueDecomposition base_dec = detect_cliques(pop, cliques);
    const Clock::time_point it0 = Clock::now();

    HeuristicTrace trace;
    SparseRelaxationResult base = solve_sparse_relaxation(pop, base_dec, settings.d, solver);

    IterationRecord rec;
    rec.k = 0;
    rec.bound = base.bound;
    rec.solver_status = base.solver_status;

    if (!solved(base.solver_status)) {
        rec.wall_time_ms = ms_since(it0);
        trace.iterations.push_back(std::move(rec));
        trace.termination = Termination::SolverFailure;
        trace.wall_time_ms = ms_since(it0);
        return trace;
    }
    trace.final_bound = base.bound;

    POPInstance work = pop;
    CliqueDecomposition wdec = base_dec;
    for (int l = 0; l < base_dec.num_cliques(); ++l) {
        const auto& I = base_dec.cliques[l];
        for (size_t k = 0; k < I.size(); ++k) {
            const int i = I[k];
            ChristoffelModel marginal = marginal_christoffel(base.clique_moments[l],
                                                             static_cast<int>(k), settings.beta,
                                                             settings.kernel_tol);
            double gamma_i = christoffel_eval(marginal, {local_point[i]});
            rec.gammas.push_back(gamma_i);
            if (gamma_i > settings.tau) continue;

            trace.coordinates_added.push_back(i);
            SublevelConstraints sub = sublevel_constraints(marginal, gamma_i);
            append_cut(work, wdec,
                       normalized_cut(lift_univariate(sub.range_constraint, pop.n, i)), l);
            for (const Polynomial& g : sub.kernel_constraints)
                append_cut(work, wdec, normalized_cut(lift_univariate(g, pop.n, i)), l);
            rec.constraints_added += 1 + static_cast<int>(sub.kernel_constraints.size());
            rec.kernel_constraints += static_cast<int>(sub.kernel_constraints.size());
        }
    }

    rec.wall_time_ms = ms_since(it0);
    trace.iterations.push_back(std::move(rec));

    if (trace.coordinates_added.empty()) {
        trace.no_constraints_added = true;
        trace.termination = Termination::MaxIters;
        trace.wall_time_ms = ms_since(it0);
        return trace;
    }

    const Clock::time_point it1 = Clock::now();
    SparseRelaxationResult strengthened = solve_sparse_relaxation(work, wdec, settings.d, solver);
    IterationRecord rec1;
    rec1.k = 1;
    rec1.bound = strengthened.bound;
    rec1.solver_status = strengthened.solver_status;
    rec1.wall_time_ms = ms_since(it1);
    trace.iterations.push_back(std::move(rec1));

    if (!solved(strengthened.solver_status)) {
        trace.termination = Termination::SolverFailure;
        trace.wall_time_ms = ms_since(it0);
        return trace;
    }
    trace.final_bound = strengthened.bound;
    trace.termination = Termination::MaxIters;
    trace.wall_time_ms = ms_since(it0);
    return trace;
}

}  // namespace cdkpop
