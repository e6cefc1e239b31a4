#include "core/jsonio.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace cdkpop {
namespace {

using nlohmann::json;

json finite_or_null(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

json optional_or_null(const std::optional<double>& v) {
    if (!v) return nullptr;
    return finite_or_null(*v);
}

const json& field(const json& j, const char* key, const char* where) {
    if (!j.is_object())
        throw std::invalid_argument(std::string(where) + ": expected an object");
    auto it = j.find(key);
    if (it == j.end())
        throw std::invalid_argument(std::string(where) + ": missing field \"" + key + "\"");
    return *it;
}

int as_int(const json& j, const char* what) {
    if (!j.is_number_integer())
        throw std::invalid_argument(std::string(what) + ": expected an integer");
    return j.get<int>();
}

double as_number(const json& j, const char* what) {
    if (!j.is_number())
        throw std::invalid_argument(std::string(what) + ": expected a number");
    return j.get<double>();
}

json polynomial_to_value(const Polynomial& f) {
    json terms = json::array();
    for (const auto& [alpha, coef] : f.terms()) {
        json term;
        term["alpha"] = alpha;
        term["coef"] = finite_or_null(coef);
        terms.push_back(std::move(term));
    }
    return json{{"n", f.n()}, {"terms", std::move(terms)}};
}

Polynomial polynomial_from_value(const json& j, const char* where) {
    const int n = as_int(field(j, "n", where), where);
    if (n < 0)
        throw std::invalid_argument(std::string(where) + ": dimension must be nonnegative");
    const json& terms = field(j, "terms", where);
    if (!terms.is_array())
        throw std::invalid_argument(std::string(where) + ": \"terms\" must be an array");

    Polynomial f(n);
    for (const json& term : terms) {
        const json& alpha = field(term, "alpha", where);
        if (!alpha.is_array() || static_cast<int>(alpha.size()) != n)
            throw std::invalid_argument(std::string(where) +
                                        ": exponent length disagrees with the dimension");
        MultiIndex a(n, 0);
        for (int i = 0; i < n; ++i) {
            a[i] = as_int(alpha[i], where);
            if (a[i] < 0)
                throw std::invalid_argument(std::string(where) + ": negative exponent");
        }
        f.add_term(a, as_number(field(term, "coef", where), where));
    }
    return f;
}

// Uniform wrapper so syntax errors from the parser surface with the same
// exception type and context prefix as structural defects.
template <typename Fn>
auto guarded(const std::string& text, const char* where, Fn&& fn)
    -> decltype(fn(std::declval<const json&>())) {
    try {
        const json j = json::parse(text);
        return fn(j);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string(where) + ": " + e.what());
    }
}

}  // namespace

std::string polynomial_to_json(const Polynomial& f) {
    return polynomial_to_value(f).dump(2);
}

Polynomial polynomial_from_json(const std::string& text) {
    return guarded(text, "polynomial",
                   [](const json& j) { return polynomial_from_value(j, "polynomial"); });
}

std::string pop_to_json(const POPInstance& pop) {
    json j;
    j["n"] = pop.n;
    j["objective"] = polynomial_to_value(pop.objective);
    json cons = json::array();
    for (const auto& g : pop.constraints) cons.push_back(polynomial_to_value(g));
    j["constraints"] = std::move(cons);
    if (!pop.eq_mask.empty()) j["eq_mask"] = pop.eq_mask;
    return j.dump(2);
}

POPInstance pop_from_json(const std::string& text) {
    return guarded(text, "instance", [](const json& j) {
        POPInstance pop;
        pop.n = as_int(field(j, "n", "instance"), "instance");
        pop.objective = polynomial_from_value(field(j, "objective", "instance"), "objective");
        const json& cons = field(j, "constraints", "instance");
        if (!cons.is_array())
            throw std::invalid_argument("instance: \"constraints\" must be an array");
        for (const json& g : cons)
            pop.constraints.push_back(polynomial_from_value(g, "constraint"));
        if (j.contains("eq_mask")) {
            const json& mask = j.at("eq_mask");
            if (!mask.is_array())
                throw std::invalid_argument("instance: \"eq_mask\" must be an array");
            for (const json& b : mask) {
                if (!b.is_boolean())
                    throw std::invalid_argument("instance: \"eq_mask\" must hold booleans");
                pop.eq_mask.push_back(b.get<bool>());
            }
        }
        pop.validate();
        return pop;
    });
}

std::string cliques_to_json(const CliqueDecomposition& dec) {
    json j;
    j["cliques"] = dec.cliques;
    if (!dec.constraint_assignment.empty()) j["assignment"] = dec.constraint_assignment;
    return j.dump(2);
}

CliqueDecomposition cliques_from_json(const std::string& text) {
    return guarded(text, "cliques", [](const json& j) {
        CliqueDecomposition dec;
        const json& cliques = field(j, "cliques", "cliques");
        if (!cliques.is_array())
            throw std::invalid_argument("cliques: \"cliques\" must be an array");
        for (const json& group : cliques) {
            if (!group.is_array())
                throw std::invalid_argument("cliques: each group must be an array");
            std::vector<int> vars;
            for (const json& v : group) {
                vars.push_back(as_int(v, "cliques"));
                if (vars.back() < 0)
                    throw std::invalid_argument("cliques: negative variable index");
            }
            dec.cliques.push_back(std::move(vars));
        }
        if (j.contains("assignment")) {
            const json& assignment = j.at("assignment");
            if (!assignment.is_array())
                throw std::invalid_argument("cliques: \"assignment\" must be an array");
            for (const json& a : assignment) {
                const int group = as_int(a, "cliques");
                if (group < 0 || group >= static_cast<int>(dec.cliques.size()))
                    throw std::invalid_argument("cliques: assignment index out of range");
                dec.constraint_assignment.push_back(group);
            }
        }
        return dec;
    });
}

std::string trace_to_json(const HeuristicTrace& trace) {
    json j;
    j["final_bound"] = finite_or_null(trace.final_bound);
    j["termination"] = to_string(trace.termination);
    j["upper_bound"] = optional_or_null(trace.upper_bound);
    j["no_constraints_added"] = trace.no_constraints_added;
    j["coordinates_added"] = trace.coordinates_added;
    j["wall_time_ms"] = trace.wall_time_ms;

    json iters = json::array();
    for (const IterationRecord& rec : trace.iterations) {
        json r;
        r["k"] = rec.k;
        r["bound"] = finite_or_null(rec.bound);
        r["solver_status"] = to_string(rec.solver_status);
        json gammas = json::array();
        for (double g : rec.gammas) gammas.push_back(finite_or_null(g));
        r["gammas"] = std::move(gammas);
        r["constraints_added"] = rec.constraints_added;
        r["kernel_constraints"] = rec.kernel_constraints;
        r["upper_bound"] = optional_or_null(rec.upper_bound);
        r["gap_percent"] = optional_or_null(rec.gap_percent);
        r["gap_percent_vs_lower"] = optional_or_null(rec.gap_percent_alt);
        r["wall_time_ms"] = rec.wall_time_ms;
        iters.push_back(std::move(r));
    }
    j["iterations"] = std::move(iters);
    return j.dump(2);
}

RunSummary summarize_run(const HeuristicTrace& trace, std::uint64_t seed) {
    RunSummary row;
    row.seed = seed;
    row.iterations = static_cast<int>(trace.iterations.size());
    row.wall_time_ms = trace.wall_time_ms;
    row.status = trace.termination;
    if (!trace.iterations.empty()) row.initial_bound = trace.iterations.front().bound;
    row.final_bound = trace.final_bound;
    row.upper_bound = trace.upper_bound;
    if (trace.upper_bound) {
        // Both gaps reference the final upper bound so the before/after pair
        // measures only the movement of the lower bound.
        if (std::isfinite(row.initial_bound))
            row.gap_before = relative_gap(*trace.upper_bound, row.initial_bound);
        if (std::isfinite(row.final_bound))
            row.gap_after = relative_gap(*trace.upper_bound, row.final_bound);
        row.over_restricted =
            std::isfinite(row.final_bound) && row.final_bound > *trace.upper_bound;
    }
    return row;
}

std::string summary_csv_header() {
    return "seed,f_d,f_tilde,ub,gap_before,gap_after,iterations,wall_time_ms,status,"
           "over_restricted";
}

namespace {

std::string csv_number(double v) {
    if (!std::isfinite(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string csv_optional(const std::optional<double>& v) {
    return v ? csv_number(*v) : std::string();
}

}  // namespace

std::string summary_csv_row(const RunSummary& row) {
    std::string out;
    out += std::to_string(row.seed);
    out += ',';
    out += csv_number(row.initial_bound);
    out += ',';
    out += csv_number(row.final_bound);
    out += ',';
    out += csv_optional(row.upper_bound);
    out += ',';
    out += csv_optional(row.gap_before);
    out += ',';
    out += csv_optional(row.gap_after);
    out += ',';
    out += std::to_string(row.iterations);
    out += ',';
    out += csv_number(row.wall_time_ms);
    out += ',';
    out += to_string(row.status);
    out += ',';
    out += row.over_restricted ? '1' : '0';
    return out;
}

}  // namespace cdkpop
