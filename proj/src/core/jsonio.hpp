#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "core/heur.hpp"
#include "core/sparsity.hpp"

namespace cdkpop {

// JSON shapes used by the file formats and the C API:
//
//   polynomial  {"n": int, "terms": [{"alpha": [int, ...], "coef": number}]}
//   instance    {"n": int, "objective": polynomial,
//                "constraints": [polynomial, ...],
//                "eq_mask": [bool, ...]}            (eq_mask optional)
//   cliques     {"cliques": [[int, ...], ...],
//                "assignment": [int, ...]}          (assignment optional)
//
// Readers throw std::invalid_argument with a message naming the defect;
// malformed JSON text is reported the same way. Exponents and coefficients
// round-trip exactly. Non-finite numbers are written as null.

std::string polynomial_to_json(const Polynomial& f);
Polynomial polynomial_from_json(const std::string& text);

std::string pop_to_json(const POPInstance& pop);
POPInstance pop_from_json(const std::string& text);

// The objective split is never serialized; detect_cliques(pop, dec)
// recomputes it when a loaded decomposition is put to use.
std::string cliques_to_json(const CliqueDecomposition& dec);
CliqueDecomposition cliques_from_json(const std::string& text);

// Full run record: termination, bounds, thresholds, both gap conventions,
// constraint counts, and wall times, with one object per iteration.
// Write-only; traces are produced by the solvers, not loaded back.
std::string trace_to_json(const HeuristicTrace& trace);

// One row of an aggregate benchmark table.
struct RunSummary {
    std::uint64_t seed = 0;
    double initial_bound = std::numeric_limits<double>::quiet_NaN();
    double final_bound = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> upper_bound;
    std::optional<double> gap_before;  // percent, against the final upper bound
    std::optional<double> gap_after;
    int iterations = 0;
    double wall_time_ms = 0.0;
    Termination status = Termination::MaxIters;
    bool over_restricted = false;  // final bound strictly above the upper bound
};

RunSummary summarize_run(const HeuristicTrace& trace, std::uint64_t seed);

// "seed,f_d,f_tilde,ub,gap_before,gap_after,iterations,wall_time_ms,status,over_restricted"
std::string summary_csv_header();
// Missing optional fields become empty cells; booleans print as 0/1.
std::string summary_csv_row(const RunSummary& row);

}  // namespace cdkpop
