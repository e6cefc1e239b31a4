#include "core/conic.hpp"

#include <stdexcept>

namespace cdkpop {

void ConicProgram::validate() const {
    for (int s : blocks)
        if (s <= 0) throw std::invalid_argument("conic program: block size must be positive");
    auto check_entry = [&](const BlockEntry& e, const char* where) {
        if (e.block < 0 || e.block >= static_cast<int>(blocks.size()))
            throw std::invalid_argument(std::string(where) + ": block index out of range");
        const int s = blocks[e.block];
        if (e.row < 0 || e.col < 0 || e.row >= s || e.col >= s)
            throw std::invalid_argument(std::string(where) + ": entry outside its block");
        if (e.row > e.col)
            throw std::invalid_argument(std::string(where) +
                                        ": entries must be upper-triangular (row <= col)");
        if (!std::isfinite(e.value))
            throw std::invalid_argument(std::string(where) + ": non-finite coefficient");
    };
    for (const auto& e : objective) check_entry(e, "objective");
    for (const auto& con : constraints) {
        for (const auto& e : con.entries) check_entry(e, "constraint");
        if (!con.free_coefs.empty() && static_cast<int>(con.free_coefs.size()) != n_free)
            throw std::invalid_argument("constraint: free-coefficient vector has wrong size");
        if (!std::isfinite(con.b))
            throw std::invalid_argument("constraint: non-finite right-hand side");
    }
    if (!free_objective.empty() && static_cast<int>(free_objective.size()) != n_free)
        throw std::invalid_argument("conic program: free objective has wrong size");
}

std::string to_string(SolverStatus s) {
    switch (s) {
        case SolverStatus::Optimal: return "Optimal";
        case SolverStatus::NearOptimal: return "NearOptimal";
        case SolverStatus::Infeasible: return "Infeasible";
        case SolverStatus::Unbounded: return "Unbounded";
        case SolverStatus::NumericalFailure: return "NumericalFailure";
    }
    return "NumericalFailure";
}

}  // namespace cdkpop
