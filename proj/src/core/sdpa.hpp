#pragma once
#include <string>

#include "core/conic.hpp"

namespace cdkpop {

// Sparse SDPA ".dat-s" text form of a conic program, for cross-checking
// against external solvers. The emitted problem is the SDPA dual
//   max tr(F0 Y) s.t. tr(Fi Y) = c_i, Y >= 0
// with F0 = -C, Fi = A_i, c_i = b_i, so the SDPA objective is the negated
// optimum of this program. Programs with free scalars are not exportable.
std::string to_sdpa(const ConicProgram& prog);

}  // namespace cdkpop
