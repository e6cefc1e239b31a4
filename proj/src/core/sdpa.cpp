#include "core/sdpa.hpp"

#include <sstream>
#include <stdexcept>

namespace cdkpop {

std::string to_sdpa(const ConicProgram& prog) {
    prog.validate();
    if (prog.n_free > 0)
        throw std::invalid_argument("sdpa export: free scalar variables are not representable");

    std::ostringstream os;
    os.precision(17);
    os << "* objective sign: SDPA optimum = -(minimum of the exported program)\n";
    os << prog.num_constraints() << "\n";
    os << prog.blocks.size() << "\n";
    for (size_t b = 0; b < prog.blocks.size(); ++b)
        os << prog.blocks[b] << (b + 1 < prog.blocks.size() ? " " : "\n");
    for (int i = 0; i < prog.num_constraints(); ++i)
        os << prog.constraints[i].b << (i + 1 < prog.num_constraints() ? " " : "\n");
    if (prog.num_constraints() == 0) os << "\n";

    auto emit = [&os](int matno, const BlockEntry& e, double sign) {
        if (e.value == 0.0) return;
        os << matno << " " << e.block + 1 << " " << e.row + 1 << " " << e.col + 1 << " "
           << sign * e.value << "\n";
    };
    for (const auto& e : prog.objective) emit(0, e, -1.0);
    for (int i = 0; i < prog.num_constraints(); ++i)
        for (const auto& e : prog.constraints[i].entries) emit(i + 1, e, 1.0);
    return os.str();
}

}  // namespace cdkpop
