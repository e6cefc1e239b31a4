#include "core/multiindex.hpp"

#include <limits>

namespace cdkpop {

std::uint64_t basis_size(int n, int d) {
    if (n < 0 || d < 0) throw std::invalid_argument("basis_size: negative argument");
    // C(n+d, d) by iterative multiply/divide; dividing by i each step keeps
    // intermediates integral because the running product is C(n+i, i) * ...
    std::uint64_t r = 1;
    for (int i = 1; i <= d; ++i) {
        std::uint64_t num = static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(i);
        if (r > std::numeric_limits<std::uint64_t>::max() / num)
            throw std::overflow_error("basis_size: binomial overflows 64 bits");
        r = r * num / static_cast<std::uint64_t>(i);
    }
    return r;
}

namespace {
void gen_degree(int n, int deg, int var, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (var == n - 1) {
        cur[var] = deg;
        out.push_back(cur);
        cur[var] = 0;
        return;
    }
    for (int t = deg; t >= 0; --t) {
        cur[var] = t;
        gen_degree(n, deg - t, var + 1, cur, out);
    }
    cur[var] = 0;
}
}  // namespace

std::vector<MultiIndex> enumerate_basis(int n, int d) {
    std::vector<MultiIndex> out;
    out.reserve(basis_size(n, d));
    if (n == 0) {
        out.push_back({});
        return out;
    }
    MultiIndex cur(n, 0);
    for (int deg = 0; deg <= d; ++deg) gen_degree(n, deg, 0, cur, out);
    return out;
}

Basis::Basis(int n, int d) : n_(n), d_(d), mons_(enumerate_basis(n, d)) {
    pos_.reserve(mons_.size() * 2);
    for (int i = 0; i < static_cast<int>(mons_.size()); ++i) pos_[mons_[i]] = i;
}

std::string Basis::to_string(const MultiIndex& a) {
    std::string s = "(";
    for (size_t i = 0; i < a.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(a[i]);
    }
    return s + ")";
}

MultiIndex add_indices(const MultiIndex& a, const MultiIndex& b) {
    if (a.size() != b.size()) throw std::invalid_argument("add_indices: dimension mismatch");
    MultiIndex c(a.size());
    for (size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
    return c;
}

}  // namespace cdkpop
