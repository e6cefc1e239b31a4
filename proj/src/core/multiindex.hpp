#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace cdkpop {

// Exponent vector of a monomial in n variables.
using MultiIndex = std::vector<int>;

inline int degree(const MultiIndex& a) {
    int d = 0;
    for (int e : a) d += e;
    return d;
}

// Graded order: total degree first; within a degree, higher leading exponents
// come first, so for n=2 the enumeration runs 1, x1, x2, x1^2, x1x2, x2^2.
struct GradedLex {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const {
        int da = degree(a), db = degree(b);
        if (da != db) return da < db;
        return a > b;  // lexicographically larger exponent vector first
    }
};

struct MultiIndexHash {
    size_t operator()(const MultiIndex& a) const {
        size_t h = 1469598103934665603ull;
        for (int e : a) {
            h ^= static_cast<size_t>(e) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};

// C(n+d, d) with overflow detection.
std::uint64_t basis_size(int n, int d);

// All exponent vectors of degree <= d in graded order, starting at the
// constant monomial.
std::vector<MultiIndex> enumerate_basis(int n, int d);

// Monomial basis with constant-time exponent -> position lookup.
class Basis {
  public:
    Basis(int n, int d);
    int n() const { return n_; }
    int max_degree() const { return d_; }
    int size() const { return static_cast<int>(mons_.size()); }
    const MultiIndex& operator[](int i) const { return mons_[i]; }
    const std::vector<MultiIndex>& monomials() const { return mons_; }
    // position of an exponent vector, or -1 if absent
    int find(const MultiIndex& a) const {
        auto it = pos_.find(a);
        return it == pos_.end() ? -1 : it->second;
    }
    int at(const MultiIndex& a) const {
        int p = find(a);
        if (p < 0) throw std::out_of_range("monomial outside basis: " + to_string(a));
        return p;
    }
    static std::string to_string(const MultiIndex& a);

  private:
    int n_, d_;
    std::vector<MultiIndex> mons_;
    std::unordered_map<MultiIndex, int, MultiIndexHash> pos_;
};

MultiIndex add_indices(const MultiIndex& a, const MultiIndex& b);

}  // namespace cdkpop
