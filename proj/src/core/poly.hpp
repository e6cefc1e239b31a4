#pragma once
#include <map>
#include <vector>

#include "core/multiindex.hpp"

namespace cdkpop {

// Sparse real polynomial in n variables. Kept canonical: no stored
// coefficient has magnitude below kCoefEps.
class Polynomial {
  public:
    static constexpr double kCoefEps = 1e-14;
    using TermMap = std::map<MultiIndex, double, GradedLex>;

    explicit Polynomial(int n) : n_(n) {}
    Polynomial(int n, std::vector<std::pair<MultiIndex, double>> terms);

    int n() const { return n_; }
    const TermMap& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    // degree of the zero polynomial is 0 so ceil(deg/2) stays well defined
    int degree() const;
    double coef(const MultiIndex& a) const {
        auto it = terms_.find(a);
        return it == terms_.end() ? 0.0 : it->second;
    }

    void add_term(const MultiIndex& a, double c);
    Polynomial& operator+=(const Polynomial& g);
    Polynomial scaled(double c) const;
    double eval(const std::vector<double>& x) const;

    static Polynomial constant(int n, double c);
    static Polynomial monomial(int n, const MultiIndex& a, double c = 1.0);

  private:
    int n_;
    TermMap terms_;
};

Polynomial add(const Polynomial& f, const Polynomial& g);
Polynomial mul(const Polynomial& f, const Polynomial& g);

// gradient of f at x
std::vector<double> gradient(const Polynomial& f, const std::vector<double>& x);

// Truncated pseudo-moment sequence: one value per monomial of degree <= order.
class MomentSequence {
  public:
    MomentSequence(int n, int order)
        : basis_(n, order), values_(basis_.size(), 0.0) {}

    int n() const { return basis_.n(); }
    int order() const { return basis_.max_degree(); }
    const Basis& basis() const { return basis_; }
    double operator[](int i) const { return values_[i]; }
    double& operator[](int i) { return values_[i]; }
    double value(const MultiIndex& a) const { return values_[basis_.at(a)]; }
    void set(const MultiIndex& a, double v) { values_[basis_.at(a)] = v; }
    const std::vector<double>& values() const { return values_; }

    // L_y(f); throws if f has a monomial beyond the housed order
    double riesz(const Polynomial& f) const;

    // moments of the Dirac measure at x
    static MomentSequence dirac(const std::vector<double>& x, int order);

  private:
    Basis basis_;
    std::vector<double> values_;
};

}  // namespace cdkpop
