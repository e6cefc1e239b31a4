#include "core/poly.hpp"

#include <cmath>
#include <stdexcept>

namespace cdkpop {

Polynomial::Polynomial(int n, std::vector<std::pair<MultiIndex, double>> terms) : n_(n) {
    for (auto& [a, c] : terms) add_term(a, c);
}

int Polynomial::degree() const {
    int d = 0;
    for (auto& [a, c] : terms_) d = std::max(d, cdkpop::degree(a));
    return d;
}

void Polynomial::add_term(const MultiIndex& a, double c) {
    if (static_cast<int>(a.size()) != n_)
        throw std::invalid_argument("add_term: exponent dimension mismatch");
    auto [it, inserted] = terms_.try_emplace(a, c);
    if (!inserted) it->second += c;
    if (std::abs(it->second) < kCoefEps) terms_.erase(it);
}

Polynomial& Polynomial::operator+=(const Polynomial& g) {
    if (g.n_ != n_) throw std::invalid_argument("polynomial add: dimension mismatch");
    for (auto& [a, c] : g.terms_) add_term(a, c);
    return *this;
}

Polynomial Polynomial::scaled(double c) const {
    Polynomial r(n_);
    for (auto& [a, v] : terms_) r.add_term(a, v * c);
    return r;
}

double Polynomial::eval(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != n_)
        throw std::invalid_argument("eval: point dimension mismatch");
    double s = 0.0;
    for (auto& [a, c] : terms_) {
        double m = c;
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < a[i]; ++k) m *= x[i];
        s += m;
    }
    return s;
}

Polynomial Polynomial::constant(int n, double c) {
    Polynomial r(n);
    r.add_term(MultiIndex(n, 0), c);
    return r;
}

Polynomial Polynomial::monomial(int n, const MultiIndex& a, double c) {
    Polynomial r(n);
    r.add_term(a, c);
    return r;
}

Polynomial add(const Polynomial& f, const Polynomial& g) {
    Polynomial r = f;
    r += g;
    return r;
}

Polynomial mul(const Polynomial& f, const Polynomial& g) {
    if (f.n() != g.n()) throw std::invalid_argument("polynomial mul: dimension mismatch");
    Polynomial r(f.n());
    for (auto& [a, ca] : f.terms())
        for (auto& [b, cb] : g.terms()) r.add_term(add_indices(a, b), ca * cb);
    return r;
}

std::vector<double> gradient(const Polynomial& f, const std::vector<double>& x) {
    const int n = f.n();
    std::vector<double> g(n, 0.0);
    for (const auto& [a, c] : f.terms())
        for (int i = 0; i < n; ++i) {
            if (a[i] == 0) continue;
            double t = c * a[i] * std::pow(x[i], a[i] - 1);
            for (int j = 0; j < n; ++j)
                if (j != i && a[j] > 0) t *= std::pow(x[j], a[j]);
            g[i] += t;
        }
    return g;
}

double MomentSequence::riesz(const Polynomial& f) const {
    double s = 0.0;
    for (auto& [a, c] : f.terms()) {
        int p = basis_.find(a);
        if (p < 0)
            throw std::out_of_range("riesz: monomial " + Basis::to_string(a) +
                                    " exceeds housed order " + std::to_string(order()));
        s += c * values_[p];
    }
    return s;
}

MomentSequence MomentSequence::dirac(const std::vector<double>& x, int order) {
    MomentSequence y(static_cast<int>(x.size()), order);
    for (int i = 0; i < y.basis().size(); ++i) {
        const MultiIndex& a = y.basis()[i];
        double v = 1.0;
        for (size_t j = 0; j < x.size(); ++j)
            for (int k = 0; k < a[j]; ++k) v *= x[j];
        y[i] = v;
    }
    return y;
}

}  // namespace cdkpop
