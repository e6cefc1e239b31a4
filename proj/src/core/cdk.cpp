#include "core/cdk.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/jacobi.hpp"
#include "core/relax.hpp"

namespace cdkpop {

ChristoffelModel build_christoffel(const MomentSequence& y, int d, double beta,
                                   double kernel_tol) {
    if (d < 1) throw std::invalid_argument("christoffel: order must be at least 1");
    if (beta <= 0.0) throw std::invalid_argument("christoffel: regularizer must be positive");
    if (y.order() < 2 * d)
        throw std::invalid_argument("christoffel: moments housed below degree 2d");

    const int n = y.n();
    MomentIndexer mi(n, d);
    const int s = mi.rows().size();
    Eigen::MatrixXd M(s, s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) M(i, j) = y.value(mi.entry(i, j));

    auto dec = spectral(M);

    ChristoffelModel model;
    model.n = n;
    model.d = d;
    model.beta = beta;
    model.kernel_tol = kernel_tol;
    model.eigen_pairs.reserve(s);
    for (int i = 0; i < s; ++i) {
        Polynomial p(n);
        for (int j = 0; j < s; ++j) p.add_term(mi.rows()[j], dec.P(j, i));
        const double e = std::max(dec.eigenvalues[i], 0.0);
        model.eigen_pairs.emplace_back(std::move(p), e);
        if (e < kernel_tol) ++model.kernel_dim;
    }
    return model;
}

double christoffel_eval(const ChristoffelModel& model, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != model.n)
        throw std::invalid_argument("christoffel: evaluation point dimension mismatch");
    double v = 0.0;
    for (const auto& [p, e] : model.eigen_pairs) {
        const double pv = p.eval(x);
        v += pv * pv / (e + model.beta);
    }
    return v;
}

Polynomial range_polynomial(const ChristoffelModel& model) {
    Polynomial out(model.n);
    for (int i = 0; i < model.range_dim(); ++i) {
        const auto& [p, e] = model.eigen_pairs[i];
        out += mul(p, p).scaled(1.0 / (e + model.beta));
    }
    return out;
}

double christoffel_mass(const ChristoffelModel& model) {
    double v = 0.0;
    for (int i = 0; i < model.range_dim(); ++i) {
        const double e = model.eigen_pairs[i].second;
        v += e / (e + model.beta);
    }
    return v;
}

double christoffel_mass(const ChristoffelModel& model, const MomentSequence& y) {
    return y.riesz(range_polynomial(model));
}

SublevelConstraints sublevel_constraints(const ChristoffelModel& model, double gamma) {
    if (gamma <= 0.0) throw std::invalid_argument("sublevel: threshold must be positive");
    SublevelConstraints sc;
    sc.gamma = gamma;
    sc.range_constraint = Polynomial::constant(model.n, gamma);
    sc.range_constraint += range_polynomial(model).scaled(-1.0);
    for (int j = model.range_dim(); j < static_cast<int>(model.eigen_pairs.size()); ++j) {
        const Polynomial& p = model.eigen_pairs[j].first;
        Polynomial c = Polynomial::constant(model.n, model.beta);
        c += mul(p, p).scaled(-1.0);
        sc.kernel_constraints.push_back(std::move(c));
    }
    return sc;
}

MomentSequence marginal_sequence(const MomentSequence& y, int i) {
    if (i < 0 || i >= y.n()) throw std::out_of_range("marginal: variable index out of range");
    MomentSequence m(1, y.order());
    for (int k = 0; k <= y.order(); ++k) {
        MultiIndex a(y.n(), 0);
        a[i] = k;
        m.set({k}, y.value(a));
    }
    return m;
}

ChristoffelModel marginal_christoffel(const MomentSequence& y, int i, double beta,
                                      double kernel_tol) {
    return build_christoffel(marginal_sequence(y, i), 1, beta, kernel_tol);
}

}  // namespace cdkpop
