#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "core/conic.hpp"
#include "core/jacobi.hpp"

namespace cdkpop {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInfStep = 1e30;

// in-place exact symmetrization; the naive M = 0.5*(M + M.transpose())
// aliases in Eigen and leaves the asymmetry it is meant to remove
void symmetrize(Eigen::MatrixXd& M) {
    Eigen::MatrixXd T = M.transpose();
    M = 0.5 * (M + T);
}

// <A, M> for a sparse symmetric A given by upper-triangle entries
double sparse_dot(const std::vector<BlockEntry>& es, const std::vector<MatrixXd>& M) {
    double s = 0.0;
    for (const auto& e : es) {
        const double x = M[e.block](e.row, e.col);
        s += (e.row == e.col) ? e.value * x : 2.0 * e.value * x;
    }
    return s;
}

// out_b += w * A_b for every block entry of A
void add_scaled(const std::vector<BlockEntry>& es, double w, std::vector<MatrixXd>& out) {
    for (const auto& e : es) {
        out[e.block](e.row, e.col) += w * e.value;
        if (e.row != e.col) out[e.block](e.col, e.row) += w * e.value;
    }
}

// largest alpha with X + alpha * Delta still PSD, given Linv with
// X = L L^T; computed from the minimum eigenvalue of Linv Delta Linv^T
double max_step(const MatrixXd& Linv, const MatrixXd& Delta) {
    MatrixXd M = Linv * Delta * Linv.transpose();
    symmetrize(M);
    const double lam = spectral(M).eigenvalues.back();
    if (lam >= -1e-13) return kInfStep;
    return -1.0 / lam;
}

struct Scaling {
    MatrixXd Lx, Lxinv, Lsinv;
    MatrixXd G, Ginv, W;
    VectorXd d;  // NT spectrum
};

// Nesterov-Todd scaling point of the pair (X, S). Returns false when a
// Cholesky factor cannot be formed even after a diagonal jitter.
bool make_scaling(const MatrixXd& X, const MatrixXd& S, Scaling& sc) {
    const int s = static_cast<int>(X.rows());
    auto chol = [&](const MatrixXd& M, MatrixXd& L) {
        Eigen::LLT<MatrixXd> llt(M);
        if (llt.info() == Eigen::Success) {
            L = llt.matrixL();
            return true;
        }
        const double jitter = 1e-12 * (1.0 + M.trace() / s);
        Eigen::LLT<MatrixXd> retry(M + jitter * MatrixXd::Identity(s, s));
        if (retry.info() != Eigen::Success) return false;
        L = retry.matrixL();
        return true;
    };
    MatrixXd Ls;
    if (!chol(X, sc.Lx) || !chol(S, Ls)) return false;

    MatrixXd B = Ls.transpose() * sc.Lx;
    MatrixXd BtB = B.transpose() * B;
    symmetrize(BtB);
    auto dec = spectral(BtB);  // eigenvalues of Lx^T S Lx, descending

    sc.d.resize(s);
    VectorXd dinvsqrt(s);
    for (int i = 0; i < s; ++i) {
        const double ev = std::max(dec.eigenvalues[i], 1e-150);
        sc.d[i] = std::sqrt(ev);
        dinvsqrt[i] = 1.0 / std::sqrt(sc.d[i]);
    }
    sc.Lxinv = sc.Lx.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(s, s));
    sc.Lsinv = Ls.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(s, s));
    sc.G.noalias() = sc.Lx * dec.P * dinvsqrt.asDiagonal();
    sc.Ginv.noalias() = sc.d.cwiseSqrt().asDiagonal() * dec.P.transpose() * sc.Lxinv;
    sc.W.noalias() = sc.G * sc.G.transpose();
    symmetrize(sc.W);
    return true;
}

struct Iterate {
    std::vector<MatrixXd> X, S;
    VectorXd y;
};

ConicSolution solve_psd(const ConicProgram& prog, const SolverSettings& st) {
    const int nb = static_cast<int>(prog.blocks.size());
    const int m = prog.num_constraints();
    int K = 0;
    for (int s : prog.blocks) K += s;

    std::vector<MatrixXd> C(nb);
    for (int b = 0; b < nb; ++b) C[b] = MatrixXd::Zero(prog.blocks[b], prog.blocks[b]);
    add_scaled(prog.objective, 1.0, C);

    VectorXd b_vec(m);
    for (int i = 0; i < m; ++i) b_vec[i] = prog.constraints[i].b;
    const double bnorm = m > 0 ? b_vec.norm() : 0.0;
    double Cnorm2 = 0.0;
    for (const auto& Cb : C) Cnorm2 += Cb.squaredNorm();
    const double Cnorm = std::sqrt(Cnorm2);

    // which blocks each constraint touches, for sparse Schur assembly
    std::vector<std::vector<int>> touched(m);
    for (int i = 0; i < m; ++i) {
        std::vector<char> seen(nb, 0);
        for (const auto& e : prog.constraints[i].entries) {
            if (!seen[e.block]) {
                seen[e.block] = 1;
                touched[i].push_back(e.block);
            }
        }
    }

    Iterate it;
    it.X.resize(nb);
    it.S.resize(nb);
    double xi_p = std::max(1.0, m > 0 ? b_vec.cwiseAbs().maxCoeff() : 1.0);
    double xi_d = 1.0 + Cnorm;
    for (int b = 0; b < nb; ++b) {
        it.X[b] = xi_p * MatrixXd::Identity(prog.blocks[b], prog.blocks[b]);
        it.S[b] = xi_d * MatrixXd::Identity(prog.blocks[b], prog.blocks[b]);
    }
    it.y = VectorXd::Zero(m);

    ConicSolution sol;
    auto record = [&](const Iterate& from, double pobj, double dobj, double gap) {
        sol.X = from.X;
        sol.S = from.S;
        sol.y.resize(m);
        for (int i = 0; i < m; ++i) sol.y[i] = from.y[i];
        sol.objective = pobj;
        sol.dual_objective = dobj;
        sol.gap = gap;
    };

    std::vector<Scaling> sc(nb);
    std::vector<MatrixXd> Rd(nb), T2(nb), Kc(nb), dXa(nb), dSa(nb), dX(nb), dS(nb), U(nb);
    for (int b = 0; b < nb; ++b) U[b] = MatrixXd::Zero(prog.blocks[b], prog.blocks[b]);
    MatrixXd H(m, m);
    VectorXd rp(m);

    double best_merit = std::numeric_limits<double>::infinity();
    bool converged = false;
    // After the tolerances are met, a couple of pure centering passes
    // (sigma = 1, mu held) pull the iterate toward the mu-center, so the
    // reported point on a degenerate optimal face is the canonical one
    // rather than wherever the predictor happened to land.
    int centering_left = 2;
    bool centering = false;
    SolverStatus detected = SolverStatus::NumericalFailure;
    bool detected_set = false;
    int stall_count = 0;

    int iter = 0;
    for (; iter < st.max_iters; ++iter) {
        // residuals and progress measures
        double pobj = 0.0, compl_sum = 0.0;
        for (int b = 0; b < nb; ++b) {
            pobj += C[b].cwiseProduct(it.X[b]).sum();
            compl_sum += it.X[b].cwiseProduct(it.S[b]).sum();
        }
        const double dobj = m > 0 ? b_vec.dot(it.y) : 0.0;
        const double mu = compl_sum / K;

        for (int i = 0; i < m; ++i)
            rp[i] = b_vec[i] - sparse_dot(prog.constraints[i].entries, it.X);
        for (int b = 0; b < nb; ++b) Rd[b] = C[b] - it.S[b];
        for (int i = 0; i < m; ++i)
            if (it.y[i] != 0.0) add_scaled(prog.constraints[i].entries, -it.y[i], Rd);

        double dfeas2 = 0.0;
        for (const auto& R : Rd) dfeas2 += R.squaredNorm();
        const double pfeas = (m > 0 ? rp.norm() : 0.0) / (1.0 + bnorm);
        const double dfeas = std::sqrt(dfeas2) / (1.0 + Cnorm);
        const double gap = compl_sum / (1.0 + std::abs(pobj) + std::abs(dobj));

        sol.trace.push_back({iter, mu, pobj, dobj, gap, pfeas, dfeas, 0.0, 0.0});

        const double merit = std::max({pfeas, dfeas, gap});
        if (merit < best_merit) {
            best_merit = merit;
            record(it, pobj, dobj, gap);
        }

        if (pfeas <= st.tol_feas && dfeas <= st.tol_feas && gap <= st.tol_gap) {
            converged = true;
            record(it, pobj, dobj, gap);
            if (centering_left-- <= 0) break;
            centering = true;
        }
        if (dobj > 1e8 * (1.0 + Cnorm) && dfeas <= 1e-6) {
            detected = SolverStatus::Infeasible;
            detected_set = true;
            break;
        }
        if (pobj < -1e8 * (1.0 + bnorm) && pfeas <= 1e-6) {
            detected = SolverStatus::Unbounded;
            detected_set = true;
            break;
        }

        bool scale_ok = true;
        for (int b = 0; b < nb && scale_ok; ++b)
            scale_ok = make_scaling(it.X[b], it.S[b], sc[b]);
        if (!scale_ok) break;

        // Schur complement H_ij = sum_b tr(A_ib W_b A_jb W_b) through
        // U_i = W A_i W built from rank-one updates on the touched blocks
        for (int i = 0; i < m; ++i) {
            for (int b : touched[i]) U[b].setZero();
            for (const auto& e : prog.constraints[i].entries) {
                const auto& W = sc[e.block].W;
                if (e.row == e.col) {
                    U[e.block].noalias() += e.value * W.col(e.row) * W.col(e.col).transpose();
                } else {
                    U[e.block].noalias() += e.value * W.col(e.row) * W.col(e.col).transpose();
                    U[e.block].noalias() += e.value * W.col(e.col) * W.col(e.row).transpose();
                }
            }
            std::vector<char> bmask(nb, 0);
            for (int b : touched[i]) bmask[b] = 1;
            for (int j = i; j < m; ++j) {
                double h = 0.0;
                for (const auto& e : prog.constraints[j].entries) {
                    if (!bmask[e.block]) continue;
                    const double u = U[e.block](e.row, e.col);
                    h += (e.row == e.col) ? e.value * u : 2.0 * e.value * u;
                }
                H(i, j) = h;
                H(j, i) = h;
            }
        }

        Eigen::LLT<MatrixXd> hfac(H);
        if (m > 0 && hfac.info() != Eigen::Success) {
            double ridge = 1e-13 * (1.0 + H.trace() / m);
            bool ok = false;
            for (int k = 0; k < 4 && !ok; ++k, ridge *= 1e2) {
                hfac.compute(H + ridge * MatrixXd::Identity(m, m));
                ok = hfac.info() == Eigen::Success;
            }
            if (!ok) break;
        }

        for (int b = 0; b < nb; ++b) {
            T2[b].noalias() = sc[b].W * Rd[b] * sc[b].W;
            symmetrize(T2[b]);
        }

        // direction for a given target matrix K_b in scaled space, where
        // T1_b = G K G^T; the affine pass uses K = -D so T1 = -X exactly
        auto compute_direction = [&](const std::vector<MatrixXd>& T1, VectorXd& dy,
                                     std::vector<MatrixXd>& outX, std::vector<MatrixXd>& outS) {
            VectorXd rhs(m);
            for (int i = 0; i < m; ++i)
                rhs[i] = rp[i] - sparse_dot(prog.constraints[i].entries, T1) +
                         sparse_dot(prog.constraints[i].entries, T2);
            dy = m > 0 ? hfac.solve(rhs) : VectorXd();
            for (int b = 0; b < nb; ++b) outS[b] = Rd[b];
            for (int i = 0; i < m; ++i)
                if (dy[i] != 0.0) add_scaled(prog.constraints[i].entries, -dy[i], outS);
            for (int b = 0; b < nb; ++b) {
                outX[b].noalias() = T1[b] - sc[b].W * outS[b] * sc[b].W;
                symmetrize(outX[b]);
            }
        };

        // predictor
        std::vector<MatrixXd> T1a(nb);
        for (int b = 0; b < nb; ++b) T1a[b] = -it.X[b];
        VectorXd dya;
        compute_direction(T1a, dya, dXa, dSa);

        double a_aff_p = 1.0, a_aff_d = 1.0;
        for (int b = 0; b < nb; ++b) {
            a_aff_p = std::min(a_aff_p, max_step(sc[b].Lxinv, dXa[b]));
            a_aff_d = std::min(a_aff_d, max_step(sc[b].Lsinv, dSa[b]));
        }
        double mu_aff = 0.0;
        for (int b = 0; b < nb; ++b)
            mu_aff += (it.X[b] + a_aff_p * dXa[b]).cwiseProduct(it.S[b] + a_aff_d * dSa[b]).sum();
        mu_aff = std::max(mu_aff / K, 0.0);
        const double sigma =
            centering ? 1.0 : std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

        // corrector target in scaled coordinates
        for (int b = 0; b < nb; ++b) {
            const int s = prog.blocks[b];
            MatrixXd dXh = sc[b].Ginv * dXa[b] * sc[b].Ginv.transpose();
            MatrixXd dSh = sc[b].G.transpose() * dSa[b] * sc[b].G;
            MatrixXd E = 0.5 * (dXh * dSh + dSh * dXh.transpose());
            symmetrize(E);
            Kc[b].resize(s, s);
            for (int r = 0; r < s; ++r)
                for (int c = 0; c < s; ++c) {
                    const double target = (r == c ? sigma * mu - sc[b].d[r] * sc[b].d[r] : 0.0);
                    Kc[b](r, c) = 2.0 * (target - E(r, c)) / (sc[b].d[r] + sc[b].d[c]);
                }
        }
        std::vector<MatrixXd> T1c(nb);
        for (int b = 0; b < nb; ++b) {
            T1c[b].noalias() = sc[b].G * Kc[b] * sc[b].G.transpose();
            symmetrize(T1c[b]);
        }
        VectorXd dy;
        compute_direction(T1c, dy, dX, dS);

        double ap = 1.0, ad = 1.0;
        for (int b = 0; b < nb; ++b) {
            ap = std::min(ap, st.step_fraction * max_step(sc[b].Lxinv, dX[b]));
            ad = std::min(ad, st.step_fraction * max_step(sc[b].Lsinv, dS[b]));
        }
        sol.trace.back().step_primal = ap;
        sol.trace.back().step_dual = ad;

        if (ap < 1e-10 && ad < 1e-10) {
            if (++stall_count >= 2) break;
        } else {
            stall_count = 0;
        }

        for (int b = 0; b < nb; ++b) {
            it.X[b] += ap * dX[b];
            it.S[b] += ad * dS[b];
            symmetrize(it.X[b]);
            symmetrize(it.S[b]);
        }
        it.y += ad * dy;
    }

    sol.iterations = static_cast<int>(sol.trace.size());
    if (converged) {
        sol.status = SolverStatus::Optimal;
    } else if (detected_set) {
        sol.status = detected;
    } else {
        const bool near = !sol.trace.empty() && best_merit <= 1e3 * std::max(st.tol_feas, st.tol_gap);
        sol.status = near ? SolverStatus::NearOptimal : SolverStatus::NumericalFailure;
    }
    return sol;
}

}  // namespace

ConicSolution solve(const ConicProgram& prog, const SolverSettings& settings) {
    prog.validate();
    if (settings.tol_gap <= 0 || settings.tol_feas <= 0)
        throw std::invalid_argument("solver settings: tolerances must be positive");
    if (settings.step_fraction <= 0 || settings.step_fraction >= 1)
        throw std::invalid_argument("solver settings: step fraction must lie in (0,1)");

    if (prog.n_free == 0) return solve_psd(prog, settings);

    // fold each free scalar u_j into a pair of 1x1 PSD blocks u+ - u-
    ConicProgram folded;
    folded.blocks = prog.blocks;
    folded.objective = prog.objective;
    folded.constraints = prog.constraints;
    const int base = static_cast<int>(prog.blocks.size());
    for (int j = 0; j < prog.n_free; ++j) {
        folded.blocks.push_back(1);
        folded.blocks.push_back(1);
        const double cj = prog.free_objective.empty() ? 0.0 : prog.free_objective[j];
        if (cj != 0.0) {
            folded.objective.push_back({base + 2 * j, 0, 0, cj});
            folded.objective.push_back({base + 2 * j + 1, 0, 0, -cj});
        }
    }
    for (auto& con : folded.constraints) {
        if (con.free_coefs.empty()) continue;
        for (int j = 0; j < prog.n_free; ++j) {
            const double f = con.free_coefs[j];
            if (f == 0.0) continue;
            con.entries.push_back({base + 2 * j, 0, 0, f});
            con.entries.push_back({base + 2 * j + 1, 0, 0, -f});
        }
        con.free_coefs.clear();
    }

    ConicSolution sol = solve_psd(folded, settings);
    sol.u.resize(prog.n_free);
    for (int j = 0; j < prog.n_free; ++j)
        sol.u[j] = sol.X[base + 2 * j](0, 0) - sol.X[base + 2 * j + 1](0, 0);
    sol.X.resize(prog.blocks.size());
    sol.S.resize(prog.blocks.size());
    return sol;
}

}  // namespace cdkpop
