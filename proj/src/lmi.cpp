#include "ddc/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ddc/numerics.hpp"

namespace ddc::lmi {

LmiProblem LmiProblem::matrix_variable(int rows, int cols) {
    LmiProblem p;
    p.var_rows = rows;
    p.var_cols = cols;
    p.num_vars = rows * cols;
    p.eq_A = Matrix(0, p.num_vars);
    p.eq_b = Vector(0);
    return p;
}

LmiProblem LmiProblem::symmetric_variable(int dim) {
    LmiProblem p;
    p.var_rows = dim;
    p.var_cols = dim;
    p.symmetric = true;
    p.num_vars = dim * (dim + 1) / 2;
    p.eq_A = Matrix(0, p.num_vars);
    p.eq_b = Vector(0);
    return p;
}

Matrix LmiProblem::unstack(const Vector& z) const {
    if (symmetric) {
        Matrix M(var_rows, var_rows);
        int k = 0;
        for (int j = 0; j < var_cols; ++j)
            for (int i = j; i < var_rows; ++i) {
                M(i, j) = z(k);
                M(j, i) = z(k);
                ++k;
            }
        return M;
    }
    Matrix M(var_rows, var_cols);
    int k = 0;
    for (int j = 0; j < var_cols; ++j)
        for (int i = 0; i < var_rows; ++i) M(i, j) = z(k++);
    return M;
}

void LmiProblem::add_psd_block(
    const std::function<Matrix(const Matrix&)>& affine, bool strict,
    const std::string& name) {
    PsdBlock blk;
    blk.strict = strict;
    blk.name = name;
    const Matrix zero_var = unstack(Vector::Zero(num_vars));
    blk.C0 = affine(zero_var);
    blk.C0 = 0.5 * (blk.C0 + blk.C0.transpose());
    blk.coeff.resize(num_vars);
    for (int k = 0; k < num_vars; ++k) {
        Vector e = Vector::Zero(num_vars);
        e(k) = 1.0;
        Matrix Ck = affine(unstack(e)) - blk.C0;
        blk.coeff[k] = 0.5 * (Ck + Ck.transpose());
    }
    blocks.push_back(std::move(blk));
}

void LmiProblem::add_equalities(
    const std::function<Vector(const Matrix&)>& affine) {
    const Vector r0 = affine(unstack(Vector::Zero(num_vars)));
    const Eigen::Index rows = r0.size();
    Matrix A(rows, num_vars);
    for (int k = 0; k < num_vars; ++k) {
        Vector e = Vector::Zero(num_vars);
        e(k) = 1.0;
        A.col(k) = affine(unstack(e)) - r0;
    }
    Matrix newA(eq_A.rows() + rows, num_vars);
    Vector newb(eq_b.size() + rows);
    newA << eq_A, A;
    newb << eq_b, -r0;
    eq_A = newA;
    eq_b = newb;
}

namespace {

// One cone in reduced coordinates: S(v) = D0 + sum_a v_a D_a >= 0.
struct Cone {
    Matrix D0;
    std::vector<Matrix> D;
    bool strict = false;
    int orig_index = -1;
};

struct BarrierResult {
    Vector v;
    double objective = 0.0;
    double gap = 0.0;
    double final_t = 0.0;
    bool ok = false;
    std::vector<Matrix> final_inverses;  // S_i^{-1} at the last iterate
};

bool cholesky_all(const std::vector<Cone>& cones, const Vector& v,
                  std::vector<Eigen::LLT<Matrix>>& llts) {
    llts.clear();
    llts.reserve(cones.size());
    for (const Cone& c : cones) {
        Matrix S = c.D0;
        for (size_t a = 0; a < c.D.size(); ++a) S += v(a) * c.D[a];
        Eigen::LLT<Matrix> llt(S);
        if (llt.info() != Eigen::Success) return false;
        llts.push_back(std::move(llt));
    }
    return true;
}

double barrier_value(const std::vector<Cone>& cones, const Vector& v,
                     const Vector& c, double t, const Vector& bounds) {
    std::vector<Eigen::LLT<Matrix>> llts;
    if (!cholesky_all(cones, v, llts))
        return std::numeric_limits<double>::infinity();
    double phi = -t * c.dot(v);
    for (const auto& llt : llts) {
        const auto& L = llt.matrixLLT();
        for (Eigen::Index i = 0; i < L.rows(); ++i)
            phi -= 2.0 * std::log(L(i, i));
    }
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        const double lo = bounds(j) - v(j), hi = bounds(j) + v(j);
        if (lo <= 0 || hi <= 0) return std::numeric_limits<double>::infinity();
        phi -= std::log(lo) + std::log(hi);
    }
    return phi;
}

// Path-following maximization of c.v over the cones intersected with the
// per-coordinate box |v_j| < bounds_j.
BarrierResult barrier_maximize(const std::vector<Cone>& cones, const Vector& c,
                               const Vector& v0, const Vector& bounds,
                               double gap_tol) {
    BarrierResult res;
    const Eigen::Index nv = v0.size();
    double nu = 2.0 * static_cast<double>(nv);
    for (const Cone& cone : cones) nu += static_cast<double>(cone.D0.rows());

    Vector v = v0;
    std::vector<Eigen::LLT<Matrix>> llts;
    if (!cholesky_all(cones, v, llts)) return res;  // not strictly feasible

    double t = 1.0;
    int total_newton = 0;
    const int max_newton = 4000;
    while (total_newton < max_newton) {
        // Center at the current t.
        for (int it = 0; it < 80 && total_newton < max_newton; ++it) {
            ++total_newton;
            if (!cholesky_all(cones, v, llts)) return res;
            Vector g = -t * c;
            Matrix H = Matrix::Zero(nv, nv);
            for (size_t ci = 0; ci < cones.size(); ++ci) {
                const Cone& cone = cones[ci];
                const Eigen::Index d = cone.D0.rows();
                Matrix vecs(d * d, nv);
                for (Eigen::Index a = 0; a < nv; ++a) {
                    Matrix Ma = llts[ci].matrixL().solve(cone.D[a]);
                    Ma = llts[ci]
                             .matrixL()
                             .solve(Ma.transpose())
                             .transpose();
                    // Ma = L^{-1} D_a L^{-T}
                    g(a) -= Ma.trace();
                    vecs.col(a) = Eigen::Map<const Vector>(Ma.data(), d * d);
                }
                H += vecs.transpose() * vecs;
            }
            for (Eigen::Index j = 0; j < nv; ++j) {
                const double lo = bounds(j) - v(j), hi = bounds(j) + v(j);
                g(j) += 1.0 / lo - 1.0 / hi;
                H(j, j) += 1.0 / (lo * lo) + 1.0 / (hi * hi);
            }

            Eigen::LDLT<Matrix> hs(H);
            Vector step = -hs.solve(g);
            double decrement2 = -g.dot(step);
            if (!std::isfinite(decrement2) || decrement2 < 0) {
                // Regularize a near-singular Hessian.
                Matrix Hr = H + 1e-12 * H.trace() * Matrix::Identity(nv, nv);
                step = -Hr.ldlt().solve(g);
                decrement2 = -g.dot(step);
                if (!std::isfinite(decrement2) || decrement2 < 0) return res;
            }
            if (decrement2 * 0.5 < 1e-11) break;

            const double phi0 = barrier_value(cones, v, c, t, bounds);
            double alpha = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                const double phi1 =
                    barrier_value(cones, v + alpha * step, c, t, bounds);
                if (phi1 < phi0 - 0.25 * alpha * decrement2 + 1e-13 * std::abs(phi0)) {
                    v += alpha * step;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!moved) break;
        }
        if (nu / t < gap_tol || t > 1e16) break;
        t *= 10.0;
    }

    cholesky_all(cones, v, llts);
    res.v = v;
    res.objective = c.dot(v);
    res.gap = nu / t;
    res.final_t = t;
    res.ok = true;
    res.final_inverses.reserve(cones.size());
    for (size_t ci = 0; ci < cones.size(); ++ci) {
        const Eigen::Index d = cones[ci].D0.rows();
        res.final_inverses.push_back(llts[ci].solve(Matrix::Identity(d, d)));
    }
    return res;
}

struct ReducedProblem {
    Vector z0;   // particular solution of the equalities
    Matrix N;    // z = z0 + N w
    std::vector<Cone> cones;  // compressed, scaled; over w only
    bool eq_consistent = true;
};

ReducedProblem reduce(const LmiProblem& p, double strict_eps) {
    ReducedProblem rp;
    if (p.eq_A.rows() > 0) {
        rp.z0 = numerics::pinv(p.eq_A) * p.eq_b;
        if ((p.eq_A * rp.z0 - p.eq_b).cwiseAbs().maxCoeff() >
            1e-8 * (1.0 + p.eq_b.cwiseAbs().maxCoeff())) {
            rp.eq_consistent = false;
            return rp;
        }
        rp.N = numerics::nullspace_basis(p.eq_A);
    } else {
        rp.z0 = Vector::Zero(p.num_vars);
        rp.N = Matrix::Identity(p.num_vars, p.num_vars);
    }
    const Eigen::Index r = rp.N.cols();

    for (size_t bi = 0; bi < p.blocks.size(); ++bi) {
        const PsdBlock& blk = p.blocks[bi];
        const Eigen::Index dim = blk.C0.rows();
        Cone cone;
        cone.strict = blk.strict;
        cone.orig_index = static_cast<int>(bi);
        cone.D0 = blk.C0;
        for (int k = 0; k < p.num_vars; ++k)
            if (rp.z0(k) != 0.0) cone.D0 += rp.z0(k) * blk.coeff[k];
        if (blk.strict) cone.D0 -= strict_eps * Matrix::Identity(dim, dim);
        cone.D.resize(r);
        for (Eigen::Index j = 0; j < r; ++j) {
            Matrix Dj = Matrix::Zero(dim, dim);
            for (int k = 0; k < p.num_vars; ++k)
                if (rp.N(k, j) != 0.0) Dj += rp.N(k, j) * blk.coeff[k];
            cone.D[j] = Dj;
        }

        // Compress non-strict blocks onto the joint range of their terms so
        // that rank-deficient constraints still admit a barrier interior.
        if (!blk.strict) {
            Matrix stacked(dim, dim * (r + 1));
            stacked.leftCols(dim) = cone.D0;
            for (Eigen::Index j = 0; j < r; ++j)
                stacked.middleCols(dim * (j + 1), dim) = cone.D[j];
            Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
            const Eigen::VectorXd& sv = svd.singularValues();
            int d2 = 0;
            const double tolsv =
                (sv.size() ? sv(0) : 0.0) * 1e-12 * static_cast<double>(dim);
            for (Eigen::Index i = 0; i < sv.size(); ++i)
                if (sv(i) > tolsv) ++d2;
            if (d2 > 0 && d2 < dim) {
                Matrix V = svd.matrixU().leftCols(d2);
                cone.D0 = V.transpose() * cone.D0 * V;
                for (auto& Dj : cone.D) Dj = V.transpose() * Dj * V;
            } else if (d2 == 0) {
                continue;  // identically zero block, trivially satisfied
            }
        }

        double scale = cone.D0.cwiseAbs().maxCoeff();
        for (const auto& Dj : cone.D)
            scale = std::max(scale, Dj.cwiseAbs().maxCoeff());
        if (scale > 0) {
            cone.D0 /= scale;
            for (auto& Dj : cone.D) Dj /= scale;
        }
        rp.cones.push_back(std::move(cone));
    }
    return rp;
}

// Appends the shared slack variable s: every matrix cone becomes
// S_i(w) - s*I >= 0.
std::vector<Cone> with_slack(const std::vector<Cone>& cones) {
    std::vector<Cone> out = cones;
    for (Cone& c : out) {
        const Eigen::Index d = c.D0.rows();
        c.D.push_back(-Matrix::Identity(d, d));
    }
    return out;
}

double worst_violation_of(const LmiProblem& p, const Vector& z,
                          double strict_eps) {
    double worst = 0.0;
    if (p.eq_A.rows() > 0)
        worst = (p.eq_A * z - p.eq_b).cwiseAbs().maxCoeff();
    for (const PsdBlock& blk : p.blocks) {
        Matrix S = blk.C0;
        for (int k = 0; k < p.num_vars; ++k) S += z(k) * blk.coeff[k];
        Eigen::SelfAdjointEigenSolver<Matrix> es(S);
        const double lam = es.eigenvalues().minCoeff();
        const double floor = blk.strict ? strict_eps : 0.0;
        worst = std::max(worst, floor - lam);
    }
    return std::max(worst, 0.0);
}

}  // namespace

LmiSolution LmiSolver::solve_feasibility(const LmiProblem& p) const {
    LmiSolution sol;
    sol.strict_eps = tol_.lmi_strict_eps;
    if (p.num_vars <= 0) throw MalformedProblem("lmi: no decision variables");
    for (const PsdBlock& blk : p.blocks)
        if (blk.C0.rows() != blk.C0.cols())
            throw MalformedProblem("lmi: non-square constraint block");

    ReducedProblem rp = reduce(p, tol_.lmi_strict_eps);
    if (!rp.eq_consistent) {
        sol.status = LmiStatus::Infeasible;
        sol.message = "equality constraints inconsistent";
        return sol;
    }
    const Eigen::Index r = rp.N.cols();

    if (rp.cones.empty()) {
        sol.z = rp.z0;
        sol.variable = p.unstack(sol.z);
        sol.status = LmiStatus::Feasible;
        sol.worst_violation = worst_violation_of(p, sol.z, tol_.lmi_strict_eps);
        return sol;
    }

    // Phase I: maximize the shared slack s with S_i(w) >= s*I.
    std::vector<Cone> cones = with_slack(rp.cones);
    Vector v0 = Vector::Zero(r + 1);
    double lam_min = 0.0;
    for (const Cone& c : rp.cones) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(c.D0);
        lam_min = std::min(lam_min, es.eigenvalues().minCoeff());
    }
    v0(r) = lam_min - 1.0;
    Vector bounds = Vector::Constant(r + 1, p.var_bound);
    bounds(r) = std::max(1e4, 10.0 * (std::abs(v0(r)) + 1.0));
    Vector c = Vector::Zero(r + 1);
    c(r) = 1.0;

    BarrierResult br = barrier_maximize(cones, c, v0, bounds, 1e-11);
    if (!br.ok) {
        sol.status = LmiStatus::NumericalFailure;
        sol.message = "barrier breakdown in phase I";
        return sol;
    }
    sol.margin = br.objective;

    if (sol.margin > std::max(0.0, br.gap)) {
        sol.z = rp.z0 + rp.N * br.v.head(r);
        sol.variable = p.unstack(sol.z);
        sol.worst_violation = worst_violation_of(p, sol.z, tol_.lmi_strict_eps);
        sol.status = LmiStatus::Feasible;
        return sol;
    }
    // With only non-strict blocks the feasible set may have an empty
    // interior; the phase-I optimum then sits on the boundary. Accept the
    // iterate when it satisfies every original constraint to tolerance.
    bool any_strict = false;
    for (const PsdBlock& blk : p.blocks) any_strict = any_strict || blk.strict;
    if (!any_strict && sol.margin > -1e-7) {
        Vector zc = rp.z0 + rp.N * br.v.head(r);
        const double wv = worst_violation_of(p, zc, tol_.lmi_strict_eps);
        if (wv <= 1e-7 * (1.0 + zc.cwiseAbs().maxCoeff())) {
            sol.z = zc;
            sol.variable = p.unstack(sol.z);
            sol.worst_violation = wv;
            sol.status = LmiStatus::Feasible;
            return sol;
        }
    }
    if (sol.margin + br.gap < 0.0) {
        sol.status = LmiStatus::Infeasible;
        // Best-effort separating certificate from the final barrier iterate.
        double trace_sum = 0.0;
        for (const Matrix& Sinv : br.final_inverses) trace_sum += Sinv.trace();
        if (trace_sum > 0) {
            for (size_t i = 0; i < br.final_inverses.size(); ++i) {
                Matrix Z = br.final_inverses[i] / trace_sum;
                sol.dual_pairing += (Z * rp.cones[i].D0).trace();
                sol.dual_blocks.push_back(std::move(Z));
            }
        }
        sol.message = "phase-I slack negative";
        return sol;
    }
    sol.status = LmiStatus::NumericalFailure;
    sol.message = "phase-I slack indistinguishable from zero";
    return sol;
}

LmiSolution LmiSolver::solve_trace_max(const LmiProblem& p) const {
    LmiSolution sol;
    sol.strict_eps = tol_.lmi_strict_eps;
    if (p.objective != Objective::MaximizeTrace ||
        p.objective_vector.size() != p.num_vars)
        throw MalformedProblem("lmi: trace objective not set");

    ReducedProblem rp = reduce(p, tol_.lmi_strict_eps);
    if (!rp.eq_consistent) {
        sol.status = LmiStatus::Infeasible;
        sol.message = "equality constraints inconsistent";
        return sol;
    }
    const Eigen::Index r = rp.N.cols();

    // Phase I for a strictly feasible start.
    std::vector<Cone> cones1 = with_slack(rp.cones);
    Vector v0 = Vector::Zero(r + 1);
    double lam_min = 0.0;
    for (const Cone& c : rp.cones) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(c.D0);
        lam_min = std::min(lam_min, es.eigenvalues().minCoeff());
    }
    v0(r) = lam_min - 1.0;
    Vector bounds1 = Vector::Constant(r + 1, p.var_bound);
    bounds1(r) = std::max(1e4, 10.0 * (std::abs(v0(r)) + 1.0));
    Vector c1 = Vector::Zero(r + 1);
    c1(r) = 1.0;
    BarrierResult ph1 = barrier_maximize(cones1, c1, v0, bounds1, 1e-11);
    if (!ph1.ok) {
        sol.status = LmiStatus::NumericalFailure;
        sol.message = "barrier breakdown in phase I";
        return sol;
    }
    sol.margin = ph1.objective;
    if (sol.margin <= 0.0) {
        sol.status = sol.margin + ph1.gap < 0.0 ? LmiStatus::Infeasible
                                                : LmiStatus::NumericalFailure;
        sol.message = "no strictly feasible interior point found";
        return sol;
    }

    // Phase II: maximize the objective from the centered interior point.
    Vector cw = rp.N.transpose() * p.objective_vector;
    const double c_offset = p.objective_vector.dot(rp.z0);
    Vector w0 = ph1.v.head(r);
    Vector bounds2 = Vector::Constant(r, p.var_bound);
    const double obj_scale = std::max(1.0, cw.cwiseAbs().maxCoeff());
    BarrierResult ph2 =
        barrier_maximize(rp.cones, cw / obj_scale, w0, bounds2, 1e-10);
    if (!ph2.ok) {
        sol.status = LmiStatus::NumericalFailure;
        sol.message = "barrier breakdown in phase II";
        return sol;
    }
    sol.z = rp.z0 + rp.N * ph2.v;
    sol.variable = p.unstack(sol.z);
    sol.objective_value = cw.dot(ph2.v) + c_offset;
    sol.worst_violation = worst_violation_of(p, sol.z, tol_.lmi_strict_eps);
    if (ph2.v.cwiseAbs().maxCoeff() > 0.99 * p.var_bound) {
        sol.status = LmiStatus::Unbounded;
        sol.message = "variable box active at the optimum";
        return sol;
    }
    sol.status = LmiStatus::Optimal;
    return sol;
}

}  // namespace ddc::lmi
