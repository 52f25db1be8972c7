#include "ddc/lqr.hpp"

#include <Eigen/Eigenvalues>

#include "ddc/analysis.hpp"
#include "ddc/lmi.hpp"
#include "ddc/numerics.hpp"

namespace ddc::lqr {

void LqrWeights::validate(Eigen::Index n, Eigen::Index m) const {
    if (Q.rows() != n || Q.cols() != n || R.rows() != m || R.cols() != m)
        throw DimensionMismatch("LqrWeights: dimensions do not match the data");
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1 + Q.norm()))
        throw MalformedProblem("LqrWeights: Q is not symmetric");
    if ((R - R.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1 + R.norm()))
        throw MalformedProblem("LqrWeights: R is not symmetric");
    if (Eigen::SelfAdjointEigenSolver<Matrix>(Q).eigenvalues().minCoeff() <
        -1e-10)
        throw MalformedProblem("LqrWeights: Q is not positive semidefinite");
    if (m > 0 &&
        Eigen::SelfAdjointEigenSolver<Matrix>(R).eigenvalues().minCoeff() <=
            1e-10)
        throw MalformedProblem("LqrWeights: R is not positive definite");
}

bool lqr_solvable(const Matrix& A, const Matrix& B, const LqrWeights& w,
                  const Tolerances& tol) {
    if (!numerics::is_stabilizable(A, B, tol.rank_tol_scale)) return false;
    for (const auto& lam : numerics::spectrum(A).eigenvalues) {
        if (std::abs(std::abs(lam) - 1.0) < 1e-7 &&
            !analysis::hautus_observable(w.Q, A, lam, tol))
            return false;
    }
    return true;
}

Matrix cost_operator(const BlockMatrices& bm, const LqrWeights& w,
                     const Matrix& P) {
    return bm.X_minus.transpose() * P * bm.X_minus -
           bm.X_plus.transpose() * P * bm.X_plus -
           bm.X_minus.transpose() * w.Q * bm.X_minus -
           bm.U_minus.transpose() * w.R * bm.U_minus;
}

namespace {

// Feasibility system of the pathological branch: Theta with X_- Theta
// symmetric, U_- Theta = 0, Q X_+ Theta = 0 and the stabilization block
// positive definite.
lmi::LmiSolution pathological_branch(const BlockMatrices& bm,
                                     const LqrWeights& w,
                                     const Tolerances& tol) {
    const int n = static_cast<int>(bm.n());
    const int T = static_cast<int>(bm.T());
    const Matrix Xm = bm.X_minus, Xp = bm.X_plus, Um = bm.U_minus;

    lmi::LmiProblem prob = lmi::LmiProblem::matrix_variable(T, n);
    prob.add_equalities([&](const Matrix& theta) {
        Matrix A = Xm * theta;
        Matrix R = A - A.transpose();
        Matrix U = Um * theta;
        Matrix QX = w.Q * (Xp * theta);
        Vector out(n * (n - 1) / 2 + U.size() + QX.size());
        int k = 0;
        for (int j = 0; j < n; ++j)
            for (int i = j + 1; i < n; ++i) out(k++) = R(i, j);
        for (Eigen::Index i = 0; i < U.size(); ++i) out(k++) = U(i);
        for (Eigen::Index i = 0; i < QX.size(); ++i) out(k++) = QX(i);
        return out;
    });
    prob.add_psd_block(
        [&](const Matrix& theta) {
            Matrix blk(2 * n, 2 * n);
            blk.topLeftCorner(n, n) = Xm * theta;
            blk.topRightCorner(n, n) = Xp * theta;
            blk.bottomLeftCorner(n, n) = (Xp * theta).transpose();
            blk.bottomRightCorner(n, n) = Xm * theta;
            return blk;
        },
        /*strict=*/true, "pathological");
    lmi::LmiSolver solver(tol);
    return solver.solve_feasibility(prob);
}

}  // namespace

LqrVerdict informative_for_lqr(const BlockMatrices& bm, const LqrWeights& w,
                               const Tolerances& tol) {
    w.validate(bm.n(), bm.m());
    LqrVerdict verdict;

    analysis::AnalysisVerdict sysid = analysis::informative_sysid(bm, tol);
    if (sysid.informative) {
        if (lqr_solvable(sysid.identified->A, sysid.identified->B, w, tol)) {
            verdict.informative = true;
            verdict.branch = LqrBranch::SysIdBranch;
        }
        return verdict;
    }
    lmi::LmiSolution sol = pathological_branch(bm, w, tol);
    if (sol.status == lmi::LmiStatus::Feasible) {
        verdict.informative = true;
        verdict.branch = LqrBranch::PathologicalBranch;
    }
    return verdict;
}

LqrCertificate gain_from_data(const BlockMatrices& bm, const LqrWeights& w,
                              const Tolerances& tol) {
    w.validate(bm.n(), bm.m());
    const Eigen::Index n = bm.n();
    const Eigen::Index m = bm.m();
    const Eigen::Index T = bm.T();

    analysis::AnalysisVerdict sysid = analysis::informative_sysid(bm, tol);
    if (!sysid.informative) {
        lmi::LmiSolution sol = pathological_branch(bm, w, tol);
        if (sol.status != lmi::LmiStatus::Feasible)
            throw NotInformative(
                "gain_from_data: data not informative for LQR");
        LqrCertificate cert;
        cert.branch = LqrBranch::PathologicalBranch;
        cert.K = Matrix::Zero(m, n);
        cert.P_plus = w.Q;
        cert.theta = sol.variable;
        return cert;
    }
    if (!lqr_solvable(sysid.identified->A, sysid.identified->B, w, tol))
        throw NotInformative("gain_from_data: LQR not solvable for the "
                             "identified system");

    // Trace maximization over {P = P^T >= 0, L(P) <= 0}.
    lmi::LmiProblem prob =
        lmi::LmiProblem::symmetric_variable(static_cast<int>(n));
    prob.objective = lmi::Objective::MaximizeTrace;
    prob.objective_vector = Vector::Zero(prob.num_vars);
    {
        int k = 0;
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = j; i < n; ++i) {
                if (i == j) prob.objective_vector(k) = 1.0;
                ++k;
            }
    }
    prob.add_psd_block([&](const Matrix& P) { return P; }, /*strict=*/false,
                       "P_psd");
    prob.add_psd_block(
        [&](const Matrix& P) { return Matrix(-cost_operator(bm, w, P)); },
        /*strict=*/false, "cost_operator");

    lmi::LmiSolver solver(tol);
    lmi::LmiSolution sol = solver.solve_trace_max(prob);
    if (sol.status != lmi::LmiStatus::Optimal)
        throw NumericalError("gain_from_data: trace-max solve failed: " +
                             sol.message);
    Matrix P_plus = 0.5 * (sol.variable + sol.variable.transpose());

    // Newton polish of the barrier optimum: the trace maximizer satisfies the
    // Riccati stationarity of the identified realization, so Kleinman steps
    // started from the interior-point solution sharpen it to machine
    // accuracy without changing which solution is selected.
    {
        const Matrix& A = sysid.identified->A;
        const Matrix& B = sysid.identified->B;
        Matrix S = w.R + B.transpose() * P_plus * B;
        Matrix Kp = -S.ldlt().solve(B.transpose() * P_plus * A);
        if (numerics::spectral_radius(A + B * Kp) < 1.0) {
            for (int it = 0; it < 10; ++it) {
                Matrix W2 = w.Q + Kp.transpose() * w.R * Kp;
                Matrix Pn;
                try {
                    Pn = numerics::lyapunov_solve(A + B * Kp, W2);
                } catch (const Error&) {
                    break;
                }
                Pn = 0.5 * (Pn + Pn.transpose());
                Matrix Sn = w.R + B.transpose() * Pn * B;
                Matrix Kn = -Sn.ldlt().solve(B.transpose() * Pn * A);
                if (!Pn.allFinite() ||
                    numerics::spectral_radius(A + B * Kn) >= 1.0)
                    break;
                const double move = (Pn - P_plus).cwiseAbs().maxCoeff();
                P_plus = Pn;
                Kp = Kn;
                if (move < 1e-12 * (1.0 + P_plus.cwiseAbs().maxCoeff()))
                    break;
            }
        }
    }

    // Right inverse with L(P+) X_-^dag = 0, column-by-column least squares.
    Matrix L = cost_operator(bm, w, P_plus);
    Matrix stacked(n + T, T);
    stacked.topRows(n) = bm.X_minus;
    stacked.bottomRows(T) = L;
    Matrix rhs = Matrix::Zero(n + T, n);
    rhs.topLeftCorner(n, n) = Matrix::Identity(n, n);
    Matrix right_inverse = stacked.colPivHouseholderQr().solve(rhs);
    const double resid =
        (stacked * right_inverse - rhs).cwiseAbs().maxCoeff();
    if (resid > 1e-7 * (1.0 + L.cwiseAbs().maxCoeff()))
        throw NumericalError(
            "gain_from_data: right-inverse system residual too large");

    LqrCertificate cert;
    cert.branch = LqrBranch::SysIdBranch;
    cert.P_plus = P_plus;
    cert.right_inverse = right_inverse;
    cert.K = bm.U_minus * right_inverse;
    if (numerics::spectral_radius(bm.X_plus * right_inverse) >= 1.0)
        throw NumericalError("gain_from_data: closed loop not stable");
    return cert;
}

}  // namespace ddc::lqr
