#include "ddc/state_feedback.hpp"

#include "ddc/lmi.hpp"
#include "ddc/numerics.hpp"

namespace ddc::state_feedback {

namespace {

GainCertificate finish(const BlockMatrices& bm, Route route,
                       const Matrix& right_inverse,
                       std::optional<Matrix> theta = std::nullopt) {
    GainCertificate cert;
    cert.route = route;
    cert.right_inverse = right_inverse;
    cert.K = bm.U_minus * right_inverse;
    cert.closed_loop = bm.X_plus * right_inverse;
    cert.closed_spectrum = numerics::spectrum(cert.closed_loop);
    cert.theta = std::move(theta);
    return cert;
}

}  // namespace

GainCertificate stabilize_lmi(const BlockMatrices& bm, const Tolerances& tol) {
    const int n = static_cast<int>(bm.n());
    const int T = static_cast<int>(bm.T());

    lmi::LmiProblem prob = lmi::LmiProblem::matrix_variable(T, n);
    const Matrix Xm = bm.X_minus, Xp = bm.X_plus;
    prob.add_equalities([&](const Matrix& theta) {
        Matrix A = Xm * theta;
        Matrix R = A - A.transpose();
        Vector out(n * (n - 1) / 2);
        int k = 0;
        for (int j = 0; j < n; ++j)
            for (int i = j + 1; i < n; ++i) out(k++) = R(i, j);
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
        /*strict=*/true, "stabilization");

    lmi::LmiSolver solver(tol);
    lmi::LmiSolution sol = solver.solve_feasibility(prob);
    if (sol.status == lmi::LmiStatus::Infeasible)
        throw NotInformative("stabilize_lmi: LMI infeasible");
    if (sol.status != lmi::LmiStatus::Feasible)
        throw NumericalError("stabilize_lmi: solver failed: " + sol.message);

    const Matrix theta = sol.variable;
    const Matrix XmTheta = Xm * theta;
    const Matrix right_inverse =
        theta * XmTheta.ldlt().solve(Matrix::Identity(n, n));
    GainCertificate cert = finish(bm, Route::Lmi, right_inverse, theta);
    if (cert.closed_spectrum.spectral_radius >= 1.0 - tol.stability_margin)
        throw NumericalError("stabilize_lmi: witness closed loop not stable");
    return cert;
}

GainCertificate stabilize_algebraic(const BlockMatrices& bm,
                                    const Tolerances& tol) {
    numerics::RightInverseFamily fam;
    try {
        fam = numerics::right_inverse_family(bm.X_minus, tol.rank_tol_scale);
    } catch (const RankDeficient&) {
        throw NotInformative("stabilize_algebraic: X_- is rank-deficient");
    }
    Matrix right_inverse;
    if (fam.G.cols() == 0) {
        // T = n: the right inverse is unique.
        right_inverse = fam.F;
        if (numerics::spectral_radius(bm.X_plus * right_inverse) >=
            1.0 - tol.stability_margin)
            throw NotInformative(
                "stabilize_algebraic: unique right inverse gives an unstable "
                "closed loop");
    } else {
        const Matrix Abar = bm.X_plus * fam.F;
        const Matrix Bbar = bm.X_plus * fam.G;
        const Eigen::Index n = bm.n();
        Matrix H;
        try {
            auto [P, K] = numerics::dare_solve(
                Abar, Bbar, Matrix::Identity(n, n),
                Matrix::Identity(Bbar.cols(), Bbar.cols()));
            H = K;
        } catch (const NotStabilizable&) {
            throw NotInformative(
                "stabilize_algebraic: no stabilizing right inverse exists");
        }
        right_inverse = fam.F + fam.G * H;
    }
    return finish(bm, Route::AlgebraicRightInverse, right_inverse);
}

GainCertificate deadbeat(const BlockMatrices& bm, const Tolerances& tol) {
    numerics::RightInverseFamily fam;
    try {
        fam = numerics::right_inverse_family(bm.X_minus, tol.rank_tol_scale);
    } catch (const RankDeficient&) {
        throw NotInformative("deadbeat: X_- is rank-deficient");
    }
    const Eigen::Index n = bm.n();
    Matrix right_inverse;
    if (fam.G.cols() == 0) {
        right_inverse = fam.F;
        Matrix cl = bm.X_plus * right_inverse;
        Matrix power = Matrix::Identity(n, n);
        for (Eigen::Index k = 0; k < n; ++k) power = power * cl;
        if (power.cwiseAbs().maxCoeff() > 1e-8)
            throw NotInformative(
                "deadbeat: unique right inverse is not nilpotent");
    } else {
        const Matrix Abar = bm.X_plus * fam.F;
        const Matrix Bbar = bm.X_plus * fam.G;
        Matrix H;
        try {
            H = numerics::place_spectrum(Abar, Bbar,
                                         numerics::SpectrumTarget::Origin);
        } catch (const NotDeadbeatAssignable&) {
            throw NotInformative("deadbeat: nilpotent closed loop unattainable");
        }
        right_inverse = fam.F + fam.G * H;
    }
    return finish(bm, Route::Deadbeat, right_inverse);
}

}  // namespace ddc::state_feedback
