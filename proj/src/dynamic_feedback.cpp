#include "ddc/dynamic_feedback.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <limits>
#include <string>

#include "ddc/numerics.hpp"

namespace ddc::dynamic_feedback {

using numerics::pinv;
using numerics::rank_tol;

InputReduction reduce_inputs(const Matrix& U_minus, const Tolerances& tol) {
    InputReduction red;
    const Eigen::Index m = U_minus.rows();
    const Eigen::Index T = U_minus.cols();
    if (m == 0 || T == 0) {
        red.S = Matrix(m, 0);
        red.U_hat = Matrix(0, T);
        red.S_left_inverse = Matrix(0, m);
        return red;
    }
    Eigen::JacobiSVD<Matrix> svd(U_minus,
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cutoff = tol.rank_tol_scale *
                          static_cast<double>(std::max(m, T)) *
                          std::numeric_limits<double>::epsilon() *
                          svd.singularValues()(0);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > cutoff) ++k;
    red.S = svd.matrixU().leftCols(k);
    // Resolve the SVD sign ambiguity: make the largest-magnitude entry of
    // every column positive so that the factorization is deterministic.
    for (Eigen::Index j = 0; j < k; ++j) {
        Eigen::Index imax = 0;
        red.S.col(j).cwiseAbs().maxCoeff(&imax);
        if (red.S(imax, j) < 0.0) red.S.col(j) = -red.S.col(j);
    }
    red.S_left_inverse = red.S.transpose();
    red.U_hat = red.S_left_inverse * U_minus;
    return red;
}

IsoCertificate synth_output_feedback(const BlockMatrices& bm,
                                     const Tolerances& tol) {
    if (!bm.Y_minus.has_value())
        throw MalformedProblem(
            "synth_output_feedback: output data Y_- is required");
    const Eigen::Index n = bm.n();
    const Eigen::Index T = bm.T();
    const Matrix& Y = *bm.Y_minus;

    InputReduction red = reduce_inputs(bm.U_minus, tol);
    const Eigen::Index k = red.S.cols();

    Matrix stacked(n + k, T);
    stacked.topRows(n) = bm.X_minus;
    stacked.bottomRows(k) = red.U_hat;
    if (rank_tol(stacked, tol.rank_tol_scale) != n + k)
        throw NotInformative(
            "synth_output_feedback: [X_-; U_hat_-] is not of full row rank");
    Matrix V = pinv(stacked, tol.rank_tol_scale);
    Matrix V1 = V.leftCols(n);
    Matrix V2 = V.rightCols(k);

    Matrix A_s = bm.X_plus * V1;
    Matrix B_hat = bm.X_plus * V2;   // B_s S
    Matrix C_s = Y * V1;
    Matrix D_hat = Y * V2;           // D_s S

    if (!numerics::is_stabilizable(A_s, B_hat, tol.rank_tol_scale))
        throw NotInformative(
            "synth_output_feedback: identified pair (A_s, B_s S) is not "
            "stabilizable");
    if (!numerics::is_detectable(C_s, A_s, tol.rank_tol_scale))
        throw NotInformative(
            "synth_output_feedback: identified pair (C_s, A_s) is not "
            "detectable");

    // M_hat stabilizes X_+ (V1 + V2 M_hat) = A_s + B_hat M_hat.
    Matrix M_hat;
    try {
        auto [Pm, Km] = numerics::dare_solve(A_s, B_hat,
                                             Matrix::Identity(n, n),
                                             Matrix::Identity(k, k));
        M_hat = Km;
    } catch (const Error& e) {
        throw NumericalError(std::string("synth_output_feedback: state-"
                                         "feedback gain failed: ") +
                             e.what());
    }
    // L makes (X_+ - L Y_-) V1 = A_s - L C_s stable; dual DARE on the
    // transposed pair.
    Matrix L;
    try {
        auto [Pl, Kl] = numerics::dare_solve(
            A_s.transpose(), C_s.transpose(), Matrix::Identity(n, n),
            Matrix::Identity(C_s.rows(), C_s.rows()));
        L = -Kl.transpose();
    } catch (const Error& e) {
        throw NumericalError(
            std::string("synth_output_feedback: observer gain failed: ") +
            e.what());
    }

    IsoCertificate cert;
    cert.S = red.S;
    cert.U_hat = red.U_hat;
    cert.V1 = V1;
    cert.V2 = V2;
    cert.identified.A = A_s;
    cert.identified.B = B_hat;
    cert.identified.C = C_s;
    cert.identified.D = D_hat;
    cert.compensator.K = (bm.X_plus - L * Y) * (V1 + V2 * M_hat);
    cert.compensator.L = L;
    cert.compensator.M = red.S * M_hat;

    // Cascade of any consistent plant with the compensator; by the common
    // closed loop it only depends on the identified matrices.
    Matrix cl(2 * n, 2 * n);
    cl.topLeftCorner(n, n) = A_s;
    cl.topRightCorner(n, n) = B_hat * M_hat;
    cl.bottomLeftCorner(n, n) = cert.compensator.L * C_s;
    cl.bottomRightCorner(n, n) =
        cert.compensator.K + cert.compensator.L * D_hat * M_hat;
    cert.closed_loop = cl;
    cert.closed_loop_spectrum = numerics::spectrum(cl);
    if (cert.closed_loop_spectrum.spectral_radius >= 1.0 - tol.stability_margin)
        throw NumericalError(
            "synth_output_feedback: synthesized closed loop is not stable");
    return cert;
}

StateReconstruction reconstruct_states(const Matrix& u, const Matrix& y,
                                       Eigen::Index n, Eigen::Index k,
                                       const Tolerances& tol) {
    const Eigen::Index m = u.rows();
    const Eigen::Index p = y.rows();
    const Eigen::Index T = u.cols();
    if (y.cols() != T)
        throw DimensionMismatch(
            "reconstruct_states: u and y must cover the same interval");
    if (!(k > n && 2 * k < T))
        throw DepthInvalid("reconstruct_states: requires n < k < T/2");

    Matrix Hu = hankel(u, static_cast<int>(2 * k));
    Matrix Hy = hankel(y, static_cast<int>(2 * k));
    Matrix H(Hu.rows() + Hy.rows(), Hu.cols());
    H.topRows(Hu.rows()) = Hu;
    H.bottomRows(Hy.rows()) = Hy;
    const int required = static_cast<int>(2 * k * m + n);
    const int achieved = rank_tol(H, tol.rank_tol_scale);
    if (achieved != required)
        throw RankConditionFailed(
            "reconstruct_states: stacked depth-2k Hankel rank is " +
                std::to_string(achieved) + ", need " +
                std::to_string(required),
            achieved, required);

    const Eigen::Index cols = Hu.cols();  // T - 2k + 1
    Matrix past(k * m + k * p, cols);
    past.topRows(k * m) = Hu.topRows(k * m);
    past.bottomRows(k * p) = Hy.topRows(k * p);
    Matrix future(k * m + k * p, cols);
    future.topRows(k * m) = Hu.bottomRows(k * m);
    future.bottomRows(k * p) = Hy.bottomRows(k * p);

    Matrix X_bar = numerics::rowspace_intersection(past, future,
                                                   tol.rank_tol_scale);
    StateReconstruction rec;
    rec.intersection_dimension = static_cast<int>(X_bar.rows());
    if (rec.intersection_dimension != n)
        throw RankConditionFailed(
            "reconstruct_states: past/future row-space intersection has "
            "dimension " +
                std::to_string(rec.intersection_dimension) + ", expected " +
                std::to_string(n),
            rec.intersection_dimension, static_cast<int>(n));
    rec.X_bar = X_bar;
    rec.U_bar = u.middleCols(k, T - 2 * k);
    rec.Y_bar = y.middleCols(k, T - 2 * k);
    return rec;
}

IsoCertificate synth_io_feedback(const Matrix& u, const Matrix& y,
                                 Eigen::Index n, Eigen::Index k,
                                 const Tolerances& tol) {
    StateReconstruction rec = reconstruct_states(u, y, n, k, tol);
    const Eigen::Index Tb = rec.U_bar.cols();
    BlockMatrices bm;
    bm.U_minus = rec.U_bar;
    bm.X_minus = rec.X_bar.leftCols(Tb);
    bm.X_plus = rec.X_bar.rightCols(Tb);
    bm.Y_minus = rec.Y_bar;
    return synth_output_feedback(bm, tol);
}

}  // namespace ddc::dynamic_feedback
