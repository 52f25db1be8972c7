#include "ddc/analysis.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "ddc/numerics.hpp"

namespace ddc::analysis {

namespace {

using numerics::pinv;
using numerics::rank_tol;

Matrix stacked_data(const BlockMatrices& bm) {
    Matrix S(bm.n() + bm.m(), bm.T());
    S.topRows(bm.n()) = bm.X_minus;
    S.bottomRows(bm.m()) = bm.U_minus;
    return S;
}

// Rayleigh refinement of a rank-drop candidate: alternate between the
// smallest left singular vector w of X_+ - lambda X_- and the least-squares
// lambda with w^H X_+ ~ lambda w^H X_-. Eigenvalue candidates computed from
// pseudoinverses carry errors amplified by the data magnitude; a couple of
// these steps restores them to the actual rank-drop location.
std::complex<double> refine_lambda(const BlockMatrices& bm,
                                   std::complex<double> lambda) {
    const ComplexMatrix Xp = bm.X_plus.cast<std::complex<double>>();
    const ComplexMatrix Xm = bm.X_minus.cast<std::complex<double>>();
    for (int it = 0; it < 3; ++it) {
        ComplexMatrix M = Xp - lambda * Xm;
        Eigen::JacobiSVD<ComplexMatrix> svd(M, Eigen::ComputeThinU);
        const Eigen::Index last = svd.matrixU().cols() - 1;
        if (last < 0) break;
        Eigen::RowVectorXcd a = svd.matrixU().col(last).adjoint() * Xp;
        Eigen::RowVectorXcd b = svd.matrixU().col(last).adjoint() * Xm;
        const std::complex<double> denom = (b * b.adjoint())(0, 0);
        if (std::abs(denom) < 1e-300) break;
        lambda = (a * b.adjoint())(0, 0) / denom;
    }
    return lambda;
}

// Rank of X_+ - lambda X_-, with the cutoff referenced to the magnitudes of
// X_+ and lambda X_- themselves: the difference can be small through exact
// cancellation, and rounding noise of order eps * |data| must not count.
int rank_at_lambda(const BlockMatrices& bm, const std::complex<double>& lambda,
                   double scale) {
    ComplexMatrix M = bm.X_plus.cast<std::complex<double>>() -
                      lambda * bm.X_minus.cast<std::complex<double>>();
    Eigen::JacobiSVD<ComplexMatrix> svd(M);
    const double ref =
        bm.X_plus.norm() + std::abs(lambda) * bm.X_minus.norm();
    const double cutoff = scale *
                          static_cast<double>(std::max(M.rows(), M.cols())) *
                          std::numeric_limits<double>::epsilon() * ref;
    int r = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > cutoff) ++r;
    return r;
}

// Builds a witness from a failed Hautus candidate. If rank(X_+ - lambda X_-)
// drops with left null vector w, every consistent (A, B) satisfies
// (w^T A - lambda w^T) X_- + w^T B U_- = 0; projecting the identified system
// onto w^T A = lambda w^T, w^T B = 0 yields a consistent member with an
// exact uncontrollable mode at lambda.
std::optional<SystemModel> witness_from_candidate(
    const BlockMatrices& bm, const Tolerances& tol,
    const std::complex<double>& lambda,
    const std::function<bool(const Matrix&, const Matrix&)>& violates) {
    const Eigen::Index n = bm.n();
    const Eigen::Index m = bm.m();
    Matrix S(n + m, bm.T());
    S.topRows(n) = bm.X_minus;
    S.bottomRows(m) = bm.U_minus;
    Matrix AB = bm.X_plus * pinv(S, tol.rank_tol_scale);
    Matrix A = AB.leftCols(n);
    Matrix B = AB.rightCols(m);

    ComplexMatrix M = bm.X_plus.cast<std::complex<double>>() -
                      lambda * bm.X_minus.cast<std::complex<double>>();
    Eigen::JacobiSVD<ComplexMatrix> svd(M, Eigen::ComputeThinU);
    const Eigen::Index last = svd.matrixU().cols() - 1;
    if (last < 0) return std::nullopt;
    Eigen::VectorXcd w = svd.matrixU().col(last);
    Eigen::Index imax = 0;
    w.cwiseAbs().maxCoeff(&imax);
    w *= std::conj(w(imax)) / std::abs(w(imax));  // fix the phase

    Matrix W;
    Matrix Lam;
    if (std::abs(lambda.imag()) < 1e-12 * (1.0 + std::abs(lambda))) {
        W = w.real();
        W /= W.norm();
        Lam = Matrix{{lambda.real()}};
    } else {
        W.resize(n, 2);
        W.col(0) = w.real();
        W.col(1) = w.imag();
        Lam.resize(2, 2);
        Lam << lambda.real(), lambda.imag(), -lambda.imag(), lambda.real();
    }
    Eigen::PartialPivLU<Matrix> gram(W.transpose() * W);
    A -= W * gram.solve(W.transpose() * A - Lam * W.transpose());
    B -= W * gram.solve(W.transpose() * B);
    if (!violates(A, B)) return std::nullopt;
    SystemModel sys;
    sys.A = std::move(A);
    sys.B = std::move(B);
    return sys;
}

// Searches the affine family X_+ pinv([X_-;U_-]) + C * N for a member that
// violates `bad`, where the rows of N span the left null space of the
// stacked data matrix. Returns the first violator found.
std::optional<SystemModel> find_witness(
    const BlockMatrices& bm, const Tolerances& tol,
    const std::function<bool(const Matrix&, const Matrix&)>& violates) {
    const Eigen::Index n = bm.n();
    const Eigen::Index m = bm.m();
    const Matrix S = stacked_data(bm);
    const Matrix part = bm.X_plus * pinv(S, tol.rank_tol_scale);
    const Matrix N = numerics::left_nullspace_basis(S, tol.rank_tol_scale);
    const Eigen::Index d = N.rows();

    std::mt19937 rng(20200317);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int attempt = 0; attempt < 50; ++attempt) {
        Matrix AB = part;
        if (attempt > 0) {
            if (d == 0) break;
            const double sigma = std::pow(10.0, (attempt % 5));
            Matrix C(n, d);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < d; ++j) C(i, j) = sigma * gauss(rng);
            AB += C * N;
        }
        Matrix A = AB.leftCols(n);
        Matrix B = AB.rightCols(m);
        if (violates(A, B)) {
            SystemModel w;
            w.A = A;
            w.B = B;
            return w;
        }
    }
    return std::nullopt;
}

}  // namespace

AnalysisVerdict informative_sysid(const BlockMatrices& bm,
                                  const Tolerances& tol) {
    AnalysisVerdict v;
    v.property = Property::SysId;
    const Matrix S = stacked_data(bm);
    const Eigen::Index n = bm.n(), m = bm.m();
    v.informative = rank_tol(S, tol.rank_tol_scale) == n + m;
    if (v.informative) {
        Matrix V = pinv(S, tol.rank_tol_scale);
        v.V1 = V.leftCols(n);
        v.V2 = V.rightCols(m);
        SystemModel sys;
        sys.A = bm.X_plus * v.V1;
        sys.B = bm.X_plus * v.V2;
        v.identified = std::move(sys);
    }
    return v;
}

AnalysisVerdict informative_controllability(const BlockMatrices& bm,
                                            const Tolerances& tol) {
    AnalysisVerdict v;
    v.property = Property::Controllability;
    const Eigen::Index n = bm.n();

    bool all_pass = true;
    {
        HautusCandidate c0;
        c0.lambda = 0.0;
        c0.rank = rank_tol(bm.X_plus, tol.rank_tol_scale);
        c0.passed = c0.rank == n;
        all_pass = all_pass && c0.passed;
        v.candidates.push_back(c0);
    }
    if (all_pass) {
        // Finite check: lambda != 0 with 1/lambda an eigenvalue of X_- X_+^dag.
        Matrix Xp_dag = pinv(bm.X_plus, tol.rank_tol_scale);
        SpectrumReport rep = numerics::spectrum(bm.X_minus * Xp_dag);
        for (const auto& mu : rep.eigenvalues) {
            if (std::abs(mu) < 1e-12) continue;
            HautusCandidate c;
            c.lambda = refine_lambda(bm, 1.0 / mu);
            c.rank = rank_at_lambda(bm, c.lambda, tol.rank_tol_scale);
            c.passed = c.rank == n;
            all_pass = all_pass && c.passed;
            v.candidates.push_back(c);
        }
    }
    v.informative = all_pass;
    if (!v.informative) {
        auto bad = [&](const Matrix& A, const Matrix& B) {
            return !numerics::is_controllable(A, B, tol.rank_tol_scale);
        };
        for (const auto& c : v.candidates) {
            if (c.passed) continue;
            v.witness = witness_from_candidate(bm, tol, c.lambda, bad);
            if (v.witness) break;
        }
        if (!v.witness) v.witness = find_witness(bm, tol, bad);
    }
    return v;
}

AnalysisVerdict informative_stabilizability(const BlockMatrices& bm,
                                            const Tolerances& tol) {
    AnalysisVerdict v;
    v.property = Property::Stabilizability;
    const Eigen::Index n = bm.n();

    Matrix diff = bm.X_plus - bm.X_minus;
    bool all_pass = true;
    {
        HautusCandidate c1;
        c1.lambda = 1.0;
        c1.rank = rank_tol(diff, tol.rank_tol_scale);
        c1.passed = c1.rank == n;
        all_pass = all_pass && c1.passed;
        v.candidates.push_back(c1);
    }
    if (all_pass) {
        Matrix diff_dag = pinv(diff, tol.rank_tol_scale);
        SpectrumReport rep = numerics::spectrum(bm.X_minus * diff_dag);
        for (const auto& mu : rep.eigenvalues) {
            if (std::abs(mu) < 1e-12) continue;
            std::complex<double> lambda =
                refine_lambda(bm, 1.0 + 1.0 / mu);
            // Only candidates on or outside the unit circle matter, with
            // slack toward inclusion.
            if (std::abs(lambda) < 1.0 - tol.stability_margin) continue;
            HautusCandidate c;
            c.lambda = lambda;
            c.rank = rank_at_lambda(bm, lambda, tol.rank_tol_scale);
            c.passed = c.rank == n;
            all_pass = all_pass && c.passed;
            v.candidates.push_back(c);
        }
    }
    v.informative = all_pass;
    if (!v.informative) {
        auto bad = [&](const Matrix& A, const Matrix& B) {
            return !numerics::is_stabilizable(A, B, tol.rank_tol_scale);
        };
        for (const auto& c : v.candidates) {
            if (c.passed) continue;
            v.witness = witness_from_candidate(bm, tol, c.lambda, bad);
            if (v.witness) break;
        }
        if (!v.witness) v.witness = find_witness(bm, tol, bad);
    }
    return v;
}

AnalysisVerdict informative_stability(const BlockMatrices& bm,
                                      const Tolerances& tol) {
    if (bm.m() != 0)
        throw MalformedProblem(
            "informative_stability: requires autonomous data (no inputs)");
    AnalysisVerdict v;
    v.property = Property::Stability;
    const Eigen::Index n = bm.n();

    if (rank_tol(bm.X_minus, tol.rank_tol_scale) != n) {
        v.informative = false;
        v.witness = find_witness(bm, tol, [&](const Matrix& A, const Matrix&) {
            return numerics::spectral_radius(A) >= 1.0;
        });
        return v;
    }
    Matrix A_s = bm.X_plus * pinv(bm.X_minus, tol.rank_tol_scale);
    SpectrumReport rep = numerics::spectrum(A_s);
    v.closed_spectrum = rep;
    SystemModel sys;
    sys.A = A_s;
    sys.B = Matrix(n, 0);
    v.identified = std::move(sys);
    v.informative = rep.spectral_radius < 1.0 - tol.stability_margin;
    if (!v.informative) v.witness = v.identified;
    return v;
}

bool hautus_observable(const Matrix& Q, const Matrix& A,
                       const std::complex<double>& lambda,
                       const Tolerances& tol) {
    const Eigen::Index n = A.rows();
    ComplexMatrix H(n + Q.rows(), n);
    H.topRows(n) = A.cast<std::complex<double>>();
    for (Eigen::Index i = 0; i < n; ++i) H(i, i) -= lambda;
    H.bottomRows(Q.rows()) = Q.cast<std::complex<double>>();
    return rank_tol(H, tol.rank_tol_scale) == n;
}

}  // namespace ddc::analysis
