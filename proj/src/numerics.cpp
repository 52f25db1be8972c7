#include "ddc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace ddc::numerics {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

template <typename Mat>
int rank_from_svd_values(const Eigen::VectorXd& sv, Eigen::Index rows,
                         Eigen::Index cols, double scale) {
    if (sv.size() == 0) return 0;
    const double tol =
        scale * static_cast<double>(std::max(rows, cols)) * kEps * sv(0);
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) ++r;
    return r;
}

}  // namespace

int rank_tol(const Matrix& M, double scale) {
    if (M.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(M);
    return rank_from_svd_values<Matrix>(svd.singularValues(), M.rows(),
                                        M.cols(), scale);
}

int rank_tol(const ComplexMatrix& M, double scale) {
    if (M.size() == 0) return 0;
    Eigen::JacobiSVD<ComplexMatrix> svd(M);
    return rank_from_svd_values<ComplexMatrix>(svd.singularValues(), M.rows(),
                                               M.cols(), scale);
}

Matrix left_nullspace_basis(const Matrix& M, double rank_scale) {
    if (M.cols() == 0) return Matrix::Identity(M.rows(), M.rows());
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU);
    const int r = rank_from_svd_values<Matrix>(svd.singularValues(), M.rows(),
                                               M.cols(), rank_scale);
    const Eigen::Index d = M.rows() - r;
    Matrix basis(d, M.rows());
    basis = svd.matrixU().rightCols(d).transpose();
    return basis;
}

Matrix nullspace_basis(const Matrix& M, double rank_scale) {
    if (M.rows() == 0) return Matrix::Identity(M.cols(), M.cols());
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
    const int r = rank_from_svd_values<Matrix>(svd.singularValues(), M.rows(),
                                               M.cols(), rank_scale);
    return svd.matrixV().rightCols(M.cols() - r);
}

Matrix pinv(const Matrix& M, double rank_scale) {
    if (M.size() == 0) return Matrix(M.cols(), M.rows());
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const int r = rank_from_svd_values<Matrix>(sv, M.rows(), M.cols(),
                                               rank_scale);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (int i = 0; i < r; ++i) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

SpectrumReport spectrum(const Matrix& M) {
    if (M.rows() != M.cols()) throw NonSquare("spectrum: matrix is not square");
    SpectrumReport rep;
    if (M.rows() == 0) return rep;
    Eigen::EigenSolver<Matrix> es(M, /*computeEigenvectors=*/false);
    rep.eigenvalues.resize(M.rows());
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        rep.eigenvalues[i] = es.eigenvalues()(i);
        rep.spectral_radius =
            std::max(rep.spectral_radius, std::abs(rep.eigenvalues[i]));
    }
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
                  return a.imag() > b.imag();
              });
    return rep;
}

double spectral_radius(const Matrix& M) { return spectrum(M).spectral_radius; }

RightInverseFamily right_inverse_family(const Matrix& X_minus,
                                        double rank_scale) {
    const Eigen::Index n = X_minus.rows();
    if (rank_tol(X_minus, rank_scale) != n)
        throw RankDeficient("right_inverse_family: X_- is not of full row rank");
    RightInverseFamily fam;
    fam.F = pinv(X_minus, rank_scale);
    fam.G = nullspace_basis(X_minus, rank_scale);
    return fam;
}

namespace {

bool hautus_rank_ok(const Matrix& A, const Matrix& B,
                    const std::complex<double>& lambda, double rank_scale) {
    const Eigen::Index n = A.rows();
    ComplexMatrix H(n, n + B.cols());
    H.leftCols(n) = A.cast<std::complex<double>>();
    for (Eigen::Index i = 0; i < n; ++i) H(i, i) -= lambda;
    H.rightCols(B.cols()) = B.cast<std::complex<double>>();
    return rank_tol(H, rank_scale) == n;
}

void check_weights(const Matrix& A, const Matrix& B, const Matrix& Q,
                   const Matrix& R) {
    const Eigen::Index n = A.rows();
    const Eigen::Index m = B.cols();
    if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
        R.rows() != m || R.cols() != m)
        throw DimensionMismatch("dare_solve: inconsistent dimensions");
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1 + Q.norm()) ||
        (R - R.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1 + R.norm()))
        throw MalformedProblem("dare_solve: Q and R must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> esq(Q);
    if (esq.eigenvalues().minCoeff() < -1e-10)
        throw MalformedProblem("dare_solve: Q must be positive semidefinite");
    Eigen::SelfAdjointEigenSolver<Matrix> esr(R);
    if (esr.eigenvalues().minCoeff() < 1e-10)
        throw MalformedProblem("dare_solve: R must be positive definite");
}

Matrix dare_value_iteration(const Matrix& A, const Matrix& B, const Matrix& Q,
                            const Matrix& R, Matrix P, int max_iter) {
    for (int it = 0; it < max_iter; ++it) {
        Matrix BtP = B.transpose() * P;
        Matrix S = R + BtP * B;
        Matrix next = A.transpose() * P * A -
                      (BtP * A).transpose() * S.ldlt().solve(BtP * A) + Q;
        next = 0.5 * (next + next.transpose());
        if (!next.allFinite()) break;
        const double diff = (next - P).cwiseAbs().maxCoeff();
        P = next;
        if (diff < 1e-12 * (1.0 + P.cwiseAbs().maxCoeff())) break;
    }
    return P;
}

double dare_residual(const Matrix& A, const Matrix& B, const Matrix& Q,
                     const Matrix& R, const Matrix& P) {
    Matrix BtP = B.transpose() * P;
    Matrix S = R + BtP * B;
    Matrix res =
        A.transpose() * P * A -
        (BtP * A).transpose() * S.ldlt().solve(BtP * A) + Q - P;
    return res.cwiseAbs().maxCoeff();
}

}  // namespace

std::pair<Matrix, Matrix> dare_solve(const Matrix& A, const Matrix& B,
                                     const Matrix& Q, const Matrix& R) {
    check_weights(A, B, Q, R);
    const Eigen::Index n = A.rows();

    SpectrumReport spec = spectrum(A);
    for (const auto& lam : spec.eigenvalues) {
        if (std::abs(lam) >= 1.0 - 1e-9 && !hautus_rank_ok(A, B, lam, 1.0))
            throw NotStabilizable("dare_solve: (A,B) is not stabilizable");
        if (std::abs(std::abs(lam) - 1.0) < 1e-7) {
            // Unit-circle eigenvalue: must be (Q,A)-observable.
            ComplexMatrix H(2 * n, n);
            H.topRows(n) = A.cast<std::complex<double>>();
            for (Eigen::Index i = 0; i < n; ++i) H(i, i) -= lam;
            H.bottomRows(n) = Q.cast<std::complex<double>>();
            if (rank_tol(H) != n)
                throw UnobservableUnitCircleMode(
                    "dare_solve: unit-circle eigenvalue not (Q,A)-observable");
        }
    }

    // Structure-preserving doubling.
    Matrix Ak = A;
    Matrix Gk = B * R.ldlt().solve(B.transpose());
    Matrix Hk = Q;
    const Matrix I = Matrix::Identity(n, n);
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
        Eigen::PartialPivLU<Matrix> lu(I + Gk * Hk);
        Matrix W_inv_A = lu.solve(Ak);
        Matrix W_inv_G = lu.solve(Gk);
        Matrix Hn = Hk + Ak.transpose() * Hk * W_inv_A;
        Matrix Gn = Gk + Ak * W_inv_G * Ak.transpose();
        Matrix An = Ak * W_inv_A;
        Hn = 0.5 * (Hn + Hn.transpose());
        Gn = 0.5 * (Gn + Gn.transpose());
        const double diff = (Hn - Hk).cwiseAbs().maxCoeff();
        Ak = An;
        Gk = Gn;
        Hk = Hn;
        if (diff < 1e-13 * (1.0 + Hk.cwiseAbs().maxCoeff())) {
            converged = true;
            break;
        }
    }
    Matrix P = 0.5 * (Hk + Hk.transpose());
    auto gain_of = [&](const Matrix& Pc) -> Matrix {
        Matrix S = R + B.transpose() * Pc * B;
        return -S.ldlt().solve(B.transpose() * Pc * A);
    };
    Matrix K = gain_of(P);
    if (!converged || !P.allFinite() || spectral_radius(A + B * K) >= 1.0) {
        P = dare_value_iteration(A, B, Q, R, Q, 200000);
        P = 0.5 * (P + P.transpose());
        K = gain_of(P);
    }
    if (!P.allFinite() || spectral_radius(A + B * K) >= 1.0)
        throw NumericalError("dare_solve: closed loop not stable");

    // Newton (Kleinman) polish: with a stabilizing gain in hand, each step
    // solves one Stein equation and converges quadratically. Keep the best
    // iterate in case a late step degrades numerically.
    Matrix best_P = P;
    Matrix best_K = K;
    double best_rel = dare_residual(A, B, Q, R, P) /
                      (1.0 + P.cwiseAbs().maxCoeff());
    for (int it = 0; it < 25 && best_rel > 1e-13; ++it) {
        Matrix W = Q + K.transpose() * R * K;
        Matrix Pn;
        try {
            Pn = lyapunov_solve(A + B * K, W);
        } catch (const Error&) {
            break;
        }
        P = 0.5 * (Pn + Pn.transpose());
        K = gain_of(P);
        if (!P.allFinite() || spectral_radius(A + B * K) >= 1.0) break;
        const double rel = dare_residual(A, B, Q, R, P) /
                           (1.0 + P.cwiseAbs().maxCoeff());
        if (rel < best_rel) {
            best_rel = rel;
            best_P = P;
            best_K = K;
        } else {
            break;
        }
    }
    P = best_P;
    K = best_K;
    // The attainable residual scales with the conditioning of the gain
    // computation; ill-conditioned instances cannot reach the nominal gate.
    const double rel_gate =
        std::max(1e-9, 10.0 * kEps * (1.0 + K.squaredNorm() +
                                      (A + B * K).squaredNorm()));
    if (dare_residual(A, B, Q, R, P) >
        rel_gate * (1.0 + P.cwiseAbs().maxCoeff()))
        throw NumericalError("dare_solve: residual tolerance not met");
    return {P, K};
}

Matrix lyapunov_solve(const Matrix& M, const Matrix& W) {
    if (M.rows() != M.cols() || W.rows() != W.cols() || M.rows() != W.rows())
        throw DimensionMismatch("lyapunov_solve: dimension mismatch");
    if (spectral_radius(M) >= 1.0)
        throw Unstable("lyapunov_solve: M is not Schur-stable");
    const Eigen::Index n = M.rows();
    Matrix P;
    if (n <= 40) {
        // Direct solve of (I - M^T (x) M^T) vec(P) = vec(W); more accurate
        // than iteration when the spectral radius is close to one.
        const Eigen::Index n2 = n * n;
        Matrix Mt = M.transpose();
        Matrix L = Matrix::Identity(n2, n2);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                L.block(i * n, j * n, n, n) -= Mt(i, j) * Mt;
        Matrix Ws = 0.5 * (W + W.transpose());
        Vector vecW = Eigen::Map<const Vector>(Ws.data(), n2);
        Vector vecP = L.partialPivLu().solve(vecW);
        P = Eigen::Map<const Matrix>(vecP.data(), n, n);
    } else {
        // Smith doubling: P = sum_k (M^T)^k W M^k.
        P = 0.5 * (W + W.transpose());
        Matrix E = M;
        for (int it = 0; it < 200; ++it) {
            Matrix term = E.transpose() * P * E;
            P += term;
            if (term.cwiseAbs().maxCoeff() <
                    1e-16 * (1.0 + P.cwiseAbs().maxCoeff()) &&
                it > 2)
                break;
            E = E * E;
            if (E.cwiseAbs().maxCoeff() < 1e-300) break;
        }
    }
    P = 0.5 * (P + P.transpose());
    if ((P - M.transpose() * P * M - 0.5 * (W + W.transpose()))
            .cwiseAbs()
            .maxCoeff() > 1e-10 * (1.0 + P.cwiseAbs().maxCoeff()))
        throw NumericalError("lyapunov_solve: residual tolerance not met");
    return P;
}

namespace {

// Orthonormal basis of the controllable subspace of (A,B), built stage by
// stage from range(B).
Matrix controllable_subspace(const Matrix& A, const Matrix& B,
                             double rank_scale) {
    const Eigen::Index n = A.rows();
    Matrix V(n, 0);
    if (B.cols() == 0) return V;
    Matrix stage = B;
    while (V.cols() < n) {
        Matrix resid = stage;
        if (V.cols() > 0) resid -= V * (V.transpose() * stage);
        Eigen::JacobiSVD<Matrix> svd(resid, Eigen::ComputeThinU);
        const Eigen::VectorXd& sv = svd.singularValues();
        double base = std::max(1.0, stage.cwiseAbs().maxCoeff());
        int r = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > rank_scale * n * 1e2 * kEps * base) ++r;
        if (r == 0) break;
        Matrix Vn(n, V.cols() + r);
        Vn << V, svd.matrixU().leftCols(r);
        // Re-orthonormalize against accumulated roundoff.
        Eigen::HouseholderQR<Matrix> qr(Vn);
        V = qr.householderQ() * Matrix::Identity(n, Vn.cols());
        stage = A * svd.matrixU().leftCols(r);
    }
    return V;
}

// Heymann reduction: for a controllable pair, returns (F, v) such that
// (A + B*F, B*v) is controllable with a single input.
std::pair<Matrix, Vector> heymann_reduce(const Matrix& A, const Matrix& B) {
    const Eigen::Index n = A.rows();
    const Eigen::Index m = B.cols();
    // Start from the widest column of B.
    Eigen::Index j0 = 0;
    B.colwise().norm().maxCoeff(&j0);
    Vector v = Vector::Zero(m);
    v(j0) = 1.0;
    Vector b = B * v;

    Matrix X(n, n);
    Matrix U = Matrix::Zero(m, n);
    X.col(0) = b;
    std::mt19937 rng(12345);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        bool placed = false;
        for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
            Vector u = Vector::Zero(m);
            if (attempt == 0) {
                // keep u = 0
            } else if (attempt <= m) {
                u(attempt - 1) = 1.0;
            } else {
                for (Eigen::Index j = 0; j < m; ++j) u(j) = gauss(rng);
            }
            Vector cand = A * X.col(k) + B * u;
            Matrix trial(n, k + 2);
            trial.leftCols(k + 1) = X.leftCols(k + 1);
            trial.col(k + 1) = cand;
            if (rank_tol(trial) == k + 2) {
                X.col(k + 1) = cand;
                U.col(k) = u;
                placed = true;
            }
        }
        if (!placed)
            throw NumericalError("heymann_reduce: chain construction failed");
    }
    // F X = U (last column of U free, taken as zero).
    Matrix F = U * X.inverse();
    return {F, v};
}

// Single-input Ackermann placement of all eigenvalues at the origin.
Eigen::RowVectorXd ackermann_origin(const Matrix& A, const Vector& b) {
    const Eigen::Index n = A.rows();
    Matrix C(n, n);
    Vector col = b;
    for (Eigen::Index k = 0; k < n; ++k) {
        C.col(k) = col;
        col = A * col;
    }
    Matrix An = Matrix::Identity(n, n);
    for (Eigen::Index k = 0; k < n; ++k) An = An * A;
    Vector en = Vector::Zero(n);
    en(n - 1) = 1.0;
    Eigen::RowVectorXd last_row =
        C.transpose().partialPivLu().solve(en).transpose();
    return -last_row * An;
}

}  // namespace

Matrix place_spectrum(const Matrix& A, const Matrix& B, SpectrumTarget target) {
    if (A.rows() != A.cols() || B.rows() != A.rows())
        throw DimensionMismatch("place_spectrum: dimension mismatch");
    const Eigen::Index n = A.rows();
    const Eigen::Index m = B.cols();
    if (n == 0) return Matrix(m, 0);

    Matrix Vc = controllable_subspace(A, B, 1.0);
    const Eigen::Index nc = Vc.cols();
    Matrix Vu = nullspace_basis(Vc.transpose());  // n x (n-nc), orthonormal
    Matrix T(n, n);
    T << Vc, Vu;

    Matrix At = T.transpose() * A * T;
    Matrix Bt = T.transpose() * B;
    Matrix A22 = At.bottomRightCorner(n - nc, n - nc);
    if (n > nc) {
        SpectrumReport rep = spectrum(A22);
        if (target == SpectrumTarget::Origin && rep.spectral_radius > 1e-8)
            throw NotDeadbeatAssignable(
                "place_spectrum: uncontrollable modes are not at the origin");
        if (target == SpectrumTarget::UnitDisk &&
            rep.spectral_radius >= 1.0 - 1e-9)
            throw NotStabilizable(
                "place_spectrum: uncontrollable modes outside the unit disk");
    }

    Matrix M = Matrix::Zero(m, n);
    if (nc > 0) {
        Matrix A11 = At.topLeftCorner(nc, nc);
        Matrix B1 = Bt.topRows(nc);
        Matrix F1;
        if (m == 1) {
            F1 = ackermann_origin(A11, B1.col(0));
        } else {
            auto [F, v] = heymann_reduce(A11, B1);
            Eigen::RowVectorXd f = ackermann_origin(A11 + B1 * F, B1 * v);
            F1 = F + v * f;
        }
        Matrix Mt = Matrix::Zero(m, n);
        Mt.leftCols(nc) = F1;
        M = Mt * T.transpose();
    }

    if (target == SpectrumTarget::Origin) {
        Matrix cl = A + B * M;
        Matrix power = Matrix::Identity(n, n);
        for (Eigen::Index k = 0; k < n; ++k) power = power * cl;
        if (power.cwiseAbs().maxCoeff() > 1e-8)
            throw NotDeadbeatAssignable(
                "place_spectrum: nilpotency tolerance not met");
    } else {
        if (spectral_radius(A + B * M) >= 1.0 - 1e-6)
            throw NumericalError("place_spectrum: closed loop not stable");
    }
    return M;
}

Matrix rowspace_intersection(const Matrix& A, const Matrix& B,
                             double rank_scale) {
    if (A.cols() != B.cols())
        throw DimensionMismatch("rowspace_intersection: column counts differ");
    const Eigen::Index c = A.cols();

    auto row_basis = [&](const Matrix& M) -> Matrix {
        Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinV);
        const int r = rank_from_svd_values<Matrix>(svd.singularValues(),
                                                   M.rows(), M.cols(),
                                                   rank_scale);
        return svd.matrixV().leftCols(r).transpose();
    };
    Matrix Qa = row_basis(A);
    Matrix Qb = row_basis(B);
    if (Qa.rows() == 0 || Qb.rows() == 0) return Matrix(0, c);

    Eigen::JacobiSVD<Matrix> svd(Qa * Qb.transpose(),
                                 Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& cosines = svd.singularValues();
    int d = 0;
    for (Eigen::Index i = 0; i < cosines.size(); ++i)
        if (cosines(i) > 1.0 - 1e-8) ++d;
    if (d == 0) return Matrix(0, c);

    // Average the aligned principal vectors from both sides.
    Matrix basis(d, c);
    for (int i = 0; i < d; ++i) {
        Vector wa = Qa.transpose() * svd.matrixU().col(i);
        Vector wb = Qb.transpose() * svd.matrixV().col(i);
        basis.row(i) = 0.5 * (wa + wb).transpose();
    }
    Eigen::HouseholderQR<Matrix> qr(basis.transpose());
    Matrix Q = qr.householderQ() * Matrix::Identity(c, d);
    return Q.transpose();
}

bool is_stabilizable(const Matrix& A, const Matrix& B, double rank_scale) {
    for (const auto& lam : spectrum(A).eigenvalues)
        if (std::abs(lam) >= 1.0 - 1e-9 &&
            !hautus_rank_ok(A, B, lam, rank_scale))
            return false;
    return true;
}

bool is_controllable(const Matrix& A, const Matrix& B, double rank_scale) {
    for (const auto& lam : spectrum(A).eigenvalues)
        if (!hautus_rank_ok(A, B, lam, rank_scale)) return false;
    return true;
}

bool is_detectable(const Matrix& C, const Matrix& A, double rank_scale) {
    return is_stabilizable(A.transpose(), C.transpose(), rank_scale);
}

}  // namespace ddc::numerics
