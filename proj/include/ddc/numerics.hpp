#pragma once

#include <utility>

#include "ddc/types.hpp"

namespace ddc::numerics {

// Numerical rank via SVD with tolerance max(rows,cols) * eps * sigma_max,
// optionally scaled. The zero matrix has rank 0.
int rank_tol(const Matrix& M, double scale = 1.0);
int rank_tol(const ComplexMatrix& M, double scale = 1.0);

// Orthonormal rows spanning { v : v^T M = 0 }. Row count is
// rows(M) - rank_tol(M).
Matrix left_nullspace_basis(const Matrix& M, double rank_scale = 1.0);

// Orthonormal columns spanning ker(M).
Matrix nullspace_basis(const Matrix& M, double rank_scale = 1.0);

// Moore-Penrose pseudoinverse.
Matrix pinv(const Matrix& M, double rank_scale = 1.0);

SpectrumReport spectrum(const Matrix& M);
double spectral_radius(const Matrix& M);

// Parametrization of all right inverses of a full-row-rank X_-: every right
// inverse equals F + G*H for exactly one H. G is T x (T-n), empty when T = n.
struct RightInverseFamily {
    Matrix F;
    Matrix G;
};

RightInverseFamily right_inverse_family(const Matrix& X_minus,
                                        double rank_scale = 1.0);

// Largest real symmetric solution of
//   P = A'PA - A'PB (R + B'PB)^{-1} B'PA + Q
// together with the gain K = -(R + B'P B)^{-1} B'P A.  Requires (A,B)
// stabilizable and every unit-circle eigenvalue of A to be (Q,A)-observable.
std::pair<Matrix, Matrix> dare_solve(const Matrix& A, const Matrix& B,
                                     const Matrix& Q, const Matrix& R);

// Unique P with P - M'PM = W for a Schur-stable M.
Matrix lyapunov_solve(const Matrix& M, const Matrix& W);

enum class SpectrumTarget { UnitDisk, Origin };

// Feedback M such that the spectrum of A + B*M lies in the requested region.
// Origin placement makes A + B*M nilpotent and requires every uncontrollable
// eigenvalue of (A,B) to be zero.
Matrix place_spectrum(const Matrix& A, const Matrix& B, SpectrumTarget target);

// Orthonormal-row basis of rs(A) n rs(B), via principal angles.
Matrix rowspace_intersection(const Matrix& A, const Matrix& B,
                             double rank_scale = 1.0);

// Model-based Hautus tests, shared by analysis and synthesis code.
bool is_stabilizable(const Matrix& A, const Matrix& B, double rank_scale = 1.0);
bool is_controllable(const Matrix& A, const Matrix& B, double rank_scale = 1.0);
bool is_detectable(const Matrix& C, const Matrix& A, double rank_scale = 1.0);

}  // namespace ddc::numerics
