#pragma once

#include <optional>

#include "ddc/data.hpp"
#include "ddc/types.hpp"

namespace ddc::lqr {

struct LqrWeights {
    Matrix Q;  // n x n, symmetric positive semidefinite
    Matrix R;  // m x m, symmetric positive definite

    void validate(Eigen::Index n, Eigen::Index m) const;
};

enum class LqrBranch { SysIdBranch, PathologicalBranch };

struct LqrVerdict {
    bool informative = false;
    std::optional<LqrBranch> branch;
};

struct LqrCertificate {
    Matrix K;
    Matrix P_plus;
    LqrBranch branch = LqrBranch::SysIdBranch;
    std::optional<Matrix> right_inverse;  // X_-^dag used on the sysid branch
    std::optional<Matrix> theta;          // witness on the pathological branch
};

// Model-based solvability: (A,B) stabilizable and every unit-circle
// eigenvalue of A is (Q,A)-observable.
bool lqr_solvable(const Matrix& A, const Matrix& B, const LqrWeights& w,
                  const Tolerances& tol = {});

// Informativity for linear quadratic regulation: either the data identify
// the system and the LQR problem is solvable for it, or the pathological
// branch holds (A common and stable, QA = 0, optimal gain 0).
LqrVerdict informative_for_lqr(const BlockMatrices& bm, const LqrWeights& w,
                               const Tolerances& tol = {});

// Optimal gain directly from data: trace-maximize P subject to P >= 0 and
// L(P) <= 0, then solve {X_- X_-^dag = I, L(P+) X_-^dag = 0} and return
// K = U_- X_-^dag.
LqrCertificate gain_from_data(const BlockMatrices& bm, const LqrWeights& w,
                              const Tolerances& tol = {});

// The linear operator of the data-driven trace-max program.
Matrix cost_operator(const BlockMatrices& bm, const LqrWeights& w,
                     const Matrix& P);

}  // namespace ddc::lqr
