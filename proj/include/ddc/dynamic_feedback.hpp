#pragma once

#include "ddc/data.hpp"
#include "ddc/types.hpp"

namespace ddc::dynamic_feedback {

// Dynamic measurement-feedback controller of order w = n:
//   w(t+1) = K w(t) + L y(t),   u(t) = M w(t).
struct Compensator {
    Matrix K;  // n x n
    Matrix L;  // n x p
    Matrix M;  // m x n
};

// Input compression U_- = S * U_hat with U_hat of full row rank k.
struct InputReduction {
    Matrix S;               // m x k, full column rank (orthonormal columns)
    Matrix U_hat;           // k x T
    Matrix S_left_inverse;  // k x m, S_left_inverse * S = I_k
};

struct IsoCertificate {
    Matrix S;
    Matrix U_hat;
    Matrix V1;  // T x n
    Matrix V2;  // T x k
    SystemModel identified;  // (A_s, B_s S, C_s, D_s S)
    Compensator compensator;
    Matrix closed_loop;  // 2n x 2n plant/controller cascade
    SpectrumReport closed_loop_spectrum;
};

// State sequence recovered from input/output data up to similarity.
struct StateReconstruction {
    Matrix X_bar;  // n x (T - 2k + 1), states x(k..T-k) in unknown coordinates
    Matrix U_bar;  // m x (T - 2k), inputs u(k..T-k-1)
    Matrix Y_bar;  // p x (T - 2k), outputs y(k..T-k-1)
    int intersection_dimension = 0;
};

InputReduction reduce_inputs(const Matrix& U_minus,
                             const Tolerances& tol = {});

// Observer-based stabilization from input/state/output data. Requires Y_-.
IsoCertificate synth_output_feedback(const BlockMatrices& bm,
                                     const Tolerances& tol = {});

// Recovers the state sequence from a single input/output record via the
// row-space intersection of past and future depth-k Hankel blocks.
// Requires n < k < T/2 and rank of the stacked depth-2k Hankel = 2km + n.
StateReconstruction reconstruct_states(const Matrix& u, const Matrix& y,
                                       Eigen::Index n, Eigen::Index k,
                                       const Tolerances& tol = {});

// Input/output-only path: reconstruct states, then run the output-feedback
// synthesis on the trimmed data. Minimality of the true plant is the
// caller's assertion.
IsoCertificate synth_io_feedback(const Matrix& u, const Matrix& y,
                                 Eigen::Index n, Eigen::Index k,
                                 const Tolerances& tol = {});

}  // namespace ddc::dynamic_feedback
