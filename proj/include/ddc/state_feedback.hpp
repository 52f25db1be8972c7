#pragma once

#include <optional>

#include "ddc/data.hpp"
#include "ddc/types.hpp"

namespace ddc::state_feedback {

enum class Route { AlgebraicRightInverse, Lmi, Deadbeat };

// A synthesized gain plus everything needed to re-check it: K = U_- X_-^dag
// and the common closed loop A + BK = X_+ X_-^dag, identical across the
// whole consistent set.
struct GainCertificate {
    Matrix K;
    Route route = Route::AlgebraicRightInverse;
    Matrix right_inverse;        // the X_-^dag used
    Matrix closed_loop;          // X_+ X_-^dag
    SpectrumReport closed_spectrum;
    std::optional<Matrix> theta; // LMI witness, when route == Lmi
};

// Stabilizing gain via the LMI route: find Theta with X_- Theta symmetric
// positive definite and the 2n x 2n block matrix positive definite, then
// K = U_- Theta (X_- Theta)^{-1}. Throws NotInformative when infeasible.
GainCertificate stabilize_lmi(const BlockMatrices& bm,
                              const Tolerances& tol = {});

// Stabilizing gain via the right-inverse family: X_-^dag = F + G H with H a
// stabilizing gain for the pair (X_+ F, X_+ G).
GainCertificate stabilize_algebraic(const BlockMatrices& bm,
                                    const Tolerances& tol = {});

// Deadbeat gain: right inverse making X_+ X_-^dag nilpotent.
GainCertificate deadbeat(const BlockMatrices& bm, const Tolerances& tol = {});

}  // namespace ddc::state_feedback
