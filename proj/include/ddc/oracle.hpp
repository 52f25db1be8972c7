#pragma once

#include <cstdint>
#include <optional>

#include "ddc/data.hpp"
#include "ddc/dynamic_feedback.hpp"
#include "ddc/lqr.hpp"
#include "ddc/types.hpp"

namespace ddc::oracle {

// Affine parametrization of every system consistent with the data:
//   [A B]         = particular + Z * null_rows      (state data)
//   [A B; C D]    = likewise with n+p coefficient rows (with outputs)
// where the rows of null_rows are orthonormal left-null directions of the
// stacked data matrix [X_-; U_-] and Z is a free coefficient matrix.
struct ConsistentSetParam {
    SystemModel particular;
    Matrix null_rows;  // d x (n+m)
    bool with_outputs = false;
    Eigen::Index n = 0, m = 0, p = 0;

    Eigen::Index null_dimension() const { return null_rows.rows(); }
    // Member for a given (n+p) x d coefficient matrix.
    SystemModel member(const Matrix& Z) const;
};

// Controller under verification: a static state-feedback gain or a dynamic
// compensator, with the acceptance metric keyed by kind.
enum class ControllerKind { Stabilizing, Deadbeat, Lqr, OutputFeedback };

struct Controller {
    ControllerKind kind = ControllerKind::Stabilizing;
    Matrix K;  // m x n, state-feedback kinds
    std::optional<lqr::LqrWeights> weights;  // Lqr
    std::optional<Matrix> P_plus;            // Lqr
    std::optional<dynamic_feedback::Compensator> compensator;  // OutputFeedback
};

struct VerifyReport {
    int checked = 0;
    bool falsified = false;
    // Worst metric over all samples: spectral radius (Stabilizing,
    // OutputFeedback), max-norm of the n-th closed-loop power (Deadbeat),
    // or relative simulated-cost error (Lqr).
    double worst_metric = 0.0;
    std::optional<SystemModel> falsifier;
};

// Exact state recursion; emits y when sys carries an output map.
Experiment simulate(const SystemModel& sys, const Vector& x0, const Matrix& u);

ConsistentSetParam consistent_set(const BlockMatrices& bm, bool with_outputs,
                                  const Tolerances& tol = {});

// Randomized falsification over the consistent set: the particular member,
// +-10-sigma extreme coefficients, and `samples` standard-normal draws.
VerifyReport verify_controller(const ConsistentSetParam& param,
                               const Controller& ctrl, int samples,
                               double metric_bound, std::uint32_t seed = 1);

// Default acceptance bound for a controller kind.
double default_bound(ControllerKind kind);

}  // namespace ddc::oracle
