#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ddc/types.hpp"

namespace ddc::lmi {

// One affine PSD constraint S(z) = C0 + sum_k z_k Ck >= 0.
// Strict blocks are realized as S(z) >= eps*I with eps reported by the
// solver; the shift happens inside the solver, C0 stays as authored.
struct PsdBlock {
    Matrix C0;
    std::vector<Matrix> coeff;  // one (possibly zero) matrix per variable
    bool strict = false;
    std::string name;
};

enum class Objective { Feasibility, MaximizeTrace };

// Affine-in-variable matrix inequality system over a stacked decision
// vector. Variable shape metadata lets callers map the vector back to a
// T x n matrix variable or a symmetric n x n variable.
struct LmiProblem {
    int num_vars = 0;
    Objective objective = Objective::Feasibility;
    Vector objective_vector;  // maximize objective_vector . z when set

    Matrix eq_A;  // equality constraints eq_A * z = eq_b (0 rows when none)
    Vector eq_b;

    std::vector<PsdBlock> blocks;
    double var_bound = 1e6;  // |z_k| box used to keep the barrier bounded

    // --- builders ---

    // Matrix variable Theta (rows x cols), stacked column-major.
    static LmiProblem matrix_variable(int rows, int cols);
    // Symmetric matrix variable (dim x dim), stacked lower triangle.
    static LmiProblem symmetric_variable(int dim);

    int var_rows = 0, var_cols = 0;
    bool symmetric = false;

    Matrix unstack(const Vector& z) const;

    // Adds a PSD block by sampling an affine matrix-valued map of the
    // variable (evaluated at 0 and at unit vectors).
    void add_psd_block(const std::function<Matrix(const Matrix&)>& affine,
                       bool strict, const std::string& name);

    // Adds equality rows by sampling an affine vector-valued map that must
    // vanish on the feasible set.
    void add_equalities(const std::function<Vector(const Matrix&)>& affine);
};

enum class LmiStatus { Feasible, Infeasible, Optimal, Unbounded, NumericalFailure };

struct LmiSolution {
    LmiStatus status = LmiStatus::NumericalFailure;
    Matrix variable;          // unstacked witness / optimizer
    Vector z;                 // raw decision vector
    double objective_value = 0.0;
    double worst_violation = 0.0;  // max constraint violation of the witness
    double margin = 0.0;           // phase-1 optimal slack
    double strict_eps = 0.0;       // interior shift in effect
    // Best-effort separating certificate when infeasible: PSD multipliers
    // (one per block, in the solver's reduced coordinates) whose pairing
    // with the constant terms is negative.
    std::vector<Matrix> dual_blocks;
    double dual_pairing = 0.0;
    std::string message;
};

class LmiSolver {
  public:
    explicit LmiSolver(Tolerances tol = {}) : tol_(tol) {}

    LmiSolution solve_feasibility(const LmiProblem& problem) const;
    LmiSolution solve_trace_max(const LmiProblem& problem) const;

  private:
    Tolerances tol_;
};

}  // namespace ddc::lmi
