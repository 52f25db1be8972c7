#pragma once

#include <random>

#include "ddc/data.hpp"
#include "ddc/numerics.hpp"
#include "ddc/oracle.hpp"
#include "ddc/types.hpp"

namespace ddc::testutil {

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols,
                            std::mt19937& rng, double sigma = 1.0) {
    std::normal_distribution<double> gauss(0.0, sigma);
    Matrix M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = gauss(rng);
    return M;
}

inline SystemModel random_system(Eigen::Index n, Eigen::Index m,
                                 std::mt19937& rng) {
    SystemModel sys;
    sys.A = random_matrix(n, n, rng);
    sys.B = random_matrix(n, m, rng);
    return sys;
}

// Random system with the spectral radius capped, so that simulated
// trajectories stay well scaled over the horizons used in the tests.
inline SystemModel random_system_tame(Eigen::Index n, Eigen::Index m,
                                      std::mt19937& rng,
                                      double rho_max = 1.2) {
    SystemModel sys = random_system(n, m, rng);
    const double rho = numerics::spectral_radius(sys.A);
    if (rho > rho_max) sys.A *= rho_max / rho;
    return sys;
}

// Simulate with Gaussian input from a Gaussian initial state and assemble
// the block matrices.
inline BlockMatrices simulate_blocks(const SystemModel& sys, Eigen::Index T,
                                     std::mt19937& rng) {
    Matrix u = random_matrix(sys.m(), T, rng);
    Vector x0 = random_matrix(sys.n(), 1, rng).col(0);
    Experiment exp = oracle::simulate(sys, x0, u);
    DataSet data;
    data.n = static_cast<int>(sys.n());
    data.m = static_cast<int>(sys.m());
    data.p = static_cast<int>(sys.p());
    data.experiments.push_back(std::move(exp));
    return assemble(data);
}

// The three worked data sets of the paper.

// Stabilization example: X = [1 0.5 -0.25; 0 1 1], U_- = [-1 -1].
inline BlockMatrices example_stabilization() {
    BlockMatrices bm;
    bm.X_minus = Matrix{{1.0, 0.5}, {0.0, 1.0}};
    bm.X_plus = Matrix{{0.5, -0.25}, {1.0, 1.0}};
    bm.U_minus = Matrix{{-1.0, -1.0}};
    return bm;
}

// Controllability example: X = [0 1 0; 0 0 1], U_- = [1 0].
inline BlockMatrices example_controllability() {
    BlockMatrices bm;
    bm.X_minus = Matrix{{0.0, 1.0}, {0.0, 0.0}};
    bm.X_plus = Matrix{{1.0, 0.0}, {0.0, 1.0}};
    bm.U_minus = Matrix{{1.0, 0.0}};
    return bm;
}

// Single-step scalar record: x(0)=0, u(0)=1, x(1)=1.
inline BlockMatrices example_single_step() {
    BlockMatrices bm;
    bm.X_minus = Matrix{{0.0}};
    bm.X_plus = Matrix{{1.0}};
    bm.U_minus = Matrix{{1.0}};
    return bm;
}

}  // namespace ddc::testutil
