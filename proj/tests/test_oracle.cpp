#include <doctest.h>

#include <random>

#include "ddc/numerics.hpp"
#include "ddc/oracle.hpp"
#include "helpers.hpp"

using namespace ddc;
using namespace ddc::oracle;

TEST_CASE("simulate: single-step scalar record") {
    SystemModel sys;
    sys.A = Matrix{{0.0}};
    sys.B = Matrix{{1.0}};
    Vector x0(1);
    x0 << 0.0;
    Experiment exp = simulate(sys, x0, Matrix{{1.0}});
    CHECK((*exp.x)(0, 0) == 0.0);
    CHECK((*exp.x)(0, 1) == 1.0);
    CHECK(!exp.y.has_value());
}

TEST_CASE("simulate: zero input and state stays at zero") {
    std::mt19937 rng(149);
    SystemModel sys = ddc::testutil::random_system(3, 2, rng);
    Experiment exp = simulate(sys, Vector::Zero(3), Matrix::Zero(2, 10));
    CHECK(exp.x->cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("simulate: definitional replay through assemble") {
    std::mt19937 rng(151);
    SystemModel sys = ddc::testutil::random_system(3, 1, rng);
    BlockMatrices bm = ddc::testutil::simulate_blocks(sys, 12, rng);
    CHECK((bm.X_plus - sys.A * bm.X_minus - sys.B * bm.U_minus)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("simulate: dimension mismatch") {
    SystemModel sys;
    sys.A = Matrix::Identity(2, 2);
    sys.B = Matrix::Ones(2, 1);
    CHECK_THROWS_AS(simulate(sys, Vector::Zero(3), Matrix::Zero(1, 4)),
                    DimensionMismatch);
}

TEST_CASE("consistent_set: controllability-example family") {
    ConsistentSetParam param =
        consistent_set(ddc::testutil::example_controllability(), false);
    // Family A = [[0, a1], [1, a2]], B = (1, 0)^T: the fixed entries.
    CHECK(param.particular.A(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(param.particular.A(1, 0) == doctest::Approx(1.0));
    CHECK(param.particular.B(0, 0) == doctest::Approx(1.0));
    CHECK(param.particular.B(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
    // One free direction, supported on the second column of A only.
    REQUIRE(param.null_dimension() == 1);
    Vector dir = param.null_rows.row(0).transpose();
    CHECK(std::abs(dir(0)) < 1e-12);           // A column 1
    CHECK(std::abs(std::abs(dir(1)) - 1.0) < 1e-12);  // A column 2 free
    CHECK(std::abs(dir(2)) < 1e-12);           // B fixed
}

TEST_CASE("consistent_set: sysid-informative data has empty basis") {
    std::mt19937 rng(157);
    SystemModel sys = ddc::testutil::random_system(2, 1, rng);
    BlockMatrices bm = ddc::testutil::simulate_blocks(sys, 10, rng);
    ConsistentSetParam param = consistent_set(bm, false);
    CHECK(param.null_dimension() == 0);
    CHECK((param.particular.A - sys.A).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((param.particular.B - sys.B).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("consistent_set: stabilization example two-parameter family") {
    BlockMatrices bm = ddc::testutil::example_stabilization();
    ConsistentSetParam param = consistent_set(bm, false);
    REQUIRE(param.null_dimension() == 1);  // one direction per row of [A B]
    std::mt19937 rng(163);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix Z(2, 1);
        Z << gauss(rng), gauss(rng);
        SystemModel member = param.member(Z);
        Matrix resid =
            bm.X_plus - member.A * bm.X_minus - member.B * bm.U_minus;
        CHECK(resid.cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("verify_controller: worked example radius is sample-independent") {
    BlockMatrices bm = ddc::testutil::example_stabilization();
    ConsistentSetParam param = consistent_set(bm, false);
    Controller ctrl;
    ctrl.kind = ControllerKind::Stabilizing;
    ctrl.K = Matrix{{-1.0, -0.5}};
    VerifyReport rep = verify_controller(param, ctrl, 100, 1.0, 7);
    CHECK(!rep.falsified);
    CHECK(rep.worst_metric ==
          doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-9));
}

TEST_CASE("verify_controller: single-step data falsifies every scalar gain") {
    BlockMatrices bm = ddc::testutil::example_single_step();
    ConsistentSetParam param = consistent_set(bm, false);
    for (double k : {-5.0, -1.0, 0.0, 1.0, 5.0}) {
        Controller ctrl;
        ctrl.kind = ControllerKind::Stabilizing;
        ctrl.K = Matrix{{k}};
        VerifyReport rep = verify_controller(param, ctrl, 50, 1.0, 11);
        CHECK(rep.falsified);
        REQUIRE(rep.falsifier.has_value());
        CHECK(std::abs(rep.falsifier->A(0, 0) + rep.falsifier->B(0, 0) * k) >=
              1.0);
    }
}

TEST_CASE("verify_controller: empty basis trivially passes") {
    std::mt19937 rng(167);
    SystemModel sys = ddc::testutil::random_system(2, 1, rng);
    while (!numerics::is_stabilizable(sys.A, sys.B))
        sys = ddc::testutil::random_system(2, 1, rng);
    BlockMatrices bm = ddc::testutil::simulate_blocks(sys, 10, rng);
    ConsistentSetParam param = consistent_set(bm, false);
    REQUIRE(param.null_dimension() == 0);
    auto [P, K] = numerics::dare_solve(sys.A, sys.B, Matrix::Identity(2, 2),
                                       Matrix::Identity(1, 1));
    Controller ctrl;
    ctrl.kind = ControllerKind::Stabilizing;
    ctrl.K = K;
    VerifyReport rep = verify_controller(param, ctrl, 10, 1.0, 13);
    CHECK(!rep.falsified);
    CHECK(rep.checked >= 1);
}

TEST_CASE("verify_controller: deadbeat and lqr metrics") {
    std::mt19937 rng(173);
    SystemModel sys = ddc::testutil::random_system(2, 1, rng);
    BlockMatrices bm = ddc::testutil::simulate_blocks(sys, 12, rng);
    ConsistentSetParam param = consistent_set(bm, false);

    Matrix F = numerics::place_spectrum(sys.A, sys.B,
                                        numerics::SpectrumTarget::Origin);
    Controller db;
    db.kind = ControllerKind::Deadbeat;
    db.K = F;
    VerifyReport dbrep = verify_controller(param, db, 20, 1e-8, 17);
    CHECK(!dbrep.falsified);

    auto [P, K] = numerics::dare_solve(sys.A, sys.B, Matrix::Identity(2, 2),
                                       Matrix::Identity(1, 1));
    Controller lq;
    lq.kind = ControllerKind::Lqr;
    lq.K = K;
    lq.P_plus = P;
    lqr::LqrWeights w;
    w.Q = Matrix::Identity(2, 2);
    w.R = Matrix::Identity(1, 1);
    lq.weights = w;
    VerifyReport lqrep = verify_controller(param, lq, 20, 1e-3, 19);
    CHECK(!lqrep.falsified);
}
