#include <doctest.h>

#include "ddc/data.hpp"
#include "helpers.hpp"

using namespace ddc;

TEST_CASE("assemble: single experiment shifted slices") {
    // u=[1,0], x=[(0,0),(1,0),(0,1)].
    DataSet data;
    data.n = 2;
    data.m = 1;
    Experiment exp;
    exp.u = Matrix{{1.0, 0.0}};
    exp.x = Matrix{{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
    data.experiments.push_back(exp);

    BlockMatrices bm = assemble(data);
    CHECK(bm.U_minus == Matrix{{1.0, 0.0}});
    CHECK(bm.X_minus == Matrix{{0.0, 1.0}, {0.0, 0.0}});
    CHECK(bm.X_plus == Matrix{{1.0, 0.0}, {0.0, 1.0}});
    CHECK(!bm.Y_minus.has_value());
}

TEST_CASE("assemble: length-1 zero experiment") {
    DataSet data;
    data.n = 1;
    data.m = 1;
    Experiment exp;
    exp.u = Matrix{{0.0}};
    exp.x = Matrix{{0.0, 0.0}};
    data.experiments.push_back(exp);
    BlockMatrices bm = assemble(data);
    CHECK(bm.T() == 1);
    CHECK(bm.U_minus(0, 0) == 0.0);
    CHECK(bm.X_minus(0, 0) == 0.0);
    CHECK(bm.X_plus(0, 0) == 0.0);
}

TEST_CASE("assemble: two experiments concatenate and keep the shift") {
    DataSet data;
    data.n = 1;
    data.m = 1;
    Experiment a, b;
    a.u = Matrix{{2.0}};
    a.x = Matrix{{1.0, 3.0}};
    b.u = Matrix{{-1.0}};
    b.x = Matrix{{4.0, 5.0}};
    data.experiments = {a, b};
    BlockMatrices bm = assemble(data);
    CHECK(bm.T() == 2);
    // Column j of X_plus is the successor of column j of X_minus within the
    // same experiment.
    CHECK(bm.X_minus(0, 0) == 1.0);
    CHECK(bm.X_plus(0, 0) == 3.0);
    CHECK(bm.X_minus(0, 1) == 4.0);
    CHECK(bm.X_plus(0, 1) == 5.0);
    CHECK(bm.U_minus(0, 0) == 2.0);
    CHECK(bm.U_minus(0, 1) == -1.0);
}

TEST_CASE("assemble: experiment order permutes column blocks") {
    DataSet data;
    data.n = 1;
    data.m = 1;
    Experiment a, b;
    a.u = Matrix{{2.0}};
    a.x = Matrix{{1.0, 3.0}};
    b.u = Matrix{{-1.0}};
    b.x = Matrix{{4.0, 5.0}};
    data.experiments = {a, b};
    BlockMatrices fwd = assemble(data);
    data.experiments = {b, a};
    BlockMatrices rev = assemble(data);
    CHECK(fwd.X_minus(0, 0) == rev.X_minus(0, 1));
    CHECK(fwd.X_plus(0, 0) == rev.X_plus(0, 1));
    CHECK(fwd.U_minus(0, 0) == rev.U_minus(0, 1));
}

TEST_CASE("assemble: missing state path throws") {
    DataSet data;
    data.n = 1;
    data.m = 1;
    Experiment exp;
    exp.u = Matrix{{1.0}};
    data.experiments.push_back(exp);
    CHECK_THROWS_AS(assemble(data), MissingStates);
}

TEST_CASE("hankel: scalar definition") {
    Matrix f{{1.0, 2.0, 3.0, 4.0}};
    Matrix H = hankel(f, 2);
    CHECK(H == Matrix{{1.0, 2.0, 3.0}, {2.0, 3.0, 4.0}});
}

TEST_CASE("hankel: depth 1 is the signal itself") {
    Matrix f{{1.0, 2.0, 3.0, 4.0}};
    CHECK(hankel(f, 1) == f);
}

TEST_CASE("hankel: vector-valued blocks by index arithmetic") {
    Matrix f(2, 3);
    f << 1, 3, 5, 2, 4, 6;
    Matrix H = hankel(f, 2);
    REQUIRE(H.rows() == 4);
    REQUIRE(H.cols() == 2);
    // Block (i,j) equals f(i+j).
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int r = 0; r < 2; ++r) CHECK(H(2 * i + r, j) == f(r, i + j));
}

TEST_CASE("hankel: columns are exact windows") {
    std::mt19937 rng(7);
    Matrix f = ddc::testutil::random_matrix(2, 9, rng);
    Matrix H = hankel(f, 3);
    for (int j = 0; j < H.cols(); ++j)
        for (int i = 0; i < 3; ++i)
            CHECK(H.block(2 * i, j, 2, 1) == f.col(i + j));
}

TEST_CASE("hankel: depth >= T throws") {
    Matrix f{{1.0, 2.0}};
    CHECK_THROWS_AS(hankel(f, 2), DepthTooLarge);
    CHECK_THROWS_AS(hankel(f, 0), DepthTooLarge);
}

TEST_CASE("persistency_order: impulse, random, zero") {
    CHECK(persistency_order(Matrix{{1.0, 0.0, 0.0, 0.0}}) == 1);
    CHECK(persistency_order(Matrix{{0.0, 0.0, 0.0}}) == 0);
    std::mt19937 rng(11);
    Matrix u = ddc::testutil::random_matrix(1, 20, rng);
    CHECK(persistency_order(u) == 10);
}

TEST_CASE("json round trip is bit-exact") {
    DataSet data;
    data.n = 2;
    data.m = 1;
    data.p = 1;
    Experiment exp;
    std::mt19937 rng(3);
    exp.u = ddc::testutil::random_matrix(1, 5, rng);
    exp.x = ddc::testutil::random_matrix(2, 6, rng);
    exp.y = ddc::testutil::random_matrix(1, 5, rng);
    data.experiments.push_back(exp);

    DataSet back = parse_dataset_json(dataset_to_json(data));
    REQUIRE(back.experiments.size() == 1);
    CHECK(back.n == 2);
    CHECK(back.m == 1);
    CHECK(back.p == 1);
    CHECK(back.experiments[0].u == exp.u);
    CHECK(*back.experiments[0].x == *exp.x);
    CHECK(*back.experiments[0].y == *exp.y);
    // Second serialization is byte-identical.
    CHECK(dataset_to_json(back) == dataset_to_json(data));
}

TEST_CASE("simulated data satisfies the data equation exactly") {
    std::mt19937 rng(5);
    SystemModel sys = ddc::testutil::random_system(3, 2, rng);
    BlockMatrices bm = ddc::testutil::simulate_blocks(sys, 15, rng);
    Matrix resid = bm.X_plus - sys.A * bm.X_minus - sys.B * bm.U_minus;
    CHECK(resid.cwiseAbs().maxCoeff() < 1e-12);
}
