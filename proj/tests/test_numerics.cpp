#include <doctest.h>

#include <cmath>
#include <random>

#include "ddc/numerics.hpp"
#include "helpers.hpp"

using namespace ddc;
using namespace ddc::numerics;

namespace {

Matrix random_orthogonal(Eigen::Index n, std::mt19937& rng) {
    Matrix M = ddc::testutil::random_matrix(n, n, rng);
    Eigen::HouseholderQR<Matrix> qr(M);
    return qr.householderQ();
}

}  // namespace

TEST_CASE("rank_tol examples") {
    CHECK(rank_tol(Matrix(Matrix::Identity(2, 2))) == 2);
    Matrix stacked{{1.0, 0.5}, {0.0, 1.0}, {-1.0, -1.0}};
    CHECK(rank_tol(stacked) == 2);
    CHECK(rank_tol(Matrix{{0.0, 1.0}, {0.0, 0.0}}) == 1);
    CHECK(rank_tol(Matrix(Matrix::Zero(3, 2))) == 0);
}

TEST_CASE("rank_tol is invariant under orthogonal transforms") {
    std::mt19937 rng(17);
    Matrix M = ddc::testutil::random_matrix(4, 6, rng);
    M.row(3) = M.row(0) + M.row(1);  // force rank 3
    const int r = rank_tol(M);
    CHECK(r == 3);
    for (int trial = 0; trial < 5; ++trial) {
        Matrix Ql = random_orthogonal(4, rng);
        Matrix Qr = random_orthogonal(6, rng);
        CHECK(rank_tol(Matrix(Ql * M * Qr)) == r);
    }
}

TEST_CASE("left_nullspace_basis examples") {
    Matrix M{{1.0}, {1.0}};
    Matrix N = left_nullspace_basis(M);
    REQUIRE(N.rows() == 1);
    CHECK(std::abs(N(0, 0) + N(0, 1)) < 1e-12);
    CHECK(std::abs(N.row(0).norm() - 1.0) < 1e-12);

    Matrix full{{1.0, 0.0}, {0.0, 1.0}};
    CHECK(left_nullspace_basis(full).rows() == 0);

    // Stacked data of the stabilization example: 1-dimensional left null
    // space along (1, 0.5, 1).
    Matrix stacked{{1.0, 0.5}, {0.0, 1.0}, {-1.0, -1.0}};
    Matrix N2 = left_nullspace_basis(stacked);
    REQUIRE(N2.rows() == 1);
    CHECK((N2 * stacked).cwiseAbs().maxCoeff() < 1e-12);
    Vector dir(3);
    dir << 1.0, 0.5, 1.0;
    dir.normalize();
    CHECK(std::abs(std::abs(N2.row(0).dot(dir)) - 1.0) < 1e-12);
}

TEST_CASE("spectrum examples") {
    Matrix M{{0.5, -0.5}, {1.0, 0.5}};
    SpectrumReport rep = spectrum(M);
    REQUIRE(rep.eigenvalues.size() == 2);
    CHECK(rep.spectral_radius == doctest::Approx(std::sqrt(3.0) / 2.0));
    for (const auto& lam : rep.eigenvalues) {
        CHECK(lam.real() == doctest::Approx(0.5));
        CHECK(std::abs(lam.imag()) ==
              doctest::Approx(std::sqrt(2.0) / 2.0));
    }
    CHECK(spectrum(Matrix::Zero(3, 3)).spectral_radius == 0.0);

    // Companion matrix of (z-0.1)(z-0.2) = z^2 - 0.3 z + 0.02.
    Matrix C{{0.0, -0.02}, {1.0, 0.3}};
    SpectrumReport crep = spectrum(C);
    std::vector<double> mods;
    for (const auto& lam : crep.eigenvalues) mods.push_back(std::abs(lam));
    std::sort(mods.begin(), mods.end());
    CHECK(mods[0] == doctest::Approx(0.1));
    CHECK(mods[1] == doctest::Approx(0.2));
    CHECK_THROWS_AS(spectrum(Matrix::Zero(2, 3)), NonSquare);
}

TEST_CASE("right_inverse_family") {
    auto fam = right_inverse_family(Matrix::Identity(2, 2));
    CHECK(fam.F == Matrix::Identity(2, 2));
    CHECK(fam.G.cols() == 0);

    auto fam2 = right_inverse_family(Matrix{{1.0, 0.0}});
    CHECK((fam2.F - Matrix{{1.0}, {0.0}}).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(fam2.G.cols() == 1);
    CHECK(std::abs(std::abs(fam2.G(1, 0)) - 1.0) < 1e-12);
    CHECK(std::abs(fam2.G(0, 0)) < 1e-12);

    std::mt19937 rng(23);
    Matrix X = ddc::testutil::random_matrix(2, 5, rng);
    auto fam3 = right_inverse_family(X);
    CHECK((X * fam3.F - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((X * fam3.G).cwiseAbs().maxCoeff() < 1e-10);
    Matrix FG(5, 5);
    FG << fam3.F, fam3.G;
    CHECK(rank_tol(FG) == 5);

    CHECK_THROWS_AS(right_inverse_family(Matrix::Zero(1, 3)), RankDeficient);
}

TEST_CASE("dare_solve golden instances") {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;

    auto [P0, K0] = dare_solve(Matrix{{0.0}}, Matrix{{1.0}}, Matrix{{1.0}},
                               Matrix{{1.0}});
    CHECK(P0(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(K0(0, 0)) < 1e-10);

    auto [P1, K1] = dare_solve(Matrix{{1.0}}, Matrix{{1.0}}, Matrix{{1.0}},
                               Matrix{{1.0}});
    CHECK(P1(0, 0) == doctest::Approx(phi).epsilon(1e-10));
    CHECK(K1(0, 0) == doctest::Approx(-1.0 / phi).epsilon(1e-10));
    CHECK(1.0 + K1(0, 0) == doctest::Approx(1.0 - 1.0 / phi).epsilon(1e-8));

    // A=2: p^2 - 4p - 1 = 0 -> P+ = 2 + sqrt(5).
    auto [P2, K2] = dare_solve(Matrix{{2.0}}, Matrix{{1.0}}, Matrix{{1.0}},
                               Matrix{{1.0}});
    CHECK(P2(0, 0) == doctest::Approx(2.0 + std::sqrt(5.0)).epsilon(1e-10));
    CHECK(K2(0, 0) ==
          doctest::Approx(-2.0 * P2(0, 0) / (1.0 + P2(0, 0))).epsilon(1e-10));
}

TEST_CASE("dare_solve matches value iteration on random instances") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        SystemModel sys = ddc::testutil::random_system(3, 1, rng);
        Matrix Q = Matrix::Identity(3, 3);
        Matrix R = Matrix::Identity(1, 1);
        auto [P, K] = dare_solve(sys.A, sys.B, Q, R);
        // DARE residual.
        Matrix G = sys.B.transpose() * P * sys.B + R;
        Matrix resid = sys.A.transpose() * P * sys.A - P -
                       sys.A.transpose() * P * sys.B *
                           G.ldlt().solve(sys.B.transpose() * P * sys.A) +
                       Q;
        CHECK(resid.cwiseAbs().maxCoeff() < 1e-9);
        // Value iteration from P0 = Q.
        Matrix Pk = Q;
        for (int it = 0; it < 20000; ++it) {
            Matrix Gk = sys.B.transpose() * Pk * sys.B + R;
            Matrix next = sys.A.transpose() * Pk * sys.A -
                          sys.A.transpose() * Pk * sys.B *
                              Gk.ldlt().solve(sys.B.transpose() * Pk * sys.A) +
                          Q;
            if ((next - Pk).cwiseAbs().maxCoeff() < 1e-13) {
                Pk = next;
                break;
            }
            Pk = next;
        }
        CHECK((P - Pk).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(spectral_radius(sys.A + sys.B * K) < 1.0);
    }
}

TEST_CASE("dare_solve rejects bad instances") {
    CHECK_THROWS_AS(dare_solve(Matrix{{1.0}}, Matrix{{0.0}}, Matrix{{1.0}},
                               Matrix{{1.0}}),
                    NotStabilizable);
    // Unit-circle eigenvalue unobservable through Q = 0.
    CHECK_THROWS_AS(dare_solve(Matrix{{1.0}}, Matrix{{1.0}}, Matrix{{0.0}},
                               Matrix{{1.0}}),
                    UnobservableUnitCircleMode);
}

TEST_CASE("lyapunov_solve") {
    Matrix W{{1.0, 0.5}, {0.5, 2.0}};
    CHECK((lyapunov_solve(Matrix::Zero(2, 2), W) - W).cwiseAbs().maxCoeff() <
          1e-12);

    Matrix P = lyapunov_solve(Matrix{{0.5}}, Matrix{{1.0}});
    CHECK(P(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-10));

    std::mt19937 rng(37);
    Matrix M = 0.4 * ddc::testutil::random_matrix(3, 3, rng);
    while (spectral_radius(M) >= 0.95) M *= 0.5;
    Matrix Ps = lyapunov_solve(M, Matrix::Identity(3, 3));
    CHECK((Ps - Ps.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((Ps - M.transpose() * Ps * M - Matrix::Identity(3, 3))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Matrix> es(Ps);
    CHECK(es.eigenvalues().minCoeff() > 0.0);

    CHECK_THROWS_AS(lyapunov_solve(Matrix{{1.5}}, Matrix{{1.0}}), Unstable);
}

TEST_CASE("place_spectrum at the origin") {
    // Already nilpotent, B = 0.
    Matrix A{{0.0, 1.0}, {0.0, 0.0}};
    Matrix B0 = Matrix::Zero(2, 0);
    Matrix M = place_spectrum(A, B0, SpectrumTarget::Origin);
    CHECK(M.rows() == 0);
    Matrix cl0 = A + B0 * M;
    CHECK((cl0 * cl0).cwiseAbs().maxCoeff() < 1e-12);

    Matrix M2 = place_spectrum(Matrix{{2.0}}, Matrix{{1.0}},
                               SpectrumTarget::Origin);
    CHECK(M2(0, 0) == doctest::Approx(-2.0).epsilon(1e-10));

    std::mt19937 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        SystemModel sys = ddc::testutil::random_system(3, 2, rng);
        Matrix F = place_spectrum(sys.A, sys.B, SpectrumTarget::Origin);
        Matrix cl = sys.A + sys.B * F;
        CHECK((cl * cl * cl).cwiseAbs().maxCoeff() < 1e-8);
    }

    // Uncontrollable nonzero mode cannot be moved to the origin.
    Matrix Au{{2.0, 0.0}, {0.0, 0.5}};
    Matrix Bu{{0.0}, {1.0}};
    CHECK_THROWS_AS(place_spectrum(Au, Bu, SpectrumTarget::Origin),
                    NotDeadbeatAssignable);
}

TEST_CASE("place_spectrum into the unit disk") {
    std::mt19937 rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        SystemModel sys = ddc::testutil::random_system(4, 1, rng);
        Matrix F = place_spectrum(sys.A, sys.B, SpectrumTarget::UnitDisk);
        CHECK(spectral_radius(sys.A + sys.B * F) < 1.0 - 1e-6);
    }
    Matrix Au{{2.0, 0.0}, {0.0, 0.5}};
    Matrix Bu{{0.0}, {1.0}};
    CHECK_THROWS_AS(place_spectrum(Au, Bu, SpectrumTarget::UnitDisk),
                    NotStabilizable);
}

TEST_CASE("rowspace_intersection") {
    CHECK(rowspace_intersection(Matrix::Identity(2, 2),
                                Matrix::Identity(2, 2))
              .rows() == 2);
    CHECK(rowspace_intersection(Matrix{{1.0, 0.0}}, Matrix{{0.0, 1.0}})
              .rows() == 0);

    std::mt19937 rng(47);
    Matrix A = ddc::testutil::random_matrix(2, 6, rng);
    Matrix B(2, 6);
    B.row(0) = ddc::testutil::random_matrix(1, 6, rng);
    B.row(1) = A.row(0);
    Matrix W = rowspace_intersection(A, B);
    REQUIRE(W.rows() == 1);
    // The recovered direction lies in rs(A) (and in rs(B)).
    Matrix projA = W * numerics::pinv(A) * A;
    CHECK((projA - W).cwiseAbs().maxCoeff() < 1e-9);
    Matrix projB = W * numerics::pinv(B) * B;
    CHECK((projB - W).cwiseAbs().maxCoeff() < 1e-9);

    // Dimension formula rank(A)+rank(B)-rank([A;B]).
    for (int trial = 0; trial < 5; ++trial) {
        Matrix X = ddc::testutil::random_matrix(3, 8, rng);
        Matrix Y(3, 8);
        Y.topRows(2) = ddc::testutil::random_matrix(2, 8, rng);
        Y.row(2) = X.row(1);
        Matrix S(6, 8);
        S << X, Y;
        int expected = rank_tol(X) + rank_tol(Y) - rank_tol(S);
        CHECK(rowspace_intersection(X, Y).rows() == expected);
    }
}

TEST_CASE("model-based Hautus helpers") {
    Matrix Au{{2.0, 0.0}, {0.0, 0.5}};
    Matrix Bu{{0.0}, {1.0}};
    CHECK(!is_stabilizable(Au, Bu));
    CHECK(!is_controllable(Au, Bu));
    Matrix As{{0.5, 0.0}, {0.0, 2.0}};
    Matrix Bs{{0.0}, {1.0}};
    CHECK(is_stabilizable(As, Bs));
    CHECK(!is_controllable(As, Bs));
    CHECK(is_detectable(Matrix{{0.0, 1.0}}, As));
    CHECK(!is_detectable(Matrix{{1.0, 0.0}}, As));
}
