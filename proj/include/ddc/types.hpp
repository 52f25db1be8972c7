#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ddc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

struct MissingStates : Error {
    explicit MissingStates(const std::string& msg) : Error(msg) {}
};

struct DepthTooLarge : Error {
    explicit DepthTooLarge(const std::string& msg) : Error(msg) {}
};

struct NonSquare : Error {
    explicit NonSquare(const std::string& msg) : Error(msg) {}
};

struct RankDeficient : Error {
    explicit RankDeficient(const std::string& msg) : Error(msg) {}
};

struct NotStabilizable : Error {
    explicit NotStabilizable(const std::string& msg) : Error(msg) {}
};

struct NotDeadbeatAssignable : Error {
    explicit NotDeadbeatAssignable(const std::string& msg) : Error(msg) {}
};

struct UnobservableUnitCircleMode : Error {
    explicit UnobservableUnitCircleMode(const std::string& msg) : Error(msg) {}
};

struct Unstable : Error {
    explicit Unstable(const std::string& msg) : Error(msg) {}
};

// A synthesis request whose data do not admit the requested controller.
struct NotInformative : Error {
    explicit NotInformative(const std::string& msg) : Error(msg) {}
};

// Numerical breakdown that is distinguishable from a mathematically
// negative verdict (exit code 1 vs 2 at the CLI level).
struct NumericalError : Error {
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

struct MalformedProblem : Error {
    explicit MalformedProblem(const std::string& msg) : Error(msg) {}
};

struct RankConditionFailed : Error {
    int achieved_rank = -1;
    int required_rank = -1;
    RankConditionFailed(const std::string& msg, int achieved, int required)
        : Error(msg), achieved_rank(achieved), required_rank(required) {}
};

struct DepthInvalid : Error {
    explicit DepthInvalid(const std::string& msg) : Error(msg) {}
};

// Tolerances shared across the toolkit. Verdict boundaries are reported in
// CLI output so downstream consumers know what was in effect.
struct Tolerances {
    // Numerical rank: singular values above rank_tol_scale * max(rows,cols)
    // * eps * sigma_max count toward the rank.
    double rank_tol_scale = 1.0;
    // "Stable" means spectral radius < 1 - stability_margin.
    double stability_margin = 1e-9;
    // Strict LMI blocks are realized as >= lmi_strict_eps * I.
    double lmi_strict_eps = 1e-8;
};

struct SpectrumReport {
    std::vector<std::complex<double>> eigenvalues;
    double spectral_radius = 0.0;
};

// A candidate (A,B) or (A,B,C,D) consistent with data.
struct SystemModel {
    Matrix A;
    Matrix B;
    Matrix C;  // 0x0 when absent
    Matrix D;  // 0x0 when absent

    bool has_output() const { return C.rows() > 0; }
    Eigen::Index n() const { return A.rows(); }
    Eigen::Index m() const { return B.cols(); }
    Eigen::Index p() const { return C.rows(); }
};

}  // namespace ddc
