#include "ddc/oracle.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "ddc/numerics.hpp"

namespace ddc::oracle {

SystemModel ConsistentSetParam::member(const Matrix& Z) const {
    SystemModel sys = particular;
    if (Z.size() == 0) return sys;
    Matrix delta = Z * null_rows;  // (n+p) x (n+m)
    sys.A += delta.topLeftCorner(n, n);
    sys.B += delta.topRightCorner(n, m);
    if (with_outputs && p > 0) {
        sys.C += delta.bottomLeftCorner(p, n);
        sys.D += delta.bottomRightCorner(p, m);
    }
    return sys;
}

Experiment simulate(const SystemModel& sys, const Vector& x0,
                    const Matrix& u) {
    const Eigen::Index n = sys.n();
    const Eigen::Index T = u.cols();
    if (x0.size() != n || u.rows() != sys.m())
        throw DimensionMismatch("simulate: x0 or u dimension mismatch");
    Experiment exp;
    exp.u = u;
    Matrix x(n, T + 1);
    x.col(0) = x0;
    for (Eigen::Index t = 0; t < T; ++t)
        x.col(t + 1) = sys.A * x.col(t) + sys.B * u.col(t);
    exp.x = x;
    if (sys.has_output()) {
        Matrix y(sys.p(), T);
        for (Eigen::Index t = 0; t < T; ++t)
            y.col(t) = sys.C * x.col(t) + sys.D * u.col(t);
        exp.y = y;
    }
    return exp;
}

ConsistentSetParam consistent_set(const BlockMatrices& bm, bool with_outputs,
                                  const Tolerances& tol) {
    if (with_outputs && !bm.Y_minus.has_value())
        throw MalformedProblem("consistent_set: output data Y_- is required");
    ConsistentSetParam param;
    param.n = bm.n();
    param.m = bm.m();
    param.with_outputs = with_outputs;
    param.p = with_outputs ? bm.Y_minus->rows() : 0;

    Matrix stacked(param.n + param.m, bm.T());
    stacked.topRows(param.n) = bm.X_minus;
    stacked.bottomRows(param.m) = bm.U_minus;
    Matrix V = numerics::pinv(stacked, tol.rank_tol_scale);

    Matrix AB = bm.X_plus * V;
    param.particular.A = AB.leftCols(param.n);
    param.particular.B = AB.rightCols(param.m);
    if (with_outputs) {
        Matrix CD = *bm.Y_minus * V;
        param.particular.C = CD.leftCols(param.n);
        param.particular.D = CD.rightCols(param.m);
    }
    param.null_rows = numerics::left_nullspace_basis(stacked,
                                                     tol.rank_tol_scale);
    return param;
}

double default_bound(ControllerKind kind) {
    switch (kind) {
        case ControllerKind::Deadbeat: return 1e-8;
        case ControllerKind::Lqr: return 1e-3;
        default: return 1.0;
    }
}

namespace {

// Metric per controller kind; larger is worse, >= bound falsifies.
double evaluate(const SystemModel& sys, const Controller& ctrl,
                std::mt19937& rng) {
    const Eigen::Index n = sys.n();
    switch (ctrl.kind) {
        case ControllerKind::Stabilizing:
            return numerics::spectral_radius(sys.A + sys.B * ctrl.K);
        case ControllerKind::Deadbeat: {
            Matrix cl = sys.A + sys.B * ctrl.K;
            Matrix power = Matrix::Identity(n, n);
            for (Eigen::Index i = 0; i < n; ++i) power = power * cl;
            return power.cwiseAbs().maxCoeff();
        }
        case ControllerKind::Lqr: {
            // Simulated-cost comparison against x0' P+ x0 (500 steps; the
            // tail is negligible for a stable closed loop).
            if (!ctrl.weights || !ctrl.P_plus)
                throw MalformedProblem(
                    "verify_controller: Lqr verification needs weights and "
                    "P_plus");
            Matrix cl = sys.A + sys.B * ctrl.K;
            if (numerics::spectral_radius(cl) >= 1.0) return 1e100;
            std::normal_distribution<double> gauss(0.0, 1.0);
            Vector x0(n);
            for (Eigen::Index i = 0; i < n; ++i) x0(i) = gauss(rng);
            x0.normalize();
            const Matrix& Q = ctrl.weights->Q;
            const Matrix& R = ctrl.weights->R;
            double cost = 0.0;
            Vector x = x0;
            for (int t = 0; t < 500; ++t) {
                Vector u = ctrl.K * x;
                cost += x.dot(Q * x) + u.dot(R * u);
                x = cl * x;
            }
            const double predicted = x0.dot(*ctrl.P_plus * x0);
            return std::abs(cost - predicted) / (1.0 + std::abs(predicted));
        }
        case ControllerKind::OutputFeedback: {
            if (!ctrl.compensator)
                throw MalformedProblem(
                    "verify_controller: OutputFeedback verification needs a "
                    "compensator");
            const auto& c = *ctrl.compensator;
            const Eigen::Index w = c.K.rows();
            Matrix cl(n + w, n + w);
            cl.topLeftCorner(n, n) = sys.A;
            cl.topRightCorner(n, w) = sys.B * c.M;
            cl.bottomLeftCorner(w, n) = c.L * sys.C;
            cl.bottomRightCorner(w, w) = c.K + c.L * sys.D * c.M;
            return numerics::spectral_radius(cl);
        }
    }
    return 0.0;
}

}  // namespace

VerifyReport verify_controller(const ConsistentSetParam& param,
                               const Controller& ctrl, int samples,
                               double metric_bound, std::uint32_t seed) {
    VerifyReport report;
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const Eigen::Index rows = param.n + param.p;
    const Eigen::Index d = param.null_dimension();

    std::vector<Matrix> coefficient_sets;
    coefficient_sets.push_back(Matrix::Zero(rows, d));  // particular member
    // +-10-sigma extremes along every coefficient coordinate.
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            for (double s : {10.0, -10.0}) {
                Matrix Z = Matrix::Zero(rows, d);
                Z(i, j) = s;
                coefficient_sets.push_back(Z);
            }
    for (int k = 0; k < samples; ++k) {
        Matrix Z(rows, d);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < d; ++j) Z(i, j) = gauss(rng);
        coefficient_sets.push_back(Z);
    }

    for (const Matrix& Z : coefficient_sets) {
        SystemModel sys = param.member(Z);
        const double metric = evaluate(sys, ctrl, rng);
        ++report.checked;
        if (metric > report.worst_metric) report.worst_metric = metric;
        if (metric >= metric_bound && !report.falsified) {
            report.falsified = true;
            report.falsifier = sys;
        }
    }
    return report;
}

}  // namespace ddc::oracle
