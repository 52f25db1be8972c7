#include "ddc/serialize.hpp"

#include <string>

namespace ddc::serialize {

json matrix_to_json(const Matrix& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array())
        throw MalformedProblem("matrix_from_json: expected an array of rows");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return Matrix(0, 0);
    const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
    Matrix M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j.at(i);
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw MalformedProblem("matrix_from_json: ragged rows");
        for (Eigen::Index c = 0; c < cols; ++c)
            M(i, c) = row.at(c).get<double>();
    }
    return M;
}

json spectrum_to_json(const SpectrumReport& rep) {
    json eig = json::array();
    for (const auto& lam : rep.eigenvalues)
        eig.push_back({{"re", lam.real()}, {"im", lam.imag()}});
    return {{"eigenvalues", eig}, {"spectral_radius", rep.spectral_radius}};
}

json system_to_json(const SystemModel& sys) {
    json j = {{"A", matrix_to_json(sys.A)}, {"B", matrix_to_json(sys.B)}};
    if (sys.has_output()) {
        j["C"] = matrix_to_json(sys.C);
        j["D"] = matrix_to_json(sys.D);
    }
    return j;
}

const char* property_name(analysis::Property p) {
    switch (p) {
        case analysis::Property::SysId: return "sysid";
        case analysis::Property::Controllability: return "controllability";
        case analysis::Property::Stabilizability: return "stabilizability";
        case analysis::Property::Stability: return "stability";
    }
    return "unknown";
}

json to_json(const analysis::AnalysisVerdict& v) {
    json certificate;
    if (v.identified) certificate["identified"] = system_to_json(*v.identified);
    if (v.V1.size() > 0) certificate["V1"] = matrix_to_json(v.V1);
    if (v.V2.size() > 0) certificate["V2"] = matrix_to_json(v.V2);
    if (!v.candidates.empty()) {
        json cands = json::array();
        for (const auto& c : v.candidates)
            cands.push_back({{"lambda",
                              {{"re", c.lambda.real()}, {"im", c.lambda.imag()}}},
                             {"rank", c.rank},
                             {"passed", c.passed}});
        certificate["candidates"] = std::move(cands);
    }
    if (v.closed_spectrum)
        certificate["spectrum"] = spectrum_to_json(*v.closed_spectrum);
    json j = {{"property", property_name(v.property)},
              {"informative", v.informative},
              {"certificate", std::move(certificate)}};
    if (v.witness) j["witness"] = system_to_json(*v.witness);
    return j;
}

namespace {

const char* route_name(state_feedback::Route r) {
    switch (r) {
        case state_feedback::Route::AlgebraicRightInverse: return "algebraic";
        case state_feedback::Route::Lmi: return "lmi";
        case state_feedback::Route::Deadbeat: return "deadbeat";
    }
    return "unknown";
}

}  // namespace

json to_json(const state_feedback::GainCertificate& c) {
    json j = {{"K", matrix_to_json(c.K)},
              {"route", route_name(c.route)},
              {"right_inverse", matrix_to_json(c.right_inverse)},
              {"closed_loop", matrix_to_json(c.closed_loop)},
              {"spectrum", spectrum_to_json(c.closed_spectrum)}};
    if (c.theta) j["theta"] = matrix_to_json(*c.theta);
    return j;
}

json to_json(const lqr::LqrCertificate& c) {
    json j = {{"K", matrix_to_json(c.K)},
              {"P_plus", matrix_to_json(c.P_plus)},
              {"branch", c.branch == lqr::LqrBranch::SysIdBranch
                             ? "sysid"
                             : "pathological"}};
    if (c.right_inverse) j["right_inverse"] = matrix_to_json(*c.right_inverse);
    if (c.theta) j["theta"] = matrix_to_json(*c.theta);
    return j;
}

json to_json(const lqr::LqrVerdict& v) {
    json j = {{"informative", v.informative}};
    if (v.branch)
        j["branch"] = *v.branch == lqr::LqrBranch::SysIdBranch
                          ? "sysid"
                          : "pathological";
    return j;
}

json to_json(const dynamic_feedback::IsoCertificate& c) {
    return {{"S", matrix_to_json(c.S)},
            {"V1", matrix_to_json(c.V1)},
            {"V2", matrix_to_json(c.V2)},
            {"identified", system_to_json(c.identified)},
            {"K", matrix_to_json(c.compensator.K)},
            {"L", matrix_to_json(c.compensator.L)},
            {"M", matrix_to_json(c.compensator.M)},
            {"closed_loop_spectrum", spectrum_to_json(c.closed_loop_spectrum)}};
}

json to_json(const oracle::VerifyReport& r) {
    json j = {{"checked", r.checked},
              {"falsified", r.falsified},
              {"worst_metric", r.worst_metric}};
    if (r.falsifier) j["falsifier"] = system_to_json(*r.falsifier);
    return j;
}

lqr::LqrWeights weights_from_json(const json& j) {
    if (!j.contains("Q") || !j.contains("R"))
        throw MalformedProblem("weights: need both Q and R");
    lqr::LqrWeights w;
    w.Q = matrix_from_json(j.at("Q"));
    w.R = matrix_from_json(j.at("R"));
    return w;
}

oracle::Controller controller_from_json(const json& j) {
    oracle::Controller c;
    const std::string kind = j.value("kind", "stabilizing");
    if (kind == "stabilizing") {
        c.kind = oracle::ControllerKind::Stabilizing;
    } else if (kind == "deadbeat") {
        c.kind = oracle::ControllerKind::Deadbeat;
    } else if (kind == "lqr") {
        c.kind = oracle::ControllerKind::Lqr;
    } else if (kind == "output-feedback") {
        c.kind = oracle::ControllerKind::OutputFeedback;
    } else {
        throw MalformedProblem("controller: unknown kind '" + kind + "'");
    }
    if (c.kind == oracle::ControllerKind::OutputFeedback) {
        dynamic_feedback::Compensator comp;
        comp.K = matrix_from_json(j.at("K"));
        comp.L = matrix_from_json(j.at("L"));
        comp.M = matrix_from_json(j.at("M"));
        c.compensator = std::move(comp);
    } else {
        c.K = matrix_from_json(j.at("K"));
    }
    if (j.contains("weights")) c.weights = weights_from_json(j.at("weights"));
    if (j.contains("P_plus")) c.P_plus = matrix_from_json(j.at("P_plus"));
    return c;
}

json controller_to_json(const oracle::Controller& c) {
    json j;
    switch (c.kind) {
        case oracle::ControllerKind::Stabilizing: j["kind"] = "stabilizing"; break;
        case oracle::ControllerKind::Deadbeat: j["kind"] = "deadbeat"; break;
        case oracle::ControllerKind::Lqr: j["kind"] = "lqr"; break;
        case oracle::ControllerKind::OutputFeedback:
            j["kind"] = "output-feedback";
            break;
    }
    if (c.compensator) {
        j["K"] = matrix_to_json(c.compensator->K);
        j["L"] = matrix_to_json(c.compensator->L);
        j["M"] = matrix_to_json(c.compensator->M);
    } else {
        j["K"] = matrix_to_json(c.K);
    }
    if (c.weights) {
        j["weights"] = {{"Q", matrix_to_json(c.weights->Q)},
                        {"R", matrix_to_json(c.weights->R)}};
    }
    if (c.P_plus) j["P_plus"] = matrix_to_json(*c.P_plus);
    return j;
}

}  // namespace ddc::serialize
