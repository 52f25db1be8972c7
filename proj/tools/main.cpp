#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>

#include "ddc/analysis.hpp"
#include "ddc/data.hpp"
#include "ddc/dynamic_feedback.hpp"
#include "ddc/lqr.hpp"
#include "ddc/oracle.hpp"
#include "ddc/serialize.hpp"
#include "ddc/state_feedback.hpp"
#include "ddc/types.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 = informative / synthesized / verified-pass,
// 2 = mathematically negative (not informative, falsified),
// 1 = malformed input or numerical failure.
constexpr int kExitPositive = 0;
constexpr int kExitOperational = 1;
constexpr int kExitNegative = 2;

using ddc::serialize::json;

struct Options {
    std::string data_path;
    std::string property;
    std::string task;
    std::string method = "lmi";
    std::string weights_path;
    std::string controller_path;
    std::string system_path;
    std::string input_path;
    std::string x0_path;
    std::string output_path;
    std::string format = "json";
    int samples = 100;
    unsigned seed = 1;
    double bound = -1.0;  // negative = kind default
    int order = 0;
    int depth = 0;
    ddc::Tolerances tol;
};

json result_shell(const Options& opt) {
    return {{"version", kVersion},
            {"tolerances",
             {{"rank_tol_scale", opt.tol.rank_tol_scale},
              {"stability_margin", opt.tol.stability_margin},
              {"lmi_strict_eps", opt.tol.lmi_strict_eps}}}};
}

void emit(const Options& opt, const json& result) {
    if (opt.output_path.empty()) {
        std::cout << result.dump(2) << "\n";
    } else {
        std::ofstream out(opt.output_path);
        if (!out)
            throw ddc::MalformedProblem("cannot open output file: " +
                                        opt.output_path);
        out << result.dump(2) << "\n";
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ddc::MalformedProblem("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ddc::MalformedProblem("invalid JSON in " + path + ": " +
                                    e.what());
    }
    return j;
}

int run_analyze(const Options& opt) {
    ddc::DataSet data = ddc::load_dataset_json(opt.data_path);
    ddc::BlockMatrices bm = ddc::assemble(data);
    ddc::analysis::AnalysisVerdict v;
    if (opt.property == "sysid") {
        v = ddc::analysis::informative_sysid(bm, opt.tol);
    } else if (opt.property == "controllability") {
        v = ddc::analysis::informative_controllability(bm, opt.tol);
    } else if (opt.property == "stabilizability") {
        v = ddc::analysis::informative_stabilizability(bm, opt.tol);
    } else if (opt.property == "stability") {
        v = ddc::analysis::informative_stability(bm, opt.tol);
    } else {
        throw ddc::MalformedProblem("unknown property: " + opt.property);
    }
    json result = result_shell(opt);
    result["verdict"] = ddc::serialize::to_json(v);
    emit(opt, result);
    return v.informative ? kExitPositive : kExitNegative;
}

int run_synth(const Options& opt) {
    json result = result_shell(opt);
    if (opt.task == "io-feedback") {
        ddc::DataSet data = ddc::load_dataset_json(opt.data_path);
        if (data.experiments.size() != 1)
            throw ddc::MalformedProblem(
                "io-feedback requires a single experiment");
        const ddc::Experiment& exp = data.experiments.front();
        if (!exp.y)
            throw ddc::MalformedProblem("io-feedback requires output data");
        if (opt.order <= 0 || opt.depth <= 0)
            throw ddc::MalformedProblem(
                "io-feedback requires --order and --depth");
        auto cert = ddc::dynamic_feedback::synth_io_feedback(
            exp.u, *exp.y, opt.order, opt.depth, opt.tol);
        result["certificate"] = ddc::serialize::to_json(cert);
        emit(opt, result);
        return kExitPositive;
    }

    ddc::DataSet data = ddc::load_dataset_json(opt.data_path);
    ddc::BlockMatrices bm = ddc::assemble(data);
    if (opt.task == "stabilize") {
        ddc::state_feedback::GainCertificate cert =
            opt.method == "algebraic"
                ? ddc::state_feedback::stabilize_algebraic(bm, opt.tol)
                : ddc::state_feedback::stabilize_lmi(bm, opt.tol);
        result["certificate"] = ddc::serialize::to_json(cert);
    } else if (opt.task == "deadbeat") {
        result["certificate"] =
            ddc::serialize::to_json(ddc::state_feedback::deadbeat(bm, opt.tol));
    } else if (opt.task == "lqr") {
        if (opt.weights_path.empty())
            throw ddc::MalformedProblem("lqr synthesis requires --weights");
        ddc::lqr::LqrWeights w =
            ddc::serialize::weights_from_json(read_json_file(opt.weights_path));
        result["certificate"] = ddc::serialize::to_json(
            ddc::lqr::gain_from_data(bm, w, opt.tol));
    } else if (opt.task == "output-feedback") {
        result["certificate"] = ddc::serialize::to_json(
            ddc::dynamic_feedback::synth_output_feedback(bm, opt.tol));
    } else {
        throw ddc::MalformedProblem("unknown task: " + opt.task);
    }
    emit(opt, result);
    return kExitPositive;
}

int run_verify(const Options& opt) {
    ddc::DataSet data = ddc::load_dataset_json(opt.data_path);
    ddc::BlockMatrices bm = ddc::assemble(data);
    ddc::oracle::Controller ctrl = ddc::serialize::controller_from_json(
        read_json_file(opt.controller_path));
    const bool with_outputs =
        ctrl.kind == ddc::oracle::ControllerKind::OutputFeedback;
    ddc::oracle::ConsistentSetParam param =
        ddc::oracle::consistent_set(bm, with_outputs, opt.tol);
    const double bound =
        opt.bound >= 0.0 ? opt.bound : ddc::oracle::default_bound(ctrl.kind);
    ddc::oracle::VerifyReport report = ddc::oracle::verify_controller(
        param, ctrl, opt.samples, bound, opt.seed);
    json result = result_shell(opt);
    result["report"] = ddc::serialize::to_json(report);
    emit(opt, result);
    return report.falsified ? kExitNegative : kExitPositive;
}

int run_simulate(const Options& opt) {
    json sysj = read_json_file(opt.system_path);
    ddc::SystemModel sys;
    sys.A = ddc::serialize::matrix_from_json(sysj.at("A"));
    sys.B = ddc::serialize::matrix_from_json(sysj.at("B"));
    if (sysj.contains("C")) {
        sys.C = ddc::serialize::matrix_from_json(sysj.at("C"));
        sys.D = sysj.contains("D")
                    ? ddc::serialize::matrix_from_json(sysj.at("D"))
                    : ddc::Matrix::Zero(sys.C.rows(), sys.B.cols());
    }
    ddc::Matrix u = ddc::load_csv_signal(opt.input_path);
    ddc::Matrix x0m = ddc::load_csv_signal(opt.x0_path);
    if (x0m.cols() != 1)
        throw ddc::MalformedProblem("x0 file must contain exactly one row");
    ddc::Experiment exp = ddc::oracle::simulate(sys, x0m.col(0), u);

    ddc::DataSet out;
    out.n = static_cast<int>(sys.n());
    out.m = static_cast<int>(sys.m());
    out.p = static_cast<int>(sys.p());
    out.experiments.push_back(std::move(exp));
    if (opt.output_path.empty()) {
        std::cout << ddc::dataset_to_json(out) << "\n";
    } else {
        ddc::save_dataset_json(out, opt.output_path);
    }
    return kExitPositive;
}

int run_pe_order(const Options& opt) {
    ddc::DataSet data = ddc::load_dataset_json(opt.data_path);
    if (data.experiments.size() != 1)
        throw ddc::MalformedProblem("pe-order requires a single experiment");
    int order = ddc::persistency_order(data.experiments.front().u,
                                       opt.tol.rank_tol_scale);
    json result = result_shell(opt);
    result["persistency_order"] = order;
    emit(opt, result);
    return kExitPositive;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-driven analysis and controller synthesis for "
                 "discrete-time linear systems"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may appear after the subcommand
    Options opt;

    app.add_option("--rank-tol-scale", opt.tol.rank_tol_scale,
                   "Scale factor on the SVD rank tolerance");
    app.add_option("--stability-margin", opt.tol.stability_margin,
                   "Stable means spectral radius < 1 - margin");
    app.add_option("--output,-o", opt.output_path,
                   "Output file (default: stdout)");
    app.add_option("--format", opt.format, "Output format (json)");

    auto* analyze = app.add_subcommand("analyze", "Informativity analysis");
    analyze->add_option("--data", opt.data_path, "Data file (JSON)")
        ->required();
    analyze
        ->add_option("--property", opt.property,
                     "sysid|controllability|stabilizability|stability")
        ->required();

    auto* synth = app.add_subcommand("synth", "Controller synthesis");
    synth->add_option("--data", opt.data_path, "Data file (JSON)")->required();
    synth
        ->add_option("--task", opt.task,
                     "stabilize|deadbeat|lqr|output-feedback|io-feedback")
        ->required();
    synth->add_option("--weights", opt.weights_path,
                      "LQR weights file {Q, R}");
    synth->add_option("--method", opt.method,
                      "Stabilization route: lmi|algebraic");
    synth->add_option("--order", opt.order, "Model order n (io-feedback)");
    synth->add_option("--depth", opt.depth, "Hankel depth k (io-feedback)");

    auto* verify = app.add_subcommand("verify", "Controller verification");
    verify->add_option("--data", opt.data_path, "Data file (JSON)")->required();
    verify->add_option("--controller", opt.controller_path,
                       "Controller file (JSON)")
        ->required();
    verify->add_option("--samples", opt.samples, "Random samples to draw");
    verify->add_option("--seed", opt.seed, "RNG seed");
    verify->add_option("--bound", opt.bound,
                       "Acceptance bound (default per controller kind)");

    auto* simulate = app.add_subcommand("simulate", "Simulate a system");
    simulate->add_option("--system", opt.system_path, "System file (JSON)")
        ->required();
    simulate->add_option("--input", opt.input_path, "Input signal (CSV)")
        ->required();
    simulate->add_option("--x0", opt.x0_path, "Initial state (one CSV row)")
        ->required();

    auto* pe = app.add_subcommand("pe-order", "Persistency of excitation");
    pe->add_option("--data", opt.data_path, "Data file (JSON)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (opt.format != "json")
            throw ddc::MalformedProblem("unsupported format: " + opt.format);
        if (app.got_subcommand(analyze)) return run_analyze(opt);
        if (app.got_subcommand(synth)) return run_synth(opt);
        if (app.got_subcommand(verify)) return run_verify(opt);
        if (app.got_subcommand(simulate)) return run_simulate(opt);
        if (app.got_subcommand(pe)) return run_pe_order(opt);
    } catch (const ddc::NotInformative& e) {
        json result = result_shell(opt);
        result["verdict"] = {{"informative", false}, {"reason", e.what()}};
        try {
            emit(opt, result);
        } catch (...) {
        }
        std::cerr << "not informative: " << e.what() << "\n";
        return kExitNegative;
    } catch (const ddc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitOperational;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitOperational;
    }
    return kExitOperational;
}
