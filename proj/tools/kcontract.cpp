// Command-line front end: compound/measure computation, sampled
// certification pipelines, decomposition, and simulation of the built-in
// model catalog.
//
// Exit codes: 0 = success / check passed, 1 = check ran and failed,
// 2 = usage or input error.

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "kcontract/certify.hpp"
#include "kcontract/compound.hpp"
#include "kcontract/decompose.hpp"
#include "kcontract/errors.hpp"
#include "kcontract/matrix_io.hpp"
#include "kcontract/measures.hpp"
#include "kcontract/models.hpp"
#include "kcontract/simulate.hpp"

namespace kc = kcontract;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct ModelOptions {
    std::string name;
    std::vector<std::string> params;
    std::string matrix_path;
    std::string graph_path;
};

void add_model_options(CLI::App* cmd, ModelOptions& opts) {
    cmd->add_option("--model", opts.name, "catalog model name")->required();
    cmd->add_option("--param", opts.params, "model parameter as name=value (repeatable)");
    cmd->add_option("--matrix", opts.matrix_path, "matrix file for the lti model (.json or .csv)");
    cmd->add_option("--graph", opts.graph_path,
                    "edge-list CSV (from,to,weight) for the consensus models");
}

kc::Params parse_params(const std::vector<std::string>& kvs) {
    kc::Params params;
    for (const auto& kv : kvs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw kc::InvalidArgument("bad --param '" + kv + "' (expected name=value)");
        std::size_t pos = 0;
        const double value = std::stod(kv.substr(eq + 1), &pos);
        if (pos != kv.size() - eq - 1)
            throw kc::InvalidArgument("bad --param value in '" + kv + "'");
        params[kv.substr(0, eq)] = value;
    }
    return params;
}

kc::VectorFieldModel resolve_model(const ModelOptions& opts) {
    if (opts.name == "lti") {
        if (opts.matrix_path.empty())
            throw kc::InvalidArgument("model 'lti' needs --matrix A.json (or use lti-example6)");
        return kc::build_lti(kc::load_matrix(opts.matrix_path));
    }
    const kc::Params params = parse_params(opts.params);
    if (!opts.graph_path.empty()) {
        const Eigen::MatrixXd edges = kc::load_matrix(opts.graph_path);
        const Eigen::MatrixXd L = kc::laplacian_from_edge_list(edges);
        const bool tanh_flavor = params.count("tanh") && params.at("tanh") != 0;
        if (opts.name == "laplacian-consensus")
            return kc::build_laplacian_consensus(L, tanh_flavor);
        if (opts.name == "second-order-consensus") {
            const double alpha = params.count("alpha") ? params.at("alpha") : 1.0;
            const double beta = params.count("beta") ? params.at("beta") : 1.0;
            kc::VectorFieldModel m = kc::assemble_feedback(
                kc::second_order_consensus_system(L, alpha, beta, tanh_flavor));
            m.id = "second-order-consensus";
            return m;
        }
        throw kc::InvalidArgument("--graph only applies to the consensus models");
    }
    return kc::build_model(opts.name, params);
}

kc::SubspacePair load_pair(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw kc::InvalidArgument("cannot open '" + path + "'");
    const json j = json::parse(in);
    if (!j.contains("U") || !j.contains("V"))
        throw kc::InvalidArgument("pair JSON must have fields U and V");
    return kc::SubspacePair{kc::matrix_from_json(j.at("U")), kc::matrix_from_json(j.at("V"))};
}

kc::SubspacePair resolve_pair(const ModelOptions& opts, const std::string& pair_path) {
    if (!pair_path.empty()) return load_pair(pair_path);
    auto known = kc::model_known_pair(opts.name, parse_params(opts.params));
    if (!known)
        throw kc::InvalidArgument("model '" + opts.name +
                                  "' has no built-in decomposition pair; pass --pair UV.json");
    return *known;
}

Eigen::VectorXd parse_vector(const std::string& csv) {
    std::vector<double> vals;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const auto comma = csv.find(',', start);
        const std::string cell =
            csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        std::size_t pos = 0;
        vals.push_back(std::stod(cell, &pos));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
    return v;
}

void emit(const json& j, const std::string& out_path) {
    std::cout << j.dump(2) << '\n';
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw kc::InvalidArgument("cannot write '" + out_path + "'");
        out << j.dump(2) << '\n';
    }
}

json pair_validation_json(const kc::SubspacePair& pair) {
    const kc::PairResiduals r = kc::validate_pair(pair);
    return json{{"utu", r.utu},
                {"vtv", r.vtv},
                {"utv", r.utv},
                {"completeness", r.completeness},
                {"passed", r.passed}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-contraction toolkit: compounds, matrix measures, sampled contraction "
                 "certificates, serial decompositions, and ODE simulation"};
    app.require_subcommand(1);

    // ---- compound ----
    std::string cp_in, cp_out, cp_kind = "additive";
    int cp_k = 2;
    auto* cmd_compound = app.add_subcommand("compound", "k-th compound of a matrix");
    cmd_compound->add_option("--in", cp_in, "input matrix (.json or .csv)")->required();
    cmd_compound->add_option("--k", cp_k, "compound order")->required();
    cmd_compound->add_option("--kind", cp_kind, "additive | multiplicative");
    cmd_compound->add_option("--out", cp_out, "output path (JSON)");

    // ---- measure ----
    std::string ms_in, ms_norm = "inf";
    bool ms_second = false;
    auto* cmd_measure = app.add_subcommand("measure", "matrix measure (logarithmic norm)");
    cmd_measure->add_option("--in", ms_in, "input matrix")->required();
    cmd_measure->add_option("--norm", ms_norm, "1 | 2 | inf");
    cmd_measure->add_flag("--of-second-compound", ms_second,
                          "measure of A^[2] via the closed forms");

    // shared certification options
    ModelOptions ct_model, dc_model, nb_model, cv_model, sm_model;
    std::string ct_norm = "inf", ct_v_path, ct_u_path, ct_out;
    int ct_k = 2;
    double ct_eta = 1e-6;
    kc::SamplingGrid grid;
    const auto add_grid_options = [&grid](CLI::App* cmd) {
        cmd->add_option("--grid-points", grid.points_per_axis, "grid points per axis (default 9)");
        cmd->add_option("--random-samples", grid.random_samples,
                        "random sample count (default 1000)");
        cmd->add_option("--seed", grid.seed, "RNG seed for random samples (default 0)");
        cmd->add_option("--t-horizon", grid.t_horizon,
                        "time horizon for time-varying models (default: forcing period or 10)");
        cmd->add_option("--time-samples", grid.time_samples, "time samples (default 17)");
    };

    // ---- certify ----
    auto* cmd_certify = app.add_subcommand("certify", "sampled contraction certificate");
    add_model_options(cmd_certify, ct_model);
    cmd_certify->add_option("--k", ct_k, "contraction order (1 or 2)");
    cmd_certify->add_option("--norm", ct_norm, "1 | 2 | inf");
    cmd_certify->add_option("--eta-min", ct_eta, "required contraction margin (default 1e-6)");
    cmd_certify->add_option("--subspace-v", ct_v_path, "restrict 2-contraction to span(V)");
    cmd_certify->add_option("--subspace-u", ct_u_path, "restrict 1-contraction to span(U)");
    cmd_certify->add_option("--out", ct_out, "write certificate JSON here");
    add_grid_options(cmd_certify);

    // ---- decompose ----
    std::string dc_first_integral, dc_lti, dc_pair, dc_out;
    auto* cmd_decompose =
        app.add_subcommand("decompose", "verify/construct a serial decomposition");
    add_model_options(cmd_decompose, dc_model);
    cmd_decompose->add_option("--first-integral", dc_first_integral,
                              "vector c defining the first integral c^T x");
    cmd_decompose->add_option("--lti", dc_lti, "matrix whose eigenstructure yields the pair");
    cmd_decompose->add_option("--pair", dc_pair, "explicit pair file {\"U\":..., \"V\":...}");
    cmd_decompose->add_option("--out", dc_out, "write result JSON here");
    add_grid_options(cmd_decompose);

    // ---- simulate ----
    std::string sm_x0 = "0", sm_out, sm_report;
    double sm_t0 = 0.0, sm_tend = 100.0;
    auto* cmd_simulate = app.add_subcommand("simulate", "integrate a model and analyze the tail");
    add_model_options(cmd_simulate, sm_model);
    cmd_simulate->add_option("--x0", sm_x0, "initial condition, comma separated")->required();
    cmd_simulate->add_option("--t0", sm_t0, "start time");
    cmd_simulate->add_option("--t-end", sm_tend, "end time")->required();
    cmd_simulate->add_option("--out", sm_out, "trajectory CSV path");
    cmd_simulate->add_option("--report", sm_report, "asymptotics report JSON path");

    // ---- nob-check ----
    std::string nb_pair, nb_norm = "inf", nb_out;
    double nb_eta = 1e-6;
    auto* cmd_nob = app.add_subcommand(
        "nob-check", "non-oscillation pipeline: pair validation, reducibility, restricted "
                     "2-contraction");
    add_model_options(cmd_nob, nb_model);
    cmd_nob->add_option("--pair", nb_pair, "pair file (default: model's built-in pair)");
    cmd_nob->add_option("--norm", nb_norm, "1 | 2 | inf");
    cmd_nob->add_option("--eta-min", nb_eta, "required contraction margin");
    cmd_nob->add_option("--out", nb_out, "write composite certificate JSON here");
    add_grid_options(cmd_nob);

    // ---- converge-check ----
    std::string cv_pair, cv_norm = "inf", cv_out;
    double cv_eta = 1e-6;
    auto* cmd_conv = app.add_subcommand(
        "converge-check", "convergence pipeline: reducibility plus restricted 2- and "
                          "1-contraction under one norm");
    add_model_options(cmd_conv, cv_model);
    cmd_conv->add_option("--pair", cv_pair, "pair file (default: model's built-in pair)");
    cmd_conv->add_option("--norm", cv_norm, "1 | 2 | inf");
    cmd_conv->add_option("--eta-min", cv_eta, "required contraction margin");
    cmd_conv->add_option("--out", cv_out, "write composite certificate JSON here");
    add_grid_options(cmd_conv);

    // ---- models ----
    auto* cmd_models = app.add_subcommand("models", "list the built-in model catalog");
    cmd_models->add_subcommand("list", "list the built-in model catalog");

    // ---- demo ----
    std::string demo_name, demo_out;
    auto* cmd_demo = app.add_subcommand("demo", "reproduce a canned study");
    cmd_demo->add_option("name", demo_name, "duffing-figure | sin-clock-period")->required();
    cmd_demo->add_option("--out", demo_out, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (cmd_compound->parsed()) {
            const Eigen::MatrixXd A = kc::load_matrix(cp_in);
            Eigen::MatrixXd C;
            if (cp_kind == "additive")
                C = kc::add_compound(A, cp_k);
            else if (cp_kind == "multiplicative")
                C = kc::mult_compound(A, cp_k);
            else
                throw kc::InvalidArgument("--kind must be additive or multiplicative");
            emit(kc::matrix_to_json(C), cp_out);
            return kExitOk;
        }

        if (cmd_measure->parsed()) {
            const Eigen::MatrixXd A = kc::load_matrix(ms_in);
            const kc::Norm p = kc::norm_from_name(ms_norm);
            const double mu =
                ms_second ? kc::measure_of_second_compound(A, p) : kc::measure(A, p);
            std::cout.precision(17);
            std::cout << mu << '\n';
            return kExitOk;
        }

        if (cmd_certify->parsed()) {
            const kc::VectorFieldModel model = resolve_model(ct_model);
            const kc::Norm p = kc::norm_from_name(ct_norm);
            kc::Certificate cert;
            if (!ct_v_path.empty())
                cert = kc::certify_subspace_2contraction(model, kc::load_matrix(ct_v_path), p,
                                                         grid, ct_eta);
            else if (!ct_u_path.empty())
                cert = kc::certify_subspace_1contraction(model, kc::load_matrix(ct_u_path), p,
                                                         grid, ct_eta);
            else
                cert = kc::certify_k_contraction(model, ct_k, p, grid, ct_eta);
            emit(cert.to_json(), ct_out);
            return cert.passed ? kExitOk : kExitCheckFailed;
        }

        if (cmd_decompose->parsed()) {
            const kc::VectorFieldModel model = resolve_model(dc_model);
            kc::SubspacePair pair;
            if (!dc_first_integral.empty()) {
                const Eigen::MatrixXd c = kc::load_matrix(dc_first_integral);
                pair = kc::pair_from_first_integral(
                    c.cols() == 1 ? Eigen::VectorXd(c.col(0))
                                  : Eigen::VectorXd(c.row(0).transpose()));
            } else if (!dc_lti.empty()) {
                pair = kc::lti_invariant_pair(kc::load_matrix(dc_lti));
            } else {
                pair = resolve_pair(dc_model, dc_pair);
            }
            json out;
            out["U"] = kc::matrix_to_json(pair.U);
            out["V"] = kc::matrix_to_json(pair.V);
            out["pair_validation"] = pair_validation_json(pair);
            const kc::Certificate red = kc::check_reducibility(model, pair, grid);
            out["reducibility"] = red.to_json();
            if (red.passed) {
                out["reduced"] = json{
                    {"upstream_dim", pair.q_dim()},
                    {"downstream_dim", pair.p_dim()},
                    {"upstream", "y1' = V^T f(t, V y1)"},
                    {"downstream", "y2' = U^T f(t, U y2 + V y1)"},
                };
            }
            out["passed"] = red.passed;
            emit(out, dc_out);
            return red.passed ? kExitOk : kExitCheckFailed;
        }

        if (cmd_simulate->parsed()) {
            const kc::VectorFieldModel model = resolve_model(sm_model);
            const Eigen::VectorXd x0 = parse_vector(sm_x0);
            const kc::Trajectory traj = kc::integrate(model, x0, sm_t0, sm_tend);
            if (!sm_out.empty()) {
                std::ofstream out(sm_out);
                if (!out) throw kc::InvalidArgument("cannot write '" + sm_out + "'");
                out << traj.to_csv();
            }
            const kc::AsymptoticsReport eq = kc::detect_equilibrium(traj, model);
            kc::AsymptoticsReport rep = eq;
            if (eq.verdict != "converged_to_equilibrium") {
                const kc::AsymptoticsReport per = kc::detect_period(traj);
                if (per.verdict == "periodic") rep = per;
                rep.residuals.insert(per.residuals.begin(), per.residuals.end());
            }
            json j = rep.to_json();
            j["model"] = model.id;
            j["t_end"] = sm_tend;
            j["events"] = json::array();
            for (const auto& ev : traj.events)
                j["events"].push_back(json{{"time", ev.time}, {"tag", ev.tag}});
            emit(j, sm_report);
            return kExitOk;
        }

        if (cmd_nob->parsed()) {
            const kc::VectorFieldModel model = resolve_model(nb_model);
            const kc::SubspacePair pair = resolve_pair(nb_model, nb_pair);
            const kc::Norm p = kc::norm_from_name(nb_norm);
            json out;
            out["pair_validation"] = pair_validation_json(pair);
            const kc::Certificate red = kc::check_reducibility(model, pair, grid);
            out["reducibility"] = red.to_json();
            bool passed = red.passed;
            if (red.passed) {
                kc::Certificate cert =
                    kc::certify_subspace_2contraction(model, pair.V, p, grid, nb_eta);
                cert.kind = "nob";
                out["nob"] = cert.to_json();
                passed = cert.passed;
            }
            out["passed"] = passed;
            emit(out, nb_out);
            return passed ? kExitOk : kExitCheckFailed;
        }

        if (cmd_conv->parsed()) {
            kc::VectorFieldModel model;
            if (cv_model.name == "lti" && !cv_model.matrix_path.empty())
                model = kc::build_lti(kc::load_matrix(cv_model.matrix_path));
            else
                model = resolve_model(cv_model);
            kc::SubspacePair pair;
            if (!cv_pair.empty())
                pair = load_pair(cv_pair);
            else if (cv_model.name == "lti" && !cv_model.matrix_path.empty())
                pair = kc::lti_invariant_pair(kc::load_matrix(cv_model.matrix_path));
            else
                pair = resolve_pair(cv_model, cv_pair);
            const kc::Norm p = kc::norm_from_name(cv_norm);
            json out;
            out["pair_validation"] = pair_validation_json(pair);
            const kc::Certificate red = kc::check_reducibility(model, pair, grid);
            out["reducibility"] = red.to_json();
            bool passed = false;
            if (red.passed) {
                const kc::Certificate cert =
                    kc::certify_convergence(model, pair.U, pair.V, p, grid, cv_eta);
                out["convergence"] = cert.to_json();
                passed = cert.passed;
            }
            out["passed"] = passed;
            emit(out, cv_out);
            return passed ? kExitOk : kExitCheckFailed;
        }

        if (cmd_models->parsed()) {
            for (const auto& entry : kc::model_catalog()) {
                std::cout << entry.name << "\n  " << entry.description << "\n";
                if (!entry.defaults.empty()) {
                    std::cout << "  parameters:";
                    for (const auto& [k, v] : entry.defaults) std::cout << ' ' << k << '=' << v;
                    std::cout << '\n';
                }
            }
            return kExitOk;
        }

        if (cmd_demo->parsed()) {
            if (demo_name == "duffing-figure") {
                const kc::VectorFieldModel model = kc::build_model("duffing");
                const kc::Trajectory traj =
                    kc::integrate(model, Eigen::Vector2d(0, 0), 0.0, 500.0);
                const std::string path = demo_out.empty() ? "duffing_figure.csv" : demo_out;
                std::ofstream out(path);
                if (!out) throw kc::InvalidArgument("cannot write '" + path + "'");
                out << traj.to_csv();
                std::cout << "wrote " << path << " (" << traj.times.size() << " rows)\n";
                return kExitOk;
            }
            if (demo_name == "sin-clock-period") {
                const kc::VectorFieldModel model = kc::build_model("sin-clock");
                const kc::Trajectory traj =
                    kc::integrate(model, Eigen::Vector2d(0, 0), 0.0, 50.0);
                const kc::AsymptoticsReport rep = kc::detect_period(traj);
                json j = rep.to_json();
                j["model"] = model.id;
                emit(j, demo_out.empty() ? "sin_clock_period.json" : demo_out);
                return rep.verdict == "periodic" ? kExitOk : kExitCheckFailed;
            }
            throw kc::InvalidArgument("unknown demo '" + demo_name + "'");
        }
    } catch (const kc::PrerequisiteError& e) {
        std::cerr << "check failed: " << e.what() << '\n';
        return kExitCheckFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
