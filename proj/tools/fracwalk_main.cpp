// Command-line front end for the fractional random-walk pipeline:
// forward modelling, simulation, recovery from three-step data, and
// geometric reconstruction, all on JSON artifacts.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fracwalk/fracwalk.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
    fracwalk::io::ExperimentConfig config;
    std::string out_dir = ".";
    bool seed_given = false;
    bool alpha_given = false;
    bool theta_given = false;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--alpha", opts.config.alpha, "Distance exponent")
        ->check(CLI::PositiveNumber)
        ->each([&](const std::string&) { opts.alpha_given = true; });
    cmd->add_option("--theta", opts.config.theta, "Diagonal staying weight")
        ->check(CLI::NonNegativeNumber)
        ->each([&](const std::string&) { opts.theta_given = true; });
    cmd->add_option("--seed", opts.config.seed, "RNG seed (falls back to FRACWALK_SEED)")
        ->each([&](const std::string&) { opts.seed_given = true; });
    cmd->add_option("--rank-tol", opts.config.rank_tol, "Relative rank tolerance")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--int-tol", opts.config.int_tol, "Integer detection tolerance")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--horizon", opts.config.horizon, "Observation horizon K")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--steps", opts.config.steps, "Trajectory length after burn-in")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--burn-in", opts.config.burn_in, "Discarded leading steps")
        ->check(CLI::NonNegativeNumber);
}

void resolve_seed(CommonOptions& opts) {
    if (opts.seed_given) return;
    if (const char* env = std::getenv("FRACWALK_SEED")) {
        try {
            opts.config.seed = std::stoull(env);
        } catch (const std::exception&) {
            throw fracwalk::ParseError("FRACWALK_SEED is not a valid integer");
        }
    }
}

void write_artifact(const CommonOptions& opts, const std::string& name, const json& payload) {
    fs::create_directories(opts.out_dir);
    const std::string path = (fs::path(opts.out_dir) / name).string();
    fracwalk::io::write_text_file(path, fracwalk::io::dump_canonical(payload));
    std::cout << "wrote " << path << "\n";
}

struct ForwardModel {
    fracwalk::Graph graph;
    Eigen::VectorXd gamma;
    double alpha;
    double theta;
};

ForwardModel load_forward_model(const std::string& graph_path, const CommonOptions& opts) {
    fracwalk::io::GraphFile file = fracwalk::io::parse_graph(graph_path);
    Eigen::VectorXd gamma =
        file.gamma ? *file.gamma : Eigen::VectorXd::Ones(file.graph.n()).eval();
    const double alpha =
        opts.alpha_given ? opts.config.alpha : file.alpha.value_or(opts.config.alpha);
    const double theta =
        opts.theta_given ? opts.config.theta : file.theta.value_or(opts.config.theta);
    return ForwardModel{std::move(file.graph), std::move(gamma), alpha, theta};
}

int run_generate(const CommonOptions& opts) {
    fracwalk::RandomAdmissibleOptions gen_opts;
    gen_opts.alpha = opts.config.alpha;
    const fracwalk::Graph g = fracwalk::random_admissible_graph(opts.config.seed, gen_opts);
    const auto report = fracwalk::check_admissibility(g, opts.config.alpha, opts.config.rank_tol);
    write_artifact(opts, "graph.json",
                   fracwalk::io::graph_to_json(g, std::nullopt, opts.config.alpha, opts.config.theta));
    std::cout << "n=" << g.n() << " observable=" << g.observable_count()
              << " hidden=" << g.hidden_count() << " edges=" << g.edges().size()
              << " a1_ok=" << report.a1_ok << " a2_ok=" << report.a2_ok << "\n";
    return 0;
}

int run_forward(const std::string& graph_path, const CommonOptions& opts) {
    const ForwardModel model = load_forward_model(graph_path, opts);
    const fracwalk::TransitionMatrix p =
        fracwalk::build_transition(model.graph, model.gamma, model.alpha, model.theta);
    const fracwalk::ObservationData data = fracwalk::exact_observation_data(p, opts.config.horizon);
    write_artifact(opts, "transition.json", fracwalk::io::transition_to_json(p));
    write_artifact(opts, "lambda.json", fracwalk::io::observation_to_json(data));
    return 0;
}

int run_simulate(const std::string& graph_path, const CommonOptions& opts) {
    const ForwardModel model = load_forward_model(graph_path, opts);
    const fracwalk::TransitionMatrix p =
        fracwalk::build_transition(model.graph, model.gamma, model.alpha, model.theta);
    const auto trajectory = fracwalk::simulate_walk(p, 0, opts.config.burn_in + opts.config.steps,
                                                    opts.config.seed);
    const std::vector<int> retained(trajectory.begin() + opts.config.burn_in, trajectory.end());
    const fracwalk::ObservationStream stream =
        fracwalk::observe(retained, model.graph.observable_count());
    const fracwalk::EmpiricalData empirical =
        fracwalk::estimate_observation_data(stream, opts.config.horizon);

    fs::create_directories(opts.out_dir);
    const std::string stream_path = (fs::path(opts.out_dir) / "stream.txt").string();
    fracwalk::io::write_text_file(stream_path, fracwalk::io::stream_to_text(stream));
    std::cout << "wrote " << stream_path << "\n";
    write_artifact(opts, "empirical.json", fracwalk::io::empirical_to_json(empirical));
    for (int x = 0; x < model.graph.observable_count(); ++x)
        if (!empirical.row_defined(x))
            std::cerr << "warning: observable vertex " << x << " never visited; row undefined\n";
    return 0;
}

int run_recover(const std::string& data_path, const CommonOptions& opts) {
    const json payload = fracwalk::io::parse_json_file(data_path);
    const fracwalk::ObservationData data = fracwalk::io::observation_from_json(payload);
    if (payload.contains("visit_counts"))
        for (std::size_t x = 0; x < payload.at("visit_counts").size(); ++x)
            if (payload.at("visit_counts").at(x).get<long>() == 0)
                std::cerr << "warning: empirical row " << x << " is undefined\n";
    const fracwalk::CanonicalRepresentative rep =
        fracwalk::recover_canonical(data, opts.config.rank_tol);
    if (rep.rank_gap < 10.0)
        std::cerr << "warning: spectral gap at the rank cutoff is only " << rep.rank_gap << "\n";
    write_artifact(opts, "canonical.json", fracwalk::io::canonical_to_json(rep));
    std::cout << "recovered_vertex_count=" << fracwalk::recovered_vertex_count(rep)
              << " (lower bound unless the graph satisfies (A1))\n";
    return 0;
}

int run_reconstruct(const std::string& input_path, const CommonOptions& opts) {
    fracwalk::KernelMatrix kernel{Eigen::MatrixXd()};
    if (input_path.ends_with(".csv")) {
        kernel = fracwalk::make_kernel(fracwalk::io::read_csv_matrix(input_path));
        const fracwalk::ReconstructionResult result =
            fracwalk::reconstruct_full(kernel, opts.config.int_tol);
        write_artifact(opts, "reconstruction.json", fracwalk::io::reconstruction_to_json(result));
        std::cout << "edges=" << result.edges.size() << " leaves=" << result.leaves.size() << "\n";
        return 0;
    }
    const json payload = fracwalk::io::parse_json_file(input_path);
    if (payload.contains("f")) {
        kernel = fracwalk::make_kernel(fracwalk::io::matrix_from_json(payload.at("f")));
    } else if (payload.contains("C")) {
        const double alpha = opts.alpha_given
                                 ? opts.config.alpha
                                 : payload.value("alpha", opts.config.alpha);
        const Eigen::MatrixXd c = fracwalk::io::matrix_from_json(payload.at("C"));
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(c.rows());
        kernel = fracwalk::kernel_from_interaction(c, alpha, ones, ones);
    } else {
        throw fracwalk::ParseError("reconstruct input needs a kernel 'f' or interaction 'C'");
    }
    const fracwalk::ReconstructionResult result =
        fracwalk::reconstruct_full(kernel, opts.config.int_tol);
    write_artifact(opts, "reconstruction.json", fracwalk::io::reconstruction_to_json(result));
    std::cout << "edges=" << result.edges.size() << " leaves=" << result.leaves.size() << "\n";
    return 0;
}

int run_verify(const std::string& input_path, const CommonOptions& opts) {
    if (input_path.ends_with(".csv")) {
        const Eigen::MatrixXd p = fracwalk::io::read_csv_matrix(input_path);
        const auto conditions = fracwalk::check_conditions(p, p.minCoeff() > 0);
        json report;
        report["conditions"] = fracwalk::io::conditions_to_json(conditions);
        write_artifact(opts, "verify.json", report);
        std::cout << "conditions_overall=" << conditions.overall << "\n";
        return 0;
    }
    const json payload = fracwalk::io::parse_json_file(input_path);
    json report;
    if (payload.contains("edges")) {
        const ForwardModel model = load_forward_model(input_path, opts);
        const auto admissibility =
            fracwalk::check_admissibility(model.graph, model.alpha, opts.config.rank_tol);
        const fracwalk::TransitionMatrix p =
            fracwalk::build_transition(model.graph, model.gamma, model.alpha, model.theta);
        const auto conditions = fracwalk::check_conditions(p.p, model.theta > 0);
        report["admissibility"] = fracwalk::io::admissibility_to_json(admissibility);
        report["conditions"] = fracwalk::io::conditions_to_json(conditions);
        std::cout << "a1_ok=" << admissibility.a1_ok << " a2_ok=" << admissibility.a2_ok
                  << " conditions_overall=" << conditions.overall << "\n";
    } else {
        const Eigen::MatrixXd p = fracwalk::io::matrix_from_json(
            payload.contains("P") ? payload.at("P") : payload);
        const auto conditions = fracwalk::check_conditions(p, p.minCoeff() > 0);
        report["conditions"] = fracwalk::io::conditions_to_json(conditions);
        std::cout << "conditions_overall=" << conditions.overall << "\n";
    }
    write_artifact(opts, "verify.json", report);
    return 0;
}

int run_roundtrip(const std::string& graph_path, const CommonOptions& opts) {
    const ForwardModel model = load_forward_model(graph_path, opts);
    const fracwalk::TransitionMatrix p =
        fracwalk::build_transition(model.graph, model.gamma, model.alpha, model.theta);
    const fracwalk::ObservationData data = fracwalk::exact_observation_data(p, 3);
    const fracwalk::CanonicalRepresentative rep =
        fracwalk::recover_canonical(data, opts.config.rank_tol);

    const int count = fracwalk::recovered_vertex_count(rep);
    const bool count_match = count == model.graph.n();
    const double lambda_dev =
        fracwalk::verify_redundancy(p.p, rep.q, model.graph.observable_count(), 10);
    double gauge_residual = std::numeric_limits<double>::infinity();
    if (rep.hidden_rank == model.graph.hidden_count()) {
        const auto gauge = fracwalk::solve_gauge(p.p, rep.q, model.graph.observable_count(), 1e-8,
                                                 opts.config.rank_tol);
        if (gauge)
            gauge_residual = fracwalk::max_abs(Eigen::MatrixXd(
                fracwalk::gauge_action(*gauge, rep.q, model.graph.observable_count()) - p.p));
    }

    const fracwalk::RecoveredInteraction interaction = fracwalk::recover_interaction(p.p);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(model.graph.n());
    const fracwalk::KernelMatrix kernel =
        fracwalk::kernel_from_interaction(interaction.c, model.alpha, ones, ones);
    const fracwalk::ReconstructionResult reconstruction =
        fracwalk::reconstruct_full(kernel, opts.config.int_tol);
    const bool edges_match = reconstruction.edges == model.graph.edges();

    double spread = 0.0;
    {
        Eigen::VectorXd recovered(model.graph.n());
        for (int x = 0; x < model.graph.n(); ++x)
            recovered(x) = std::pow(reconstruction.sigma1(x) * reconstruction.sigma2(x), model.alpha) /
                           model.gamma(x);
        spread = recovered.maxCoeff() / recovered.minCoeff() - 1.0;
    }

    json report;
    report["true_n"] = model.graph.n();
    report["true_hidden"] = model.graph.hidden_count();
    report["recovered_vertex_count"] = count;
    report["r"] = rep.hidden_rank;
    report["count_match"] = count_match;
    report["lambda_max_deviation"] = lambda_dev;
    report["gauge_residual"] = gauge_residual;
    report["edges_match"] = edges_match;
    report["gamma_ratio_spread"] = spread;
    const bool ok = count_match && edges_match && lambda_dev <= 1e-8 && spread <= 1e-8 &&
                    gauge_residual <= 1e-8;
    report["ok"] = ok;
    write_artifact(opts, "roundtrip.json", report);
    std::cout << "roundtrip " << (ok ? "ok" : "FAILED") << ": count_match=" << count_match
              << " edges_match=" << edges_match << " lambda_dev=" << lambda_dev
              << " gamma_spread=" << spread << "\n";
    if (!ok) throw fracwalk::NumericalError("roundtrip mismatch against the ground truth");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional-conductivity random walks: forward, inverse, and reconstruction"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string graph_path, data_path, input_path;

    CLI::App* generate = app.add_subcommand("generate", "Emit a random admissible graph");
    add_common_flags(generate, opts);

    CLI::App* forward = app.add_subcommand("forward", "Transition matrix and exact Lambda_K");
    forward->add_option("--graph", graph_path, "Graph JSON file")->required();
    add_common_flags(forward, opts);

    CLI::App* simulate = app.add_subcommand("simulate", "Walk simulation and empirical Lambda_K");
    simulate->add_option("--graph", graph_path, "Graph JSON file")->required();
    add_common_flags(simulate, opts);

    CLI::App* recover = app.add_subcommand("recover", "Canonical representative from Lambda_3");
    recover->add_option("--data", data_path, "Observation data JSON file")->required();
    add_common_flags(recover, opts);

    CLI::App* reconstruct =
        app.add_subcommand("reconstruct", "Edge set and sigma from a kernel or interaction matrix");
    reconstruct->add_option("--input", input_path, "Kernel or interaction JSON file")->required();
    add_common_flags(reconstruct, opts);

    CLI::App* verify = app.add_subcommand("verify", "Admissibility and matrix condition reports");
    verify->add_option("--input", input_path, "Graph or matrix JSON file")->required();
    add_common_flags(verify, opts);

    CLI::App* roundtrip = app.add_subcommand("roundtrip", "Forward, recover, reconstruct, diff");
    roundtrip->add_option("--graph", graph_path, "Graph JSON file")->required();
    add_common_flags(roundtrip, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        resolve_seed(opts);
        if (generate->parsed()) return run_generate(opts);
        if (forward->parsed()) return run_forward(graph_path, opts);
        if (simulate->parsed()) return run_simulate(graph_path, opts);
        if (recover->parsed()) return run_recover(data_path, opts);
        if (reconstruct->parsed()) return run_reconstruct(input_path, opts);
        if (verify->parsed()) return run_verify(input_path, opts);
        if (roundtrip->parsed()) return run_roundtrip(graph_path, opts);
    } catch (const fracwalk::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const fracwalk::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
