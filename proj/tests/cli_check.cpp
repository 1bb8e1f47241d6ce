// Black-box checks of the command-line binary: exit codes, artifact layout,
// and byte-identical reruns. Invoked by ctest with the binary path, the
// fixture directory, and a scratch directory.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <sys/wait.h>

#include "fracwalk/fracwalk.hpp"

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << what << "\n";
    if (!ok) ++failures;
}

int run(const std::string& command) {
    const int status = std::system(command.c_str());
    if (status < 0) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 4) {
        std::cerr << "usage: cli_check <fracwalk-binary> <fixture-dir> <work-dir>\n";
        return 1;
    }
    const std::string cli = argv[1];
    const fs::path fixtures = argv[2];
    const fs::path work = argv[3];
    fs::remove_all(work);
    fs::create_directories(work);
    const std::string quiet = " > /dev/null 2>&1";

    const std::string p5 = (fixtures / "p5.json").string();
    const std::string star = (fixtures / "star.json").string();
    const std::string lambda2 = (fixtures / "lambda2.json").string();

    {
        const fs::path out = work / "generate";
        const int code = run(cli + " generate --seed 7 --out " + out.string() + quiet);
        check(code == 0, "generate exits 0");
        check(fs::exists(out / "graph.json"), "generate writes graph.json");
        const auto file = fracwalk::io::parse_graph((out / "graph.json").string());
        const auto report = fracwalk::check_admissibility(file.graph, file.alpha.value_or(2.5));
        check(report.a1_ok && report.a2_ok, "generated graph is admissible");
    }

    {
        const fs::path out = work / "forward";
        const int code =
            run(cli + " forward --graph " + p5 + " --horizon 3 --out " + out.string() + quiet);
        check(code == 0, "forward exits 0");
        const auto payload = fracwalk::io::parse_json_file((out / "lambda.json").string());
        const auto data = fracwalk::io::observation_from_json(payload);
        check(data.horizon() == 3, "forward writes three-step data");

        const fs::path rec = work / "recover";
        const int rec_code = run(cli + " recover --data " + (out / "lambda.json").string() +
                                 " --out " + rec.string() + quiet);
        check(rec_code == 0, "recover exits 0 on three-step data");
        const auto rep = fracwalk::io::canonical_from_json(
            fracwalk::io::parse_json_file((rec / "canonical.json").string()));
        check(rep.hidden_rank == 2, "recover finds hidden rank 2");

        const fs::path ver = work / "verify_matrix";
        const int ver_code = run(cli + " verify --input " + (out / "transition.json").string() +
                                 " --out " + ver.string() + quiet);
        check(ver_code == 0, "verify accepts a transition-matrix artifact");
        const auto conditions = fracwalk::io::parse_json_file((ver / "verify.json").string());
        check(conditions.at("conditions").at("overall").get<bool>(),
              "forward-built matrix passes the condition report");
    }

    {
        const int code = run(cli + " recover --data " + lambda2 + " --out " +
                             (work / "recover2").string() + quiet);
        check(code == 2, "recover exits 2 on two-step data");
        check(!fs::exists(work / "recover2" / "canonical.json"),
              "no artifact written for insufficient data");
    }

    {
        const fs::path out = work / "verify";
        const int code = run(cli + " verify --input " + star + " --out " + out.string() + quiet);
        check(code == 0, "verify exits 0 even when checks fail");
        const auto payload = fracwalk::io::parse_json_file((out / "verify.json").string());
        check(payload.at("admissibility").at("a2_ok").get<bool>() == false,
              "verify reports the star's (A2) failure");
        check(payload.at("conditions").at("overall").get<bool>() == true,
              "verify reports clean transition conditions");
    }

    {
        const fs::path out_a = work / "roundtrip_a";
        const fs::path out_b = work / "roundtrip_b";
        const int code_a =
            run(cli + " roundtrip --graph " + p5 + " --out " + out_a.string() + quiet);
        const int code_b =
            run(cli + " roundtrip --graph " + p5 + " --out " + out_b.string() + quiet);
        check(code_a == 0 && code_b == 0, "roundtrip exits 0 on the path fixture");
        const auto report = fracwalk::io::parse_json_file((out_a / "roundtrip.json").string());
        check(report.at("ok").get<bool>(), "roundtrip report is ok");
        check(report.at("edges_match").get<bool>(), "roundtrip edges match");
        check(report.at("gamma_ratio_spread").get<double>() <= 1e-8,
              "roundtrip conductivity spread within 1e-8");
        check(fracwalk::io::read_text_file((out_a / "roundtrip.json").string()) ==
                  fracwalk::io::read_text_file((out_b / "roundtrip.json").string()),
              "roundtrip reruns are byte-identical");
    }

    {
        const fs::path out = work / "simulate";
        const int code = run(cli + " simulate --graph " + p5 + " --theta 1 --steps 5000 --seed 3" +
                             " --out " + out.string() + quiet);
        check(code == 0, "simulate exits 0");
        const auto stream = fracwalk::io::stream_from_text(
            fracwalk::io::read_text_file((out / "stream.txt").string()), 3);
        check(stream.length() == 5001, "stream has steps + 1 lines");
        check(fs::exists(out / "empirical.json"), "simulate writes empirical.json");
    }

    {
        // Reconstruct from an interaction-matrix artifact produced here.
        const auto file = fracwalk::io::parse_graph(p5);
        const auto interaction = fracwalk::build_interaction(
            file.graph, *file.gamma, *file.alpha, *file.theta);
        nlohmann::json payload;
        payload["alpha"] = *file.alpha;
        payload["C"] = fracwalk::io::matrix_to_json(interaction.c);
        const fs::path input = work / "interaction.json";
        fracwalk::io::write_text_file(input.string(), fracwalk::io::dump_canonical(payload));
        const fs::path out = work / "reconstruct";
        const int code =
            run(cli + " reconstruct --input " + input.string() + " --out " + out.string() + quiet);
        check(code == 0, "reconstruct exits 0");
        const auto result = fracwalk::io::parse_json_file((out / "reconstruction.json").string());
        check(result.at("edges").size() == 4, "reconstruct recovers four path edges");
    }

    {
        // CSV import path: the kernel 1/d of the path fixture, reconstructed.
        const auto file = fracwalk::io::parse_graph(p5);
        const auto d = fracwalk::all_pairs_distances(file.graph);
        std::string csv;
        char cell[64];
        for (int x = 0; x < 5; ++x) {
            for (int y = 0; y < 5; ++y) {
                std::snprintf(cell, sizeof(cell), "%.17g", x == y ? 0.0 : 1.0 / d(x, y));
                csv += cell;
                csv += (y == 4) ? "\n" : ",";
            }
        }
        const fs::path input = work / "kernel.csv";
        fracwalk::io::write_text_file(input.string(), csv);
        const fs::path out = work / "reconstruct_csv";
        const int code =
            run(cli + " reconstruct --input " + input.string() + " --out " + out.string() + quiet);
        check(code == 0, "reconstruct accepts a CSV kernel");
        const auto result = fracwalk::io::parse_json_file((out / "reconstruction.json").string());
        check(result.at("edges").size() == 4, "CSV kernel reconstructs the path edges");
    }

    {
        // Seed falls back to the environment variable.
        const fs::path out_env = work / "generate_env";
        const fs::path out_flag = work / "generate_flag";
        run("FRACWALK_SEED=7 " + cli + " generate --out " + out_env.string() + quiet);
        run(cli + " generate --seed 7 --out " + out_flag.string() + quiet);
        check(fracwalk::io::read_text_file((out_env / "graph.json").string()) ==
                  fracwalk::io::read_text_file((out_flag / "graph.json").string()),
              "FRACWALK_SEED env var acts as the fallback seed");
    }

    {
        // A star kernel cannot be classified: numerical failure, exit 3.
        const auto file = fracwalk::io::parse_graph(star);
        const auto interaction = fracwalk::build_interaction(
            file.graph, Eigen::VectorXd::Ones(5), *file.alpha, 0.0);
        nlohmann::json payload;
        payload["alpha"] = *file.alpha;
        payload["C"] = fracwalk::io::matrix_to_json(interaction.c);
        const fs::path input = work / "star_interaction.json";
        fracwalk::io::write_text_file(input.string(), fracwalk::io::dump_canonical(payload));
        const int code = run(cli + " reconstruct --input " + input.string() + " --out " +
                             (work / "reconstruct_star").string() + quiet);
        check(code == 3, "reconstruct exits 3 on a star kernel");
    }

    std::cout << (failures == 0 ? "all CLI checks passed\n" : "CLI checks FAILED\n");
    return failures == 0 ? 0 : 1;
}
