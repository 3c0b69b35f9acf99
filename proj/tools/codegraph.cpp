#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "codegraph/assoc_bench.hpp"
#include "codegraph/config.hpp"
#include "codegraph/harness.hpp"
#include "codegraph/planner.hpp"

using namespace codegraph;

namespace {

constexpr int kExitEpisodeFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitVersion = 4;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semantic-graph task planning on a simulated tabletop"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::string planner, vision, log_path;
    int distractors = -1;
    bool realtime = false;
    auto* run = app.add_subcommand("run", "Run one episode");
    run->add_option("--config", config_path, "Run config (JSON)")->required();
    run->add_option("--seed", seed, "Episode seed");
    run->add_option("--planner", planner, "code, markovian, mock_vlm_rgb or mock_vlm_graph");
    run->add_option("--vision", vision, "masked or raw");
    run->add_option("--distractors", distractors, "Override the distractor count");
    run->add_option("--log", log_path, "Write the episode log (JSON lines) here");
    run->add_flag("--realtime", realtime, "Sleep for simulated VLM latency");

    int seeds = 0, threads = 1;
    std::string grid, report_path, logs_dir;
    auto* suite = app.add_subcommand("suite", "Run seeds 0..N-1 over a grid of settings");
    suite->add_option("--config", config_path, "Run config (JSON)")->required();
    suite->add_option("--seeds", seeds, "Seeds per cell")->required();
    suite->add_option("--grid", grid,
                      "Axes to sweep, e.g. planner,vision or planner=code|markovian,distractors=0|8");
    suite->add_option("--threads", threads, "Worker threads");
    suite->add_option("--report", report_path, "Write the JSON report here");
    suite->add_option("--logs", logs_dir, "Write every episode log into this directory");

    std::string replay_path;
    auto* rep = app.add_subcommand("replay", "Re-run a logged episode and compare it record by record");
    rep->add_option("log", replay_path, "Episode log")->required();

    std::string plan_path;
    std::vector<std::string> params;
    auto* val = app.add_subcommand("validate-plan", "Parse and check a planner program");
    val->add_option("file", plan_path, "Plan file")->required();
    val->add_option("--param", params, "Placeholder value, NAME=VALUE (default first_color=black)");

    int scenes = 1000, max_objects = 8;
    double sigma = 0.0;
    std::uint64_t bench_seed = 0;
    auto* bench = app.add_subcommand("assoc-bench", "Cross-view association against a brute-force matcher");
    bench->add_option("--scenes", scenes, "Random scenes");
    bench->add_option("--sigma", sigma, "Feature noise (RMS norm)");
    bench->add_option("--seed", bench_seed, "First scene seed");
    bench->add_option("--max-objects", max_objects, "Objects per scene, at most");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            RunConfig cfg = load_config(config_path);
            if (!planner.empty()) cfg.harness.planner = parse_planner_mode(planner);
            if (!vision.empty()) cfg.harness.vision = parse_vision_mode(vision);
            if (distractors >= 0) cfg.scene.distractors = distractors;
            const EpisodeLog log = run_episode(cfg, seed, {realtime});
            if (!log_path.empty()) write_file(log_path, log.to_jsonl());
            const auto& f = log.footer;
            std::cout << "seed " << seed << ": " << (log.success() ? "success" : "failure") << ", "
                      << f.at("chunks").get<int>() << " chunks, " << f.at("total_steps").get<int>()
                      << " steps, ended by " << f.at("termination").get<std::string>();
            if (!f.at("error").get<std::string>().empty()) std::cout << " (" << f.at("error").get<std::string>() << ")";
            std::cout << "\n";
            for (const auto& r : log.records) {
                const auto& p = r.data.at("planner");
                if (p.is_null()) continue;
                std::cout << "  [" << r.data.at("step").get<int>() << "] "
                          << (p.at("done").get<bool>() ? "done" : p.at("instruction").get<std::string>());
                if (!r.data.at("chunk").is_null()) std::cout << "  -> " << r.data.at("chunk").at("outcome").get<std::string>();
                std::cout << "\n";
            }
            return log.success() ? 0 : kExitEpisodeFailed;
        }
        if (*suite) {
            const RunConfig cfg = load_config(config_path);
            const SuiteGrid g = parse_grid(grid, cfg);
            std::vector<EpisodeLog> logs;
            const SuiteReport report = run_suite(cfg, seeds, g, threads, logs_dir.empty() ? nullptr : &logs);
            std::cout << report.to_table();
            if (!report_path.empty()) write_file(report_path, report.to_json().dump(2) + "\n");
            if (!logs_dir.empty()) {
                std::filesystem::create_directories(logs_dir);
                for (const auto& l : logs) {
                    const auto& h = l.header;
                    const std::string name = h.at("task").get<std::string>() + "_" + h.at("planner").get<std::string>() +
                                             "_" + h.at("vision").get<std::string>() + "_d" +
                                             std::to_string(h.at("config").at("distractors").get<int>()) + "_s" +
                                             std::to_string(l.seed()) + ".jsonl";
                    write_file((std::filesystem::path(logs_dir) / name).string(), l.to_jsonl());
                }
            }
            return 0;
        }
        if (*rep) {
            try {
                const ReplayVerdict v = replay_text(slurp(replay_path));
                std::cout << "identical: " << v.records_checked << " records and footer\n";
                return 0;
            } catch (const DivergenceAt& d) {
                std::cout << "divergence at record " << d.record;
                if (d.step >= 0) std::cout << " (graph step " << d.step << ")";
                std::cout << ": " << d.what() << "\n";
                return kExitDivergence;
            } catch (const VersionMismatch& e) {
                std::cerr << "version mismatch: " << e.what() << "\n";
                return kExitVersion;
            } catch (const std::invalid_argument& e) {
                std::cerr << "malformed log: " << e.what() << "\n";
                return kExitDivergence;
            }
        }
        if (*val) {
            std::map<std::string, std::string> values{{"first_color", "black"}};
            for (const auto& p : params) {
                const auto eq = p.find('=');
                if (eq == std::string::npos) throw ConfigError("--param expects NAME=VALUE");
                values[p.substr(0, eq)] = p.substr(eq + 1);
            }
            try {
                const PlannerProgram prog = parse_program(instantiate_plan(slurp(plan_path), values));
                std::cout << plan_path << ": policy " << prog.name << ", " << prog.bindings.size() << " bindings, "
                          << prog.all_steps().size() << " steps\n";
                return 0;
            } catch (const PlanSyntaxError& e) {
                std::cerr << plan_path << ":" << e.pos.line << ":" << e.pos.col << ": " << e.what() << "\n";
                return kExitConfig;
            }
        }
        if (*bench) {
            const AssocBenchResult r = assoc_bench(scenes, sigma, bench_seed, {}, max_objects);
            std::printf("scenes %d  sigma %.3f  oracle agreement %.1f%%  identity agreement %.1f%%\n", r.scenes, sigma,
                        100.0 * r.oracle_agreement(), 100.0 * r.identity_agreement());
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
