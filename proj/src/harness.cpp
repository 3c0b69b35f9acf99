#include "codegraph/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "codegraph/executor.hpp"
#include "codegraph/graph_io.hpp"
#include "codegraph/mock_vlm.hpp"
#include "codegraph/planner.hpp"
#include "codegraph/prompting.hpp"

namespace codegraph {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

json relations_to_json(const std::set<RelationTriple>& rels) {
    json out = json::array();
    for (const auto& [a, b, r] : rels) out.push_back({a, b, to_string(r)});
    return out;
}

json chunk_to_json(const ActionChunk& c) {
    json prims = json::array();
    json results = json::array();
    for (const auto& e : c.events) {
        prims.push_back(primitive_to_json(e.primitive));
        results.push_back(e.result == PrimitiveResult::accepted ? "accepted" : "rejected");
    }
    return {{"outcome", to_string(c.outcome)},
            {"verb", to_string(c.targets.verb)},
            {"targets", c.targets.labels},
            {"visible_distractors", c.targets.visible_distractors},
            {"mis_ground_p", round9(c.targets.mis_ground_p)},
            {"primitives", prims},
            {"results", results}};
}

json retention_to_json(const MaskedObservation& obs) {
    json out = json::object();
    for (const auto& v : obs.views) out[v.view_id] = rle_to_json(v.retention.encode());
    return out;
}

json milestones_json(const std::set<std::string>& m) { return json(std::vector<std::string>(m.begin(), m.end())); }

PlannerProgram load_program(const RunConfig& config, const SceneConfig& scene) {
    try {
        return parse_program(instantiate_plan(config.plan_text, {{"first_color", scene.task.first_color}}));
    } catch (const PlanSyntaxError& e) {
        throw ConfigError(std::string("plan: ") + e.what());
    }
}

json footer_without_wall_time(json f) {
    f.erase("wall_time_s");
    return f;
}

}  // namespace

std::string EpisodeLog::to_jsonl() const {
    std::string out = header.dump() + "\n";
    for (const auto& r : records) {
        json line = r.data;
        line["latency_ns"] = r.latency_ns;
        out += line.dump() + "\n";
    }
    out += footer.dump() + "\n";
    return out;
}

EpisodeLog EpisodeLog::from_jsonl(const std::string& text) {
    EpisodeLog log;
    std::istringstream in(text);
    std::string line;
    std::vector<json> lines;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            lines.push_back(json::parse(line));
        } catch (const json::parse_error& e) {
            throw std::invalid_argument("log line " + std::to_string(lines.size() + 1) + ": " + e.what());
        }
    }
    if (lines.size() < 2) throw std::invalid_argument("log needs a header and a footer");
    log.header = lines.front();
    log.footer = lines.back();
    if (log.header.value("type", "") != "header") throw std::invalid_argument("first log line is not a header");
    if (log.footer.value("type", "") != "footer") throw std::invalid_argument("last log line is not a footer");
    for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
        EpisodeRecord r;
        r.data = lines[i];
        r.latency_ns = r.data.value("latency_ns", std::int64_t{0});
        r.data.erase("latency_ns");
        log.records.push_back(std::move(r));
    }
    return log;
}

EpisodeLog run_episode(const RunConfig& config, std::uint64_t seed, const RunOptions& options) {
    const auto t0 = Clock::now();
    const SceneConfig scene = config.scene_for(seed);
    const PlannerProgram program = load_program(config, scene);
    const TaskSpec spec = task_spec_for(scene.task, scene.custom_objects);
    const HarnessConfig& h = config.harness;

    EpisodeLog log;
    log.header = {{"type", "header"},
                  {"version", kLogVersion},
                  {"config_hash", config_hash(config)},
                  {"seed", seed},
                  {"task", to_string(scene.task.kind)},
                  {"first_color", scene.task.first_color},
                  {"planner", to_string(h.planner)},
                  {"vision", to_string(h.vision)},
                  {"config", to_json(config)}};

    Rng perception_rng = Rng::substream(seed, "perception");
    Rng executor_rng = Rng::substream(seed, "executor");
    Rng vlm_rng = Rng::substream(seed, "vlm");

    std::optional<MockVlm> vlm;
    if (h.planner == PlannerMode::mock_vlm_rgb || h.planner == PlannerMode::mock_vlm_graph) {
        try {
            vlm.emplace(scene.task, h.planner == PlannerMode::mock_vlm_rgb ? VlmInput::rgb : VlmInput::graph,
                        h.vlm_error_p);
        } catch (const UnknownTask& e) {
            throw ConfigError(e.what());
        }
    }

    std::string termination = "budget";
    std::string error;
    int total_steps = 0;
    int chunks = 0;
    std::set<std::string> milestones;
    std::optional<EpisodeHistory> history;
    std::optional<WorldState> world;
    const bool has_oracle = scene.task.kind != TaskKind::custom;

    try {
        world = init_world(scene, seed);
        history = EpisodeHistory{*world, {}};
        RawObservation obs = render_views(*world, scene.cameras);
        SemanticGraph graph = init_graph(obs, spec, config.assoc, config.noise, perception_rng);

        for (std::size_t index = 0;; ++index) {
            if (total_steps >= h.step_budget) {
                termination = "budget";
                break;
            }
            if (index > 0) {
                obs = render_views(*world, scene.cameras);
                graph = update_graph(graph, obs, spec, config.assoc, config.noise, perception_rng);
            }
            const std::set<RelationTriple> gt = ground_truth_relations(*world);

            if (h.planner == PlannerMode::markovian) graph.task_memory.clear();
            const std::size_t memory_before = graph.task_memory.size();
            PlannerOutput out;
            std::int64_t latency_ns = 0;
            try {
                if (vlm) {
                    out = vlm->choose(graph, vlm_rng);
                    latency_ns = std::llround(h.vlm_latency_s * 1e9);
                    if (options.realtime) std::this_thread::sleep_for(std::chrono::nanoseconds(latency_ns));
                } else {
                    const auto p0 = Clock::now();
                    out = evaluate_policy(program, graph);
                    latency_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - p0).count();
                }
            } catch (const PlannerError& e) {
                termination = "planner_error";
                error = e.what();
            }

            EpisodeRecord rec;
            rec.latency_ns = latency_ns;
            json& d = rec.data;
            d = {{"type", "record"},
                 {"index", index},
                 {"step", graph.step},
                 {"world_step", world->step_count},
                 {"graph", snapshot_to_json(graph)},
                 {"memory_delta",
                  std::vector<std::string>(graph.task_memory.begin() + static_cast<long>(memory_before),
                                           graph.task_memory.end())},
                 {"planner", planner_output_to_json(out)},
                 {"gt_relations", relations_to_json(gt)},
                 {"chunk", nullptr},
                 {"retention", nullptr}};
            if (!error.empty()) {
                d["planner"] = nullptr;
                d["error"] = error;
            }
            if (!error.empty() || out.done) {
                if (error.empty()) termination = "done";
                d["milestones"] = milestones_json(milestones);
                log.records.push_back(std::move(rec));
                break;
            }

            std::vector<NodeId> relevant = out.relevant_objects;
            if (auto arm = graph.arm()) relevant.push_back(*arm);
            std::sort(relevant.begin(), relevant.end());
            relevant.erase(std::unique(relevant.begin(), relevant.end()), relevant.end());
            const MaskedObservation masked = h.vision == VisionMode::masked
                                                 ? clutter_free_obs(obs, graph, relevant, out.subtask_instruction)
                                                 : unmasked_obs(obs, relevant, out.subtask_instruction);
            d["retention"] = retention_to_json(masked);

            ActionChunk chunk;
            try {
                const GroundedTargets targets = ground_targets(masked, graph, executor_rng, config.executor);
                auto [next, c] = execute_chunk(*world, targets, h.chunk_horizon, executor_rng);
                world = std::move(next);
                chunk = std::move(c);
            } catch (const TargetInvisible&) {
                PrimitiveEvent e;
                e.step = world->step_count;
                e.primitive = Primitive::no_op();
                auto [next, result] = apply_primitive(*world, e.primitive);
                e.result = result;
                world = std::move(next);
                chunk.primitives = {e.primitive};
                chunk.events = {e};
                chunk.targets.verb = parse_cue(out.subtask_instruction).verb;
                chunk.outcome = ChunkOutcome::grounding_failed;
            }
            ++chunks;
            total_steps += static_cast<int>(chunk.events.size());
            history->events.insert(history->events.end(), chunk.events.begin(), chunk.events.end());
            if (has_oracle) milestones = task_oracle(*world, scene.task, *history).milestones;
            d["chunk"] = chunk_to_json(chunk);
            d["milestones"] = milestones_json(milestones);
            log.records.push_back(std::move(rec));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        termination = "pipeline_error";
        error = e.what();
    }

    bool oracle_success = false;
    if (world && history && has_oracle) {
        const OracleVerdict v = task_oracle(*world, scene.task, *history);
        oracle_success = v.success;
        milestones = v.milestones;
    }
    const bool success = has_oracle ? oracle_success && termination == "done" : termination == "done";
    log.footer = {{"type", "footer"},
                  {"success", success},
                  {"oracle_success", oracle_success},
                  {"milestones", milestones_json(milestones)},
                  {"total_steps", total_steps},
                  {"chunks", chunks},
                  {"termination", termination},
                  {"error", error},
                  {"wall_time_s", std::chrono::duration<double>(Clock::now() - t0).count()}};
    return log;
}

DivergenceAt::DivergenceAt(std::size_t record_, int step_, const std::string& what)
    : Error(what), record(record_), step(step_) {}

namespace {

void check_version(const json& header) {
    const int v = header.value("version", -1);
    if (v != kLogVersion)
        throw VersionMismatch("log version " + std::to_string(v) + ", expected " + std::to_string(kLogVersion));
}

EpisodeLog rerun(const json& header) {
    RunConfig cfg;
    try {
        cfg = parse_config(header.at("config"));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("log header: ") + e.what());
    }
    return run_episode(cfg, header.at("seed").get<std::uint64_t>());
}

int step_of(const json& rec) {
    return rec.is_object() && rec.contains("step") && rec["step"].is_number_integer() ? rec["step"].get<int>() : -1;
}

}  // namespace

ReplayVerdict replay(const EpisodeLog& log) {
    check_version(log.header);
    const EpisodeLog fresh = rerun(log.header);
    ReplayVerdict v;
    const std::size_t n = std::min(fresh.records.size(), log.records.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (fresh.records[i].data.dump() != log.records[i].data.dump())
            throw DivergenceAt(i, step_of(fresh.records[i].data),
                               "record " + std::to_string(i) + " (graph step " +
                                   std::to_string(step_of(fresh.records[i].data)) + ") differs");
        ++v.records_checked;
    }
    if (fresh.records.size() != log.records.size())
        throw DivergenceAt(n, n < fresh.records.size() ? step_of(fresh.records[n].data) : -1,
                           "log has " + std::to_string(log.records.size()) + " records, replay produced " +
                               std::to_string(fresh.records.size()));
    if (footer_without_wall_time(fresh.footer).dump() != footer_without_wall_time(log.footer).dump())
        throw DivergenceAt(n, -1, "footer differs");
    v.footer_checked = true;
    return v;
}

ReplayVerdict replay_text(const std::string& jsonl) {
    std::istringstream in(jsonl);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    if (lines.empty()) throw std::invalid_argument("empty log");
    json header;
    try {
        header = json::parse(lines.front());
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("log header: ") + e.what());
    }
    check_version(header);
    EpisodeLog log;
    log.header = header;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        json j;
        try {
            j = json::parse(lines[i]);
        } catch (const json::parse_error&) {
            if (i + 1 == lines.size()) throw DivergenceAt(i - 1, -1, "footer is not valid JSON");
            throw DivergenceAt(i - 1, -1, "record " + std::to_string(i - 1) + " is not valid JSON");
        }
        if (i + 1 == lines.size()) {
            log.footer = j;
        } else {
            EpisodeRecord r;
            r.latency_ns = j.is_object() ? j.value("latency_ns", std::int64_t{0}) : 0;
            if (j.is_object()) j.erase("latency_ns");
            r.data = std::move(j);
            log.records.push_back(std::move(r));
        }
    }
    return replay(log);
}

// ---- suite -----------------------------------------------------------------

namespace {

double percentile_nearest_rank(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
    return v[std::max<std::size_t>(rank, 1) - 1];
}

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

std::string seconds(double v) {
    char buf[32];
    if (v < 1e-3)
        std::snprintf(buf, sizeof buf, "%.1fus", v * 1e6);
    else if (v < 1.0)
        std::snprintf(buf, sizeof buf, "%.2fms", v * 1e3);
    else
        std::snprintf(buf, sizeof buf, "%.3fs", v);
    return buf;
}

void add_episode(SuiteCell& cell, const EpisodeLog& log) {
    ++cell.episodes;
    if (log.success()) ++cell.successes;
    for (const auto& m : log.footer.at("milestones")) ++cell.milestone_counts[m.get<std::string>()];
    for (const auto& r : log.records) cell.latencies_s.push_back(static_cast<double>(r.latency_ns) * 1e-9);
    cell.chunks.push_back(log.footer.at("chunks").get<int>());
}

}  // namespace

double SuiteCell::success_rate() const { return episodes ? 100.0 * successes / episodes : 0.0; }

double SuiteCell::milestone_rate(const std::string& m) const {
    auto it = milestone_counts.find(m);
    return episodes && it != milestone_counts.end() ? 100.0 * it->second / episodes : 0.0;
}

double SuiteCell::latency_median_s() const {
    if (latencies_s.empty()) return 0.0;
    std::vector<double> v = latencies_s;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double SuiteCell::latency_p95_s() const { return percentile_nearest_rank(latencies_s, 0.95); }

std::vector<std::string> task_milestones(TaskKind kind) {
    switch (kind) {
        case TaskKind::swap_cups: return {kMilestoneStageCup};
        case TaskKind::pnp_twice: return {kMilestonePnpOnce};
        case TaskKind::place_and_stack: return {kMilestoneDropCube};
        case TaskKind::custom: return {};
    }
    return {};
}

SuiteCell summarize(const std::vector<EpisodeLog>& logs) {
    SuiteCell cell;
    if (!logs.empty()) {
        const json& h = logs.front().header;
        cell.task = h.at("task").get<std::string>();
        cell.planner = h.at("planner").get<std::string>();
        cell.vision = h.at("vision").get<std::string>();
        cell.distractors = h.at("config").at("distractors").get<int>();
    }
    for (const auto& l : logs) add_episode(cell, l);
    return cell;
}

json SuiteReport::to_json() const {
    json cells_json = json::array();
    for (const auto& c : cells) {
        json ms = json::object();
        for (const auto& m : task_milestones(parse_task_kind(c.task))) ms[m] = c.milestone_rate(m);
        double mean_chunks = 0.0;
        for (int k : c.chunks) mean_chunks += k;
        if (!c.chunks.empty()) mean_chunks /= static_cast<double>(c.chunks.size());
        cells_json.push_back({{"task", c.task},
                              {"planner", c.planner},
                              {"vision", c.vision},
                              {"distractors", c.distractors},
                              {"episodes", c.episodes},
                              {"success_rate", c.success_rate()},
                              {"milestone_rates", ms},
                              {"mean_chunks", mean_chunks},
                              {"latency_median_s", c.latency_median_s()},
                              {"latency_p95_s", c.latency_p95_s()}});
    }
    return {{"seeds", seeds}, {"cells", cells_json}};
}

std::string SuiteReport::to_table() const {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"task", "planner", "vision", "d", "n", "success%", "milestones%", "chunks", "lat.med", "lat.p95"});
    for (const auto& c : cells) {
        std::string ms;
        for (const auto& m : task_milestones(parse_task_kind(c.task)))
            ms += (ms.empty() ? "" : " ") + m + "=" + pct(c.milestone_rate(m));
        double mean_chunks = 0.0;
        for (int k : c.chunks) mean_chunks += k;
        if (!c.chunks.empty()) mean_chunks /= static_cast<double>(c.chunks.size());
        char chunks[32];
        std::snprintf(chunks, sizeof chunks, "%.2f", mean_chunks);
        rows.push_back({c.task, c.planner, c.vision, std::to_string(c.distractors), std::to_string(c.episodes),
                        pct(c.success_rate()), ms.empty() ? "-" : ms, chunks, seconds(c.latency_median_s()),
                        seconds(c.latency_p95_s())});
    }
    std::vector<std::size_t> width(rows.front().size(), 0);
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    std::ostringstream out;
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i + 1 == r.size()) {
                out << r[i];
            } else {
                out << std::left << std::setw(static_cast<int>(width[i])) << r[i] << "  ";
            }
        }
        out << "\n";
    }
    return out.str();
}

SuiteGrid parse_grid(const std::string& spec, const RunConfig& config) {
    (void)config;
    SuiteGrid g;
    std::istringstream in(spec);
    std::string axis;
    while (std::getline(in, axis, ',')) {
        if (axis.empty()) continue;
        const std::size_t eq = axis.find('=');
        const std::string name = axis.substr(0, eq);
        std::vector<std::string> values;
        if (eq != std::string::npos) {
            std::istringstream vs(axis.substr(eq + 1));
            std::string v;
            while (std::getline(vs, v, '|'))
                if (!v.empty()) values.push_back(v);
            if (values.empty()) throw ConfigError("grid axis '" + name + "' has no values");
        }
        if (name == "planner") {
            if (values.empty()) values = {"code", "markovian", "mock_vlm_graph", "mock_vlm_rgb"};
            for (const auto& v : values) g.planners.push_back(parse_planner_mode(v));
        } else if (name == "vision") {
            if (values.empty()) values = {"masked", "raw"};
            for (const auto& v : values) g.visions.push_back(parse_vision_mode(v));
        } else if (name == "distractors") {
            if (values.empty()) values = {"0", "4", "8"};
            for (const auto& v : values) {
                std::size_t used = 0;
                int d = -1;
                try {
                    d = std::stoi(v, &used);
                } catch (const std::exception&) {
                }
                if (used != v.size() || d < 0) throw ConfigError("bad distractor count '" + v + "'");
                g.distractors.push_back(d);
            }
        } else {
            throw ConfigError("unknown grid axis '" + name + "'");
        }
    }
    return g;
}

SuiteReport run_suite(const RunConfig& config, int n_seeds, const SuiteGrid& grid, int threads,
                      std::vector<EpisodeLog>* logs_out) {
    if (n_seeds < 1) throw ConfigError("n_seeds must be >= 1");
    const auto planners = grid.planners.empty() ? std::vector<PlannerMode>{config.harness.planner} : grid.planners;
    const auto visions = grid.visions.empty() ? std::vector<VisionMode>{config.harness.vision} : grid.visions;
    const auto ds = grid.distractors.empty() ? std::vector<int>{config.scene.distractors} : grid.distractors;

    std::vector<RunConfig> cell_configs;
    for (auto p : planners)
        for (auto v : visions)
            for (int d : ds) {
                RunConfig c = config;
                c.harness.planner = p;
                c.harness.vision = v;
                c.scene.distractors = d;
                cell_configs.push_back(c);
            }

    // Each job writes only its own slot, so results do not depend on scheduling.
    const auto seeds = static_cast<std::size_t>(n_seeds);
    const std::size_t jobs = cell_configs.size() * seeds;
    std::vector<EpisodeLog> results(jobs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs; j = next++) {
            try {
                EpisodeLog log = run_episode(cell_configs[j / seeds], j % seeds);
                if (!logs_out) {
                    // Keep only what the summary reads.
                    for (auto& r : log.records) r.data = json::object();
                }
                results[j] = std::move(log);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next = jobs;
            }
        }
    };
    const int n_threads = std::max(1, threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    SuiteReport report;
    report.seeds = n_seeds;
    for (std::size_t c = 0; c < cell_configs.size(); ++c) {
        SuiteCell cell;
        cell.task = to_string(cell_configs[c].scene.task.kind);
        cell.planner = to_string(cell_configs[c].harness.planner);
        cell.vision = to_string(cell_configs[c].harness.vision);
        cell.distractors = cell_configs[c].scene.distractors;
        for (std::size_t s = 0; s < seeds; ++s) add_episode(cell, results[c * seeds + s]);
        report.cells.push_back(std::move(cell));
    }
    if (logs_out) *logs_out = std::move(results);
    return report;
}

}  // namespace codegraph
