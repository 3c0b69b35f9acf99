#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "codegraph/config.hpp"
#include "codegraph/errors.hpp"

namespace codegraph {

/// Bumped whenever the log layout or any seeded computation changes.
inline constexpr int kLogVersion = 1;

/// One planner call and the chunk it led to.
struct EpisodeRecord {
    nlohmann::json data;  // canonical record; see record_key() for what replay compares
    std::int64_t latency_ns = 0;
};

struct EpisodeLog {
    nlohmann::json header;
    std::vector<EpisodeRecord> records;
    nlohmann::json footer;

    bool success() const { return footer.value("success", false); }
    std::uint64_t seed() const { return header.at("seed").get<std::uint64_t>(); }

    /// JSON lines: header, one line per record, footer.
    std::string to_jsonl() const;
    /// Throws std::invalid_argument on malformed input.
    static EpisodeLog from_jsonl(const std::string& text);
};

/// Wall-clock options that never enter a log.
struct RunOptions {
    /// Sleep for the simulated VLM latency instead of only accounting for it.
    bool realtime = false;
};

/// Runs one closed-loop episode. Runtime pipeline failures end the episode
/// and are recorded in the footer; only config problems throw (ConfigError).
EpisodeLog run_episode(const RunConfig& config, std::uint64_t seed, const RunOptions& options = {});

class DivergenceAt : public Error {
public:
    DivergenceAt(std::size_t record, int step, const std::string& what);
    std::size_t record;  // index of the first differing record; records.size() for the footer
    int step;            // graph step of that record, -1 when unknown
};

struct ReplayVerdict {
    std::size_t records_checked = 0;
    bool footer_checked = false;
};

/// Re-runs the logged episode from its header and compares every record
/// except planner latency and wall time. Throws VersionMismatch, DivergenceAt.
ReplayVerdict replay(const EpisodeLog& log);
/// Same, reading the log from text so that damaged lines surface as
/// DivergenceAt rather than parse errors.
ReplayVerdict replay_text(const std::string& jsonl);

struct SuiteCell {
    std::string task;
    std::string planner;
    std::string vision;
    int distractors = 0;
    int episodes = 0;
    int successes = 0;
    std::map<std::string, int> milestone_counts;
    std::vector<double> latencies_s;  // every planner call in the cell
    std::vector<int> chunks;          // per episode

    double success_rate() const;
    double milestone_rate(const std::string& m) const;
    double latency_median_s() const;
    double latency_p95_s() const;
};

struct SuiteReport {
    std::vector<SuiteCell> cells;
    int seeds = 0;

    nlohmann::json to_json() const;
    std::string to_table() const;
};

/// Grid axes; an empty axis keeps the config's value.
struct SuiteGrid {
    std::vector<PlannerMode> planners;
    std::vector<VisionMode> visions;
    std::vector<int> distractors;
};

/// Throws ConfigError on an unknown grid axis name or value.
SuiteGrid parse_grid(const std::string& spec, const RunConfig& config);

/// Milestones tracked for a task, in report column order.
std::vector<std::string> task_milestones(TaskKind kind);

/// Cell summary of a set of logs.
SuiteCell summarize(const std::vector<EpisodeLog>& logs);

/// Seeds 0..n_seeds-1 for every grid cell. Threads > 1 run episodes in
/// parallel; the report does not depend on the thread count.
SuiteReport run_suite(const RunConfig& config, int n_seeds, const SuiteGrid& grid = {}, int threads = 1,
                      std::vector<EpisodeLog>* logs_out = nullptr);

}  // namespace codegraph
