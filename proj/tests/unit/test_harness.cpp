#include <doctest.h>

#include <filesystem>

#include "codegraph/harness.hpp"

using namespace codegraph;
using nlohmann::json;

namespace {

const std::string kRoot = std::filesystem::path(CODEGRAPH_FIXTURES).parent_path().parent_path().string();

RunConfig config(const std::string& name, const std::string& task, PlannerMode planner = PlannerMode::code) {
    RunConfig c = load_config(kRoot + "/configs/" + name + ".json");
    c.scene.task.kind = parse_task_kind(task);
    c.plan_text = parse_config(json{{"task", task}}).plan_text;
    c.harness.planner = planner;
    return c;
}

// Replaces the first occurrence of `from` on the given line of a JSONL text.
std::string edit_line(const std::string& text, std::size_t line_no, const std::string& from, const std::string& to) {
    std::size_t start = 0;
    for (std::size_t i = 0; i < line_no; ++i) start = text.find('\n', start) + 1;
    const std::size_t end = text.find('\n', start);
    const std::size_t at = text.find(from, start);
    REQUIRE(at != std::string::npos);
    REQUIRE(at < end);
    std::string out = text;
    out.replace(at, from.size(), to);
    return out;
}

}  // namespace

TEST_CASE("a perfect swap episode succeeds in six subtasks") {
    const EpisodeLog log = run_episode(config("perfect", "swap_cups"), 0);
    CHECK(log.success());
    CHECK(log.footer.at("termination") == "done");
    CHECK(log.footer.at("chunks") == 6);
    CHECK(log.records.size() == 7);
    CHECK(log.header.at("version") == kLogVersion);
    CHECK(log.header.at("first_color") == "black");
    CHECK(log.header.at("config_hash") == config_hash(config("perfect", "swap_cups")));
    for (std::size_t i = 0; i < log.records.size(); ++i) CHECK(log.records[i].data.at("index") == i);
    CHECK(log.records.back().data.at("planner").at("done") == true);
}

TEST_CASE("logs round trip through JSON lines") {
    const EpisodeLog log = run_episode(config("default", "pnp_twice"), 3);
    const std::string text = log.to_jsonl();
    const EpisodeLog back = EpisodeLog::from_jsonl(text);
    CHECK(back.to_jsonl() == text);
    CHECK(back.records.size() == log.records.size());
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(log.records.size() + 2));
    CHECK_THROWS_AS(EpisodeLog::from_jsonl("{\"type\":\"header\"}\n{oops\n"), std::invalid_argument);
    CHECK_THROWS_AS(EpisodeLog::from_jsonl(""), std::invalid_argument);
}

TEST_CASE("replay reproduces an episode") {
    const EpisodeLog log = run_episode(config("default", "swap_cups"), 5);
    const ReplayVerdict v = replay(log);
    CHECK(v.records_checked == log.records.size());
    CHECK(v.footer_checked);
    CHECK(replay_text(log.to_jsonl()).records_checked == log.records.size());
}

TEST_CASE("replay finds the first altered record") {
    const EpisodeLog log = run_episode(config("default", "swap_cups"), 5);
    REQUIRE(log.records.size() >= 3);
    const std::string text = log.to_jsonl();
    // Line 0 is the header, so record 2 is on line 3.
    const std::string edited = edit_line(text, 3, "\"world_step\":", "\"world_step\":1");
    try {
        replay_text(edited);
        FAIL("no divergence");
    } catch (const DivergenceAt& d) {
        CHECK(d.record == 2);
        CHECK(d.step == log.records[2].data.at("step").get<int>());
    }
    const std::string broken = edit_line(text, 2, "{", "[");
    try {
        replay_text(broken);
        FAIL("no divergence");
    } catch (const DivergenceAt& d) {
        CHECK(d.record == 1);
    }
}

TEST_CASE("replay ignores latency but not outcomes") {
    EpisodeLog log = run_episode(config("default", "pnp_twice"), 1);
    for (auto& r : log.records) r.latency_ns += 12345;
    log.footer["wall_time_s"] = 99.0;
    CHECK_NOTHROW(replay(log));
    log.footer["success"] = !log.footer["success"].get<bool>();
    CHECK_THROWS_AS(replay(log), DivergenceAt);
}

TEST_CASE("replay refuses other log versions") {
    EpisodeLog log = run_episode(config("perfect", "pnp_twice"), 0);
    log.header["version"] = kLogVersion + 1;
    CHECK_THROWS_AS(replay(log), VersionMismatch);
    CHECK_THROWS_AS(replay_text(log.to_jsonl()), VersionMismatch);
}

TEST_CASE("markovian planning cannot finish pnp_twice") {
    const EpisodeLog log = run_episode(config("perfect", "pnp_twice", PlannerMode::markovian), 0);
    CHECK_FALSE(log.success());
    const EpisodeLog code = run_episode(config("perfect", "pnp_twice"), 0);
    CHECK(code.success());
}

TEST_CASE("mock planners account for their latency") {
    const EpisodeLog log = run_episode(config("perfect", "swap_cups", PlannerMode::mock_vlm_graph), 2);
    for (const auto& r : log.records) CHECK(r.latency_ns == 3'000'000'000);
    CHECK(log.header.at("first_color") == "black");
}

TEST_CASE("suite results do not depend on the thread count") {
    RunConfig c = config("default", "swap_cups");
    const SuiteGrid grid = parse_grid("planner=code|mock_vlm_rgb", c);
    const SuiteReport one = run_suite(c, 6, grid, 1);
    const SuiteReport three = run_suite(c, 6, grid, 3);
    REQUIRE(one.cells.size() == 2);
    REQUIRE(three.cells.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(one.cells[i].planner == three.cells[i].planner);
        CHECK(one.cells[i].successes == three.cells[i].successes);
        CHECK(one.cells[i].chunks == three.cells[i].chunks);
        CHECK(one.cells[i].milestone_counts == three.cells[i].milestone_counts);
    }
    CHECK(one.cells[1].latency_median_s() == 3.0);
    const std::string table = one.to_table();
    CHECK(table.find("mock_vlm_rgb") != std::string::npos);
    CHECK(one.to_json().at("cells").size() == 2);
}

TEST_CASE("grid specs") {
    const RunConfig c = config("default", "swap_cups");
    const SuiteGrid all = parse_grid("planner,vision,distractors", c);
    CHECK(all.planners.size() == 4);
    CHECK(all.visions.size() == 2);
    CHECK(all.distractors == std::vector<int>{0, 4, 8});
    const SuiteGrid some = parse_grid("distractors=2|6", c);
    CHECK(some.distractors == std::vector<int>{2, 6});
    CHECK(some.planners.empty());
    CHECK_THROWS_AS(parse_grid("colour", c), ConfigError);
    CHECK_THROWS_AS(parse_grid("planner=gpt", c), ConfigError);
    CHECK_THROWS_AS(parse_grid("distractors=many", c), ConfigError);
}

TEST_CASE("cell statistics") {
    SuiteCell cell;
    cell.episodes = 4;
    cell.successes = 3;
    cell.milestone_counts = {{"Stage Cup", 2}};
    cell.latencies_s = {5, 1, 4, 2, 3};
    CHECK(cell.success_rate() == 75.0);
    CHECK(cell.milestone_rate("Stage Cup") == 50.0);
    CHECK(cell.milestone_rate("PnP Once") == 0.0);
    CHECK(cell.latency_median_s() == 3.0);
    cell.latencies_s.push_back(6);
    CHECK(cell.latency_median_s() == 3.5);
    // nearest rank: ceil(0.95 * 6) = 6th smallest
    CHECK(cell.latency_p95_s() == 6.0);
    cell.latencies_s.resize(20);
    for (int i = 0; i < 20; ++i) cell.latencies_s[i] = i + 1;
    CHECK(cell.latency_p95_s() == 19.0);
}

TEST_CASE("config problems propagate out of an episode") {
    RunConfig c = config("perfect", "swap_cups");
    c.plan_text = "(policy broken";
    CHECK_THROWS_AS(run_episode(c, 0), ConfigError);
}
