#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "codegraph/executor.hpp"
#include "codegraph/graph.hpp"
#include "codegraph/perception.hpp"
#include "codegraph/scene.hpp"

namespace codegraph {

enum class PlannerMode { code, markovian, mock_vlm_rgb, mock_vlm_graph };
enum class VisionMode { masked, raw };

std::string to_string(PlannerMode m);
std::string to_string(VisionMode m);
/// Throw ConfigError.
PlannerMode parse_planner_mode(const std::string& s);
VisionMode parse_vision_mode(const std::string& s);

struct HarnessConfig {
    PlannerMode planner = PlannerMode::code;
    VisionMode vision = VisionMode::masked;
    int chunk_horizon = kDefaultHorizon;
    int step_budget = 200;
    double vlm_latency_s = 3.0;
    double vlm_error_p = 0.0;
    /// "black", "blue" or "alternate" (black on even seeds, blue on odd).
    std::string swap_variant = "alternate";
};

struct RunConfig {
    SceneConfig scene;
    NoiseConfig noise;
    GroundingErrorModel executor;
    AssocThresholds assoc;
    HarnessConfig harness;
    /// Planner source with ${...} placeholders still in place.
    std::string plan_text;

    /// Scene config for one seed, with the swap variant resolved.
    SceneConfig scene_for(std::uint64_t seed) const;
};

/// Directory holding the built-in corpus programs.
std::string default_plan_dir();

/// Parses a run config. Relative plan paths resolve against base_dir.
/// Throws ConfigError on unknown keys, bad types or out-of-range values.
RunConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// Fully expanded form; parse_config(to_json(c)) == c.
nlohmann::json to_json(const RunConfig& c);
/// FNV-1a of the compact dump of to_json, as 16 hex digits.
std::string config_hash(const RunConfig& c);

}  // namespace codegraph
