#include "codegraph/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "codegraph/errors.hpp"

#ifndef CODEGRAPH_PLAN_DIR
#define CODEGRAPH_PLAN_DIR "plans"
#endif

namespace codegraph {

using nlohmann::json;

std::string to_string(PlannerMode m) {
    switch (m) {
        case PlannerMode::code: return "code";
        case PlannerMode::markovian: return "markovian";
        case PlannerMode::mock_vlm_rgb: return "mock_vlm_rgb";
        case PlannerMode::mock_vlm_graph: return "mock_vlm_graph";
    }
    return "code";
}

std::string to_string(VisionMode m) { return m == VisionMode::masked ? "masked" : "raw"; }

PlannerMode parse_planner_mode(const std::string& s) {
    for (auto m : {PlannerMode::code, PlannerMode::markovian, PlannerMode::mock_vlm_rgb, PlannerMode::mock_vlm_graph})
        if (to_string(m) == s) return m;
    throw ConfigError("unknown planner mode '" + s + "'");
}

VisionMode parse_vision_mode(const std::string& s) {
    if (s == "masked") return VisionMode::masked;
    if (s == "raw") return VisionMode::raw;
    throw ConfigError("unknown vision mode '" + s + "'");
}

std::string default_plan_dir() {
    if (const char* env = std::getenv("CODEGRAPH_PLAN_DIR")) return env;
    return CODEGRAPH_PLAN_DIR;
}

SceneConfig RunConfig::scene_for(std::uint64_t seed) const {
    SceneConfig s = scene;
    if (s.task.kind == TaskKind::swap_cups) {
        const std::string& v = harness.swap_variant;
        s.task.first_color = v == "alternate" ? (seed % 2 == 0 ? "black" : "blue") : v;
    }
    return s;
}

namespace {

void only_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad type for '" + std::string(key) + "' in " + where);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <typename Fn>
void checked(Fn&& fn) {
    try {
        fn();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

RunConfig parse_config(const json& j, const std::string& base_dir) {
    only_keys(j, "config",
              {"task", "variant", "distractors", "table_bounds", "cameras", "near_threshold_m", "overlap_tolerance",
               "custom_objects", "perception_noise", "executor_error", "assoc", "harness", "plan", "plan_text"});
    RunConfig c;
    if (!j.contains("task")) throw ConfigError("missing 'task'");
    std::string task;
    read(j, "task", task, "config");
    try {
        c.scene.task.kind = parse_task_kind(task);
    } catch (const UnknownTask& e) {
        throw ConfigError(e.what());
    }
    read(j, "variant", c.harness.swap_variant, "config");
    if (c.harness.swap_variant != "black" && c.harness.swap_variant != "blue" &&
        c.harness.swap_variant != "alternate")
        throw ConfigError("variant must be black, blue or alternate");
    read(j, "distractors", c.scene.distractors, "config");
    if (c.scene.distractors < 0) throw ConfigError("distractors must be >= 0");
    read(j, "near_threshold_m", c.scene.near_threshold_m, "config");
    read(j, "overlap_tolerance", c.scene.overlap_tolerance, "config");
    if (!(c.scene.near_threshold_m > 0.0)) throw ConfigError("near_threshold_m must be > 0");
    if (!(c.scene.overlap_tolerance >= 0.0)) throw ConfigError("overlap_tolerance must be >= 0");

    if (j.contains("table_bounds")) {
        const json& t = j.at("table_bounds");
        only_keys(t, "table_bounds", {"x0", "y0", "x1", "y1"});
        read(t, "x0", c.scene.table.x0, "table_bounds");
        read(t, "y0", c.scene.table.y0, "table_bounds");
        read(t, "x1", c.scene.table.x1, "table_bounds");
        read(t, "y1", c.scene.table.y1, "table_bounds");
        if (!(c.scene.table.x1 > c.scene.table.x0 && c.scene.table.y1 > c.scene.table.y0))
            throw ConfigError("table_bounds must have positive extent");
    }
    if (j.contains("cameras")) {
        if (!j.at("cameras").is_array() || j.at("cameras").empty()) throw ConfigError("cameras must be a non-empty array");
        for (const auto& jc : j.at("cameras")) {
            only_keys(jc, "camera", {"view_id", "width", "height", "affine", "elevation_px_per_m"});
            CameraSpec cam;
            read(jc, "view_id", cam.view_id, "camera");
            read(jc, "width", cam.width, "camera");
            read(jc, "height", cam.height, "camera");
            read(jc, "affine", cam.affine, "camera");
            read(jc, "elevation_px_per_m", cam.elevation_px_per_m, "camera");
            checked([&] { cam.validate(); });
            c.scene.cameras.push_back(cam);
        }
    } else {
        c.scene.cameras = default_cameras(c.scene.table);
    }
    if (j.contains("custom_objects")) {
        for (const auto& jo : j.at("custom_objects")) {
            only_keys(jo, "custom object", {"class", "x", "y", "attributes"});
            CustomObject o;
            read(jo, "class", o.class_name, "custom object");
            read(jo, "x", o.position.x, "custom object");
            read(jo, "y", o.position.y, "custom object");
            read(jo, "attributes", o.attributes, "custom object");
            try {
                class_info(o.class_name);
            } catch (const UnknownObject& e) {
                throw ConfigError(e.what());
            }
            c.scene.custom_objects.push_back(o);
        }
    }

    if (j.contains("perception_noise")) {
        const json& n = j.at("perception_noise");
        only_keys(n, "perception_noise",
                  {"feature_sigma", "mask_dropout_occlusion", "class_confusion_p", "tracker_drift_px_per_step",
                   "tracker_loss_p"});
        read(n, "feature_sigma", c.noise.feature_sigma, "perception_noise");
        read(n, "mask_dropout_occlusion", c.noise.mask_dropout_occlusion, "perception_noise");
        read(n, "class_confusion_p", c.noise.class_confusion_p, "perception_noise");
        read(n, "tracker_drift_px_per_step", c.noise.tracker_drift_px_per_step, "perception_noise");
        read(n, "tracker_loss_p", c.noise.tracker_loss_p, "perception_noise");
    }
    checked([&] { c.noise.validate(); });

    if (j.contains("executor_error")) {
        const json& e = j.at("executor_error");
        only_keys(e, "executor_error", {"base_p", "per_distractor_p", "p_max", "mode"});
        read(e, "base_p", c.executor.base_p, "executor_error");
        read(e, "per_distractor_p", c.executor.per_distractor_p, "executor_error");
        read(e, "p_max", c.executor.p_max, "executor_error");
        std::string mode = "count_visible_pixels_objects";
        read(e, "mode", mode, "executor_error");
        if (mode != "count_visible_pixels_objects") throw ConfigError("unknown executor_error mode '" + mode + "'");
    }
    checked([&] { c.executor.validate(); });

    if (j.contains("assoc")) {
        const json& a = j.at("assoc");
        only_keys(a, "assoc", {"tau_vis", "tau_geo", "margin_geo"});
        read(a, "tau_vis", c.assoc.tau_vis, "assoc");
        read(a, "tau_geo", c.assoc.tau_geo, "assoc");
        read(a, "margin_geo", c.assoc.margin_geo, "assoc");
    }
    checked([&] { c.assoc.validate(); });

    if (j.contains("harness")) {
        const json& h = j.at("harness");
        only_keys(h, "harness",
                  {"planner", "vision", "chunk_horizon", "step_budget", "vlm_latency_s", "vlm_error_p"});
        std::string s;
        if (h.contains("planner")) {
            read(h, "planner", s, "harness");
            c.harness.planner = parse_planner_mode(s);
        }
        if (h.contains("vision")) {
            read(h, "vision", s, "harness");
            c.harness.vision = parse_vision_mode(s);
        }
        read(h, "chunk_horizon", c.harness.chunk_horizon, "harness");
        read(h, "step_budget", c.harness.step_budget, "harness");
        read(h, "vlm_latency_s", c.harness.vlm_latency_s, "harness");
        read(h, "vlm_error_p", c.harness.vlm_error_p, "harness");
        if (c.harness.chunk_horizon < 1) throw ConfigError("chunk_horizon must be >= 1");
        if (c.harness.step_budget < 1) throw ConfigError("step_budget must be >= 1");
        if (!(c.harness.vlm_latency_s >= 0.0)) throw ConfigError("vlm_latency_s must be >= 0");
        if (!(c.harness.vlm_error_p >= 0.0 && c.harness.vlm_error_p <= 1.0))
            throw ConfigError("vlm_error_p must be in [0,1]");
    }

    if (j.contains("plan_text")) {
        read(j, "plan_text", c.plan_text, "config");
    } else if (j.contains("plan")) {
        std::string p;
        read(j, "plan", p, "config");
        const std::filesystem::path path(p);
        c.plan_text = read_file(path.is_absolute() ? p : (std::filesystem::path(base_dir) / path).string());
    } else if (c.scene.task.kind != TaskKind::custom) {
        c.plan_text = read_file((std::filesystem::path(default_plan_dir()) / (task + ".plan")).string());
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(j, std::filesystem::path(path).parent_path().string());
}

json to_json(const RunConfig& c) {
    json cams = json::array();
    for (const auto& cam : c.scene.cameras)
        cams.push_back({{"view_id", cam.view_id},
                        {"width", cam.width},
                        {"height", cam.height},
                        {"affine", cam.affine},
                        {"elevation_px_per_m", cam.elevation_px_per_m}});
    json custom = json::array();
    for (const auto& o : c.scene.custom_objects)
        custom.push_back({{"class", o.class_name}, {"x", o.position.x}, {"y", o.position.y}, {"attributes", o.attributes}});
    const auto& t = c.scene.table;
    return {
        {"task", to_string(c.scene.task.kind)},
        {"variant", c.harness.swap_variant},
        {"distractors", c.scene.distractors},
        {"table_bounds", {{"x0", t.x0}, {"y0", t.y0}, {"x1", t.x1}, {"y1", t.y1}}},
        {"cameras", cams},
        {"near_threshold_m", c.scene.near_threshold_m},
        {"overlap_tolerance", c.scene.overlap_tolerance},
        {"custom_objects", custom},
        {"perception_noise",
         {{"feature_sigma", c.noise.feature_sigma},
          {"mask_dropout_occlusion", c.noise.mask_dropout_occlusion},
          {"class_confusion_p", c.noise.class_confusion_p},
          {"tracker_drift_px_per_step", c.noise.tracker_drift_px_per_step},
          {"tracker_loss_p", c.noise.tracker_loss_p}}},
        {"executor_error",
         {{"base_p", c.executor.base_p},
          {"per_distractor_p", c.executor.per_distractor_p},
          {"p_max", c.executor.p_max},
          {"mode", "count_visible_pixels_objects"}}},
        {"assoc", {{"tau_vis", c.assoc.tau_vis}, {"tau_geo", c.assoc.tau_geo}, {"margin_geo", c.assoc.margin_geo}}},
        {"harness",
         {{"planner", to_string(c.harness.planner)},
          {"vision", to_string(c.harness.vision)},
          {"chunk_horizon", c.harness.chunk_horizon},
          {"step_budget", c.harness.step_budget},
          {"vlm_latency_s", c.harness.vlm_latency_s},
          {"vlm_error_p", c.harness.vlm_error_p}}},
        {"plan_text", c.plan_text},
    };
}

std::string config_hash(const RunConfig& c) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(c).dump())));
    return buf;
}

}  // namespace codegraph
