#pragma once

// One planner-call snapshot case: a program, a graph snapshot taken just
// before the call, and the canonical text of what the call produced.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "codegraph/config.hpp"
#include "codegraph/graph_io.hpp"
#include "codegraph/planner.hpp"

namespace testing_support {

using nlohmann::json;

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string case_program(const json& c) {
    if (c.contains("plan_text")) return c.at("plan_text").get<std::string>();
    const std::string task = c.at("plan_task").get<std::string>();
    return codegraph::instantiate_plan(slurp(codegraph::default_plan_dir() + "/" + task + ".plan"),
                                       c.value("params", std::map<std::string, std::string>{}));
}

inline std::string error_kind(const std::exception& e) {
    using namespace codegraph;
    if (dynamic_cast<const ArityError*>(&e)) return "ArityError";
    if (dynamic_cast<const UnknownForm*>(&e)) return "UnknownForm";
    if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
    if (dynamic_cast<const UnboundVariable*>(&e)) return "UnboundVariable";
    if (dynamic_cast<const AmbiguousBinding*>(&e)) return "AmbiguousBinding";
    if (dynamic_cast<const StaleNode*>(&e)) return "StaleNode";
    return "other";
}

/// Runs the case and returns its canonical output text.
inline std::string run_case(const json& c) {
    using namespace codegraph;
    json out;
    try {
        const PlannerProgram prog = parse_program(case_program(c));
        SemanticGraph g = snapshot_from_json(c.at("snapshot"));
        g.rebuild_bindings();
        const PlannerOutput p = evaluate_policy(prog, g);
        out = {{"output", planner_output_to_json(p)}, {"task_memory", g.task_memory}};
    } catch (const PlanSyntaxError& e) {
        out = {{"error", {{"kind", error_kind(e)}, {"line", e.pos.line}, {"col", e.pos.col}, {"message", e.what()}}}};
    } catch (const PlannerError& e) {
        out = {{"error", {{"kind", error_kind(e)}, {"message", e.what()}}}};
    }
    return out.dump(2) + "\n";
}

}  // namespace testing_support
