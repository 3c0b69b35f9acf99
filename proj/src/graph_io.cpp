#include "codegraph/graph_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace codegraph {

double round9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

json rle_to_json(const Rle& rle) { return {{"w", rle.width}, {"h", rle.height}, {"counts", rle.counts}}; }

Rle rle_from_json(const json& j) {
    try {
        Rle r;
        r.width = j.at("w").get<int>();
        r.height = j.at("h").get<int>();
        r.counts = j.at("counts").get<std::vector<std::uint32_t>>();
        return r;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad RLE: ") + e.what());
    }
}

json snapshot_to_json(const SemanticGraph& g) {
    json nodes = json::array();
    for (const auto& n : g.nodes) {
        json groundings = json::object();
        for (const auto& [view, gr] : n.groundings) {
            groundings[view] = {{"rle", rle_to_json(gr.mask.encode())},
                                {"centroid", {round9(gr.centroid.x), round9(gr.centroid.y)}},
                                {"area", gr.area_px},
                                {"drift", {gr.drift_dx, gr.drift_dy}},
                                {"fresh", gr.fresh}};
        }
        json feature = json::array();
        for (double v : n.feature) feature.push_back(round9(v));
        nodes.push_back({{"id", n.node_id},
                         {"name", n.name},
                         {"class", n.class_name},
                         {"attributes", n.attributes},
                         {"label", n.label},
                         {"is_arm", n.is_arm},
                         {"last_seen_step", n.last_seen_step},
                         {"feature", feature},
                         {"groundings", groundings}});
    }
    json edges = json::array();
    for (const auto& e : g.edges) edges.push_back({e.src, e.dst, to_string(e.relation), e.since_step});
    return {{"step", g.step},
            {"hand_busy", g.hand_busy},
            {"next_node_id", g.next_node_id},
            {"nodes", nodes},
            {"edges", edges},
            {"task_memory", g.task_memory}};
}

SemanticGraph snapshot_from_json(const json& j) {
    try {
        SemanticGraph g;
        g.step = j.at("step").get<int>();
        g.hand_busy = j.at("hand_busy").get<bool>();
        g.next_node_id = j.at("next_node_id").get<NodeId>();
        for (const auto& jn : j.at("nodes")) {
            GraphNode n;
            n.node_id = jn.at("id").get<NodeId>();
            n.name = jn.at("name").get<std::string>();
            n.class_name = jn.at("class").get<std::string>();
            n.attributes = jn.at("attributes").get<Attributes>();
            n.label = jn.at("label").get<ObjectId>();
            n.is_arm = jn.at("is_arm").get<bool>();
            n.last_seen_step = jn.at("last_seen_step").get<int>();
            const auto f = jn.at("feature").get<std::vector<double>>();
            if (f.size() != kFeatureDim) throw std::invalid_argument("feature must have 16 entries");
            std::copy(f.begin(), f.end(), n.feature.begin());
            for (const auto& [view, jg] : jn.at("groundings").items()) {
                Grounding gr;
                gr.mask = Bitmap::decode(rle_from_json(jg.at("rle")));
                gr.centroid = {jg.at("centroid").at(0).get<double>(), jg.at("centroid").at(1).get<double>()};
                gr.area_px = jg.at("area").get<std::size_t>();
                gr.drift_dx = jg.at("drift").at(0).get<int>();
                gr.drift_dy = jg.at("drift").at(1).get<int>();
                gr.fresh = jg.at("fresh").get<bool>();
                n.groundings[view] = std::move(gr);
            }
            g.nodes.push_back(std::move(n));
        }
        std::sort(g.nodes.begin(), g.nodes.end(),
                  [](const GraphNode& a, const GraphNode& b) { return a.node_id < b.node_id; });
        for (const auto& je : j.at("edges")) {
            g.edges.push_back({je.at(0).get<NodeId>(), je.at(1).get<NodeId>(),
                               parse_relation(je.at(2).get<std::string>()), je.at(3).get<int>()});
        }
        g.sort_edges();
        g.task_memory = j.at("task_memory").get<std::vector<std::string>>();
        g.rebuild_bindings();
        return g;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad graph snapshot: ") + e.what());
    }
}

json primitive_to_json(const Primitive& p) {
    json j = {{"kind", to_string(p.kind)}};
    if (p.kind == Primitive::Kind::place_at) {
        j["at"] = {round9(p.at.x), round9(p.at.y)};
    } else if (p.kind != Primitive::Kind::no_op) {
        j["target"] = p.target;
    }
    return j;
}

json planner_output_to_json(const PlannerOutput& out) {
    json j = {{"instruction", out.subtask_instruction}, {"relevant", out.relevant_objects}, {"done", out.done}};
    j["step"] = out.emitted_step ? json(*out.emitted_step) : json(nullptr);
    return j;
}

}  // namespace codegraph
