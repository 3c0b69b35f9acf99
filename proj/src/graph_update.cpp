#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "codegraph/errors.hpp"
#include "codegraph/graph.hpp"

namespace codegraph {

namespace {

Grounding grounding_of(const Bitmap& mask, int drift_dx = 0, int drift_dy = 0) {
    Grounding g;
    g.mask = mask;
    g.centroid = mask.centroid();
    g.area_px = mask.count();
    g.drift_dx = drift_dx;
    g.drift_dy = drift_dy;
    g.fresh = true;
    return g;
}

std::string base_name(const Detection& d) {
    if (d.is_arm) return "arm";
    auto it = d.attributes.find("color");
    if (it != d.attributes.end()) return it->second + "_" + d.class_name;
    return d.class_name;
}

std::string unique_name(const SemanticGraph& g, const std::string& base) {
    std::set<std::string> taken;
    for (const auto& n : g.nodes) taken.insert(n.name);
    if (!taken.count(base)) return base;
    for (int k = 2;; ++k) {
        std::string candidate = base + "_" + std::to_string(k);
        if (!taken.count(candidate)) return candidate;
    }
}

// A group of detections believed to be one object, at most one per view.
using Group = std::map<std::size_t, std::size_t>;

void create_node(SemanticGraph& g, const std::vector<ViewDetections>& views, const Group& group) {
    const Detection& first = views[group.begin()->first].detections[group.begin()->second];
    GraphNode n;
    n.node_id = g.next_node_id++;
    n.class_name = first.class_name;
    n.attributes = first.attributes;
    n.feature = first.feature;
    n.label = first.label;
    n.is_arm = first.is_arm;
    n.last_seen_step = g.step;
    n.name = unique_name(g, base_name(first));
    for (const auto& [v, i] : group) n.groundings[views[v].view_id] = grounding_of(views[v].detections[i].mask);
    g.nodes.push_back(std::move(n));
}

// Associates the candidates flagged in `open` and turns every resulting group
// into a node. Existing visible nodes serve as extra geometric anchors.
void discover(SemanticGraph& g, const std::vector<ViewDetections>& views,
              const std::vector<std::vector<bool>>& open, const AssocThresholds& thresholds) {
    std::vector<ViewDetections> sub(views.size());
    std::vector<std::vector<std::size_t>> back(views.size());
    std::size_t total = 0;
    for (std::size_t v = 0; v < views.size(); ++v) {
        sub[v].view_id = views[v].view_id;
        for (std::size_t i = 0; i < views[v].detections.size(); ++i) {
            if (!open[v][i]) continue;
            sub[v].detections.push_back(views[v].detections[i]);
            back[v].push_back(i);
            ++total;
        }
    }
    if (total == 0) return;

    std::vector<Group> groups;
    std::vector<std::vector<bool>> used(views.size());
    for (std::size_t v = 0; v < views.size(); ++v) used[v].assign(sub[v].detections.size(), false);

    std::vector<Anchor> anchors;
    if (views.size() >= 2) {
        SemanticAssociation sem = associate_semantic(sub, thresholds.tau_vis);
        for (const auto& a : sem.anchors) {
            Group grp;
            for (const auto& [v, i] : a.detections) {
                grp[v] = back[v][i];
                used[v][i] = true;
            }
            groups.push_back(grp);
            anchors.push_back(a);
        }
        for (const auto& n : g.nodes) {
            Anchor a;
            for (std::size_t v = 0; v < views.size(); ++v)
                if (const Grounding* gr = n.fresh_grounding(views[v].view_id)) a.centroids[v] = gr->centroid;
            if (!a.centroids.empty()) anchors.push_back(std::move(a));
        }

        std::vector<std::vector<std::size_t>> unmatched(views.size());
        for (std::size_t v = 0; v < views.size(); ++v)
            for (std::size_t i = 0; i < sub[v].detections.size(); ++i)
                if (!used[v][i]) unmatched[v].push_back(i);
        try {
            for (const auto& m : associate_geometric(sub, unmatched, anchors, thresholds)) {
                groups.push_back({{m.a.view, back[m.a.view][m.a.index]}, {m.b.view, back[m.b.view][m.b.index]}});
                used[m.a.view][m.a.index] = true;
                used[m.b.view][m.b.index] = true;
            }
        } catch (const NoAnchors&) {
            // Leftovers stay single-view nodes.
        }
    }
    for (std::size_t v = 0; v < views.size(); ++v)
        for (std::size_t i = 0; i < sub[v].detections.size(); ++i)
            if (!used[v][i]) groups.push_back({{v, back[v][i]}});

    for (const auto& grp : groups) create_node(g, views, grp);
}

// An object that was let go of and is now out of sight went into the
// container under the gripper.
std::optional<GraphEdge> released_into(const SemanticGraph& g, const SemanticGraph& prev, const Proprioception& pr) {
    const auto was_held = prev.holding();
    if (!was_held) return std::nullopt;
    const GraphNode* x = g.find(*was_held);
    if (!x || x->visible() || (pr.held && x->label == *pr.held)) return std::nullopt;
    std::map<NodeId, std::pair<int, double>> votes;  // node -> (views, summed distance)
    for (const auto& [view_id, px] : pr.gripper_px) {
        const GraphNode* best = nullptr;
        double best_d = 0.0;
        for (const auto& n : g.nodes) {
            if (n.node_id == x->node_id || n.is_arm || !class_info(n.class_name).container) continue;
            const Grounding* gr = n.fresh_grounding(view_id);
            if (!gr || gr->area_px == 0) continue;
            const double d = std::hypot(gr->centroid.x - px.x, gr->centroid.y - px.y);
            const double reach = std::sqrt(static_cast<double>(gr->area_px) / std::numbers::pi) + 4.0;
            if (d <= reach && (!best || d < best_d)) {
                best = &n;
                best_d = d;
            }
        }
        if (best) {
            auto& v = votes[best->node_id];
            ++v.first;
            v.second += best_d;
        }
    }
    if (votes.empty()) return std::nullopt;
    auto pick = votes.begin();
    for (auto it = votes.begin(); it != votes.end(); ++it)
        if (it->second.first > pick->second.first ||
            (it->second.first == pick->second.first && it->second.second < pick->second.second))
            pick = it;
    return GraphEdge{x->node_id, pick->first, Relation::in, g.step};
}

void refresh_relations(SemanticGraph& g, const SemanticGraph* prev, const Proprioception& proprio) {
    const std::optional<ObjectId> held_label = proprio.held;
    std::vector<GraphEdge> fresh = induce_relations(g.nodes, held_label, g.step);
    g.edges.clear();
    for (auto& e : fresh) {
        if (prev) {
            for (const auto& p : prev->edges)
                if (p.key() == e.key()) e.since_step = p.since_step;
        }
        g.edges.push_back(e);
    }
    if (prev) {
        // Permanence: an occluded object keeps its last container or support.
        for (const auto& p : prev->edges) {
            if (p.relation != Relation::in && p.relation != Relation::on) continue;
            const GraphNode* src = g.find(p.src);
            if (!src || src->visible()) continue;
            if (held_label && src->label == *held_label) continue;
            if (g.container_of(p.src) || g.supported_by(p.src)) continue;
            g.edges.push_back(p);
        }
        if (auto e = released_into(g, *prev, proprio)) g.add_edge(*e);
    }
    g.sort_edges();
}

}  // namespace

SemanticGraph init_graph(const RawObservation& obs, const TaskSpec& spec, const AssocThresholds& thresholds,
                         const NoiseConfig& noise, Rng& rng) {
    thresholds.validate();
    noise.validate();
    const auto views = identify_relevant(segment(obs, noise, rng), spec);
    SemanticGraph g;
    g.step = 0;
    g.hand_busy = obs.proprio.held.has_value();
    std::vector<std::vector<bool>> open(views.size());
    for (std::size_t v = 0; v < views.size(); ++v) open[v].assign(views[v].detections.size(), true);
    discover(g, views, open, thresholds);
    refresh_relations(g, nullptr, obs.proprio);
    g.rebuild_bindings();
    return g;
}

SemanticGraph update_graph(const SemanticGraph& prev, const RawObservation& obs, const TaskSpec& spec,
                           const AssocThresholds& thresholds, const NoiseConfig& noise, Rng& rng) {
    Rng track_rng = rng.fork("track");
    Rng segment_rng = rng.fork("segment");
    rng.next_u64();

    const TrackedMasks tracked = track(prev, obs, noise, track_rng);
    const auto views = identify_relevant(segment(obs, noise, segment_rng), spec);

    SemanticGraph g = prev;
    g.step = prev.step + 1;
    g.hand_busy = obs.proprio.held.has_value();
    for (auto& n : g.nodes) {
        for (auto& [view_id, gr] : n.groundings) gr.fresh = false;
        auto it = tracked.find(n.node_id);
        if (it == tracked.end()) continue;
        for (const auto& [view_id, t] : it->second) n.groundings[view_id] = grounding_of(t.mask, t.drift_dx, t.drift_dy);
    }

    std::vector<std::vector<bool>> open(views.size());
    for (std::size_t v = 0; v < views.size(); ++v) {
        const auto& dets = views[v].detections;
        const std::string& view_id = views[v].view_id;
        open[v].assign(dets.size(), true);
        std::set<NodeId> merged;

        auto snap = [&](GraphNode& n, std::size_t i) {
            n.groundings[view_id] = grounding_of(dets[i].mask);
            merged.insert(n.node_id);
            open[v][i] = false;
        };

        // Overlap with the propagated mask first, then appearance.
        struct Cand {
            double score;
            NodeId node;
            std::size_t det;
        };
        std::vector<Cand> by_iou;
        for (const auto& n : g.nodes) {
            const Grounding* gr = n.fresh_grounding(view_id);
            if (!gr) continue;
            for (std::size_t i = 0; i < dets.size(); ++i) {
                if (dets[i].class_name != n.class_name) continue;
                const double o = iou(gr->mask, dets[i].mask);
                if (o >= kMergeIoU) by_iou.push_back({-o, n.node_id, i});
            }
        }
        std::sort(by_iou.begin(), by_iou.end(), [](const Cand& a, const Cand& b) {
            return std::tie(a.score, a.node, a.det) < std::tie(b.score, b.node, b.det);
        });
        for (const auto& c : by_iou)
            if (!merged.count(c.node) && open[v][c.det]) snap(*g.find(c.node), c.det);

        std::vector<Cand> by_feature;
        for (const auto& n : g.nodes) {
            if (merged.count(n.node_id)) continue;
            for (std::size_t i = 0; i < dets.size(); ++i) {
                if (!open[v][i] || dets[i].class_name != n.class_name) continue;
                const double d = cosine_distance(n.feature, dets[i].feature);
                if (d < thresholds.tau_vis) by_feature.push_back({d, n.node_id, i});
            }
        }
        std::sort(by_feature.begin(), by_feature.end(), [](const Cand& a, const Cand& b) {
            return std::tie(a.score, a.node, a.det) < std::tie(b.score, b.node, b.det);
        });
        for (const auto& c : by_feature)
            if (!merged.count(c.node) && open[v][c.det]) snap(*g.find(c.node), c.det);
    }

    discover(g, views, open, thresholds);

    for (auto& n : g.nodes)
        if (n.visible()) n.last_seen_step = g.step;
    refresh_relations(g, &prev, obs.proprio);
    g.rebuild_bindings();
    return g;
}

}  // namespace codegraph
