#include <algorithm>
#include <cmath>
#include <map>

#include "codegraph/graph.hpp"

namespace codegraph {

namespace {

struct ViewEvidence {
    bool both_visible = false;
    bool in = false;
    std::size_t contact = 0;
};

std::size_t contact_columns(const Bitmap& top, const Bitmap& bottom) {
    const PixelBox cols = PixelBox{top.bounds().x0, 0, top.bounds().x1, 1}.intersect(
        PixelBox{bottom.bounds().x0, 0, bottom.bounds().x1, 1});
    std::size_t n = 0;
    for (int x = cols.x0; x < cols.x1; ++x) {
        int lowest_top = -1;
        for (int y = top.bounds().y0; y < top.bounds().y1; ++y)
            if (top.get(x, y)) lowest_top = y;
        if (lowest_top < 0) continue;
        int highest_bottom = -1;
        for (int y = bottom.bounds().y0; y < bottom.bounds().y1 && highest_bottom < 0; ++y)
            if (bottom.get(x, y)) highest_bottom = y;
        if (highest_bottom < 0) continue;
        const int gap = highest_bottom - lowest_top;
        if (gap >= 0 && gap <= 2) ++n;
    }
    return n;
}

}  // namespace

bool mask_contains(const Grounding& inner, const Grounding& outer) {
    if (inner.area_px == 0 || inner.area_px >= outer.area_px) return false;
    const Bitmap region = outer.mask.filled().dilated(kContainmentDilation);
    const double ratio =
        static_cast<double>(intersection_count(inner.mask, region)) / static_cast<double>(inner.area_px);
    return ratio >= kContainmentRatio;
}

bool mask_supports(const Grounding& top, const Grounding& bottom) {
    if (!(top.centroid.y < bottom.centroid.y)) return false;
    return contact_columns(top.mask, bottom.mask) >= kContactColumns;
}

std::vector<GraphEdge> induce_relations(const std::vector<GraphNode>& nodes, std::optional<ObjectId> held_label,
                                        int step) {
    std::vector<const GraphNode*> objs;
    for (const auto& n : nodes) {
        if (n.is_arm || !n.visible()) continue;
        if (held_label && n.label == *held_label) continue;
        objs.push_back(&n);
    }

    std::vector<GraphEdge> edges;
    std::map<std::pair<NodeId, NodeId>, bool> near;
    // Candidate in/on per ordered pair, kept only when every shared view agrees.
    struct Fused {
        bool any_view = false;
        bool in_all = true;
        bool on_all = true;
        std::size_t contact = 0;
        std::size_t outer_area = 0;
    };
    std::map<std::pair<NodeId, NodeId>, Fused> pairs;

    for (const GraphNode* a : objs) {
        for (const GraphNode* b : objs) {
            if (a == b) continue;
            Fused& f = pairs[{a->node_id, b->node_id}];
            for (const auto& [view_id, ga] : a->groundings) {
                if (!ga.fresh) continue;
                const Grounding* gb = b->fresh_grounding(view_id);
                if (!gb) continue;
                f.any_view = true;
                if (a->node_id < b->node_id) {
                    const double diag = std::hypot(ga.mask.width(), ga.mask.height());
                    const double d = std::hypot(ga.centroid.x - gb->centroid.x, ga.centroid.y - gb->centroid.y);
                    if (d / diag < kNearNormalized) near[{a->node_id, b->node_id}] = true;
                }
                if (!mask_contains(ga, *gb)) f.in_all = false;
                if (mask_supports(ga, *gb)) {
                    f.contact += contact_columns(ga.mask, gb->mask);
                } else {
                    f.on_all = false;
                }
                f.outer_area += gb->area_px;
            }
        }
    }

    // One container and one support per source: innermost container, firmest contact.
    std::map<NodeId, std::pair<NodeId, std::size_t>> in_best, on_best;
    for (const auto& [key, f] : pairs) {
        if (!f.any_view) continue;
        const auto [src, dst] = key;
        if (f.in_all) {
            auto it = in_best.find(src);
            if (it == in_best.end() || f.outer_area < it->second.second) in_best[src] = {dst, f.outer_area};
        } else if (f.on_all) {
            auto it = on_best.find(src);
            if (it == on_best.end() || f.contact > it->second.second) on_best[src] = {dst, f.contact};
        }
    }

    auto related = [&](NodeId a, NodeId b) {
        auto linked = [&](const std::map<NodeId, std::pair<NodeId, std::size_t>>& m, NodeId s, NodeId d) {
            auto it = m.find(s);
            return it != m.end() && it->second.first == d;
        };
        return linked(in_best, a, b) || linked(in_best, b, a) || linked(on_best, a, b) || linked(on_best, b, a);
    };

    for (const auto& [src, v] : in_best) edges.push_back({src, v.first, Relation::in, step});
    for (const auto& [src, v] : on_best) edges.push_back({src, v.first, Relation::on, step});
    for (const auto& [key, yes] : near)
        if (yes && !related(key.first, key.second)) edges.push_back({key.first, key.second, Relation::near, step});

    std::optional<NodeId> arm, held;
    for (const auto& n : nodes) {
        if (n.is_arm) arm = n.node_id;
        if (held_label && n.label == *held_label && !n.is_arm) held = n.node_id;
    }
    if (arm && held) edges.push_back({*arm, *held, Relation::holding, step});

    std::sort(edges.begin(), edges.end(), [](const GraphEdge& a, const GraphEdge& b) { return a.key() < b.key(); });
    return edges;
}

}  // namespace codegraph
