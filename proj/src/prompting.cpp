#include "codegraph/prompting.hpp"

#include <algorithm>
#include <stdexcept>

#include "codegraph/errors.hpp"

namespace codegraph {

const MaskedView& MaskedObservation::view(const std::string& view_id) const {
    for (const auto& v : views)
        if (v.view_id == view_id) return v;
    throw std::out_of_range("no view named " + view_id);
}

Bitmap retention_mask(const SemanticGraph& graph, const std::vector<NodeId>& relevant, const std::string& view_id,
                      int width, int height) {
    Bitmap m(width, height);
    for (NodeId id : relevant) {
        const Grounding* g = graph.node(id).fresh_grounding(view_id);
        if (!g) continue;
        if (g->mask.width() != width || g->mask.height() != height)
            throw std::invalid_argument("grounding size does not match view " + view_id);
        m = m.united(g->mask);
    }
    return m;
}

MaskedObservation clutter_free_obs(const RawObservation& obs, const SemanticGraph& graph,
                                   const std::vector<NodeId>& relevant, const std::string& subtask) {
    MaskedObservation out;
    out.subtask_cue = subtask;
    out.relevant_ids = relevant;
    for (const auto& v : obs.views) {
        Bitmap keep = retention_mask(graph, relevant, v.view_id, v.labels.width(), v.labels.height());
        out.views.push_back({v.view_id, v.labels.masked(keep), std::move(keep)});
    }
    return out;
}

MaskedObservation unmasked_obs(const RawObservation& obs, const std::vector<NodeId>& relevant,
                               const std::string& subtask) {
    MaskedObservation out;
    out.subtask_cue = subtask;
    out.relevant_ids = relevant;
    for (const auto& v : obs.views) {
        Bitmap all(v.labels.width(), v.labels.height());
        for (int y = 0; y < all.height(); ++y)
            for (int x = 0; x < all.width(); ++x) all.set(x, y);
        out.views.push_back({v.view_id, v.labels, std::move(all)});
    }
    return out;
}

std::string format_subtask_cue(const std::string& tmpl, const std::map<std::string, std::string>& env) {
    std::string out;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        if (tmpl[i] == '}') throw UnresolvedHole("stray '}' in template: " + tmpl);
        if (tmpl[i] != '{') {
            out += tmpl[i];
            continue;
        }
        const std::size_t close = tmpl.find('}', i + 1);
        if (close == std::string::npos) throw UnresolvedHole("unterminated hole in template: " + tmpl);
        const std::string var = tmpl.substr(i + 1, close - i - 1);
        auto it = env.find(var);
        if (it == env.end()) throw UnresolvedHole("unbound hole {" + var + "}");
        out += it->second;
        i = close;
    }
    return out;
}

}  // namespace codegraph
