#pragma once

#include <map>
#include <string>
#include <vector>

#include "codegraph/bitmap.hpp"
#include "codegraph/graph.hpp"
#include "codegraph/scene.hpp"

namespace codegraph {

struct MaskedView {
    std::string view_id;
    LabelMap labels;   // background outside the retention mask
    Bitmap retention;
};

struct MaskedObservation {
    std::vector<MaskedView> views;
    std::string subtask_cue;
    std::vector<NodeId> relevant_ids;

    const MaskedView& view(const std::string& view_id) const;
};

/// Union of the relevant nodes' current masks in one view. Nodes without a
/// fresh grounding there contribute nothing. Throws UnknownNode.
Bitmap retention_mask(const SemanticGraph& graph, const std::vector<NodeId>& relevant, const std::string& view_id,
                      int width, int height);

/// Blacks out every pixel outside the per-view retention mask.
MaskedObservation clutter_free_obs(const RawObservation& obs, const SemanticGraph& graph,
                                   const std::vector<NodeId>& relevant, const std::string& subtask);

/// The unmasked observation in the same shape, for the raw-vision ablation.
MaskedObservation unmasked_obs(const RawObservation& obs, const std::vector<NodeId>& relevant,
                               const std::string& subtask);

/// Substitutes {var} holes. Throws UnresolvedHole for unbound or unterminated holes.
std::string format_subtask_cue(const std::string& tmpl, const std::map<std::string, std::string>& env);

}  // namespace codegraph
