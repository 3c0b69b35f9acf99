#pragma once

#include <json.hpp>

#include "codegraph/bitmap.hpp"
#include "codegraph/graph.hpp"
#include "codegraph/planner.hpp"
#include "codegraph/scene.hpp"

namespace codegraph {

using nlohmann::json;

/// Rounds to 9 significant digits so logged doubles print identically everywhere.
double round9(double v);

json rle_to_json(const Rle& rle);
/// Throws std::invalid_argument on malformed input.
Rle rle_from_json(const json& j);

json snapshot_to_json(const SemanticGraph& g);
/// Inverse of snapshot_to_json up to the rounding of features and centroids.
SemanticGraph snapshot_from_json(const json& j);

json primitive_to_json(const Primitive& p);
json planner_output_to_json(const PlannerOutput& out);

}  // namespace codegraph
