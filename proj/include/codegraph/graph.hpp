#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "codegraph/bitmap.hpp"
#include "codegraph/perception.hpp"
#include "codegraph/scene.hpp"

namespace codegraph {

struct Grounding {
    Bitmap mask;
    PixelPoint centroid;
    std::size_t area_px = 0;
    int drift_dx = 0;
    int drift_dy = 0;
    /// Observed (detected or tracked) at the graph's current step. Stale
    /// groundings are kept for occluded objects.
    bool fresh = true;
};

struct GraphNode {
    NodeId node_id = 0;
    std::string name;
    std::string class_name;
    Attributes attributes;
    std::map<std::string, Grounding> groundings;
    int last_seen_step = 0;
    Feature feature{};
    ObjectId label = 0;
    bool is_arm = false;

    bool visible() const;
    const Grounding* fresh_grounding(const std::string& view_id) const;
};

struct GraphEdge {
    NodeId src = 0;
    NodeId dst = 0;
    Relation relation = Relation::near;
    int since_step = 0;

    auto key() const { return std::tuple(src, dst, relation); }
    bool operator==(const GraphEdge&) const = default;
};

struct AssocThresholds {
    double tau_vis = 0.15;
    double tau_geo = 0.10;
    double margin_geo = 0.05;

    /// Throws std::invalid_argument.
    void validate() const;
};

struct ObjectQuery {
    std::optional<std::string> class_name;
    Attributes attributes;
    std::optional<NodeId> in;
    std::optional<NodeId> on;
};

/// The persistent scene state: nodes, typed edges and the planner's memory.
struct SemanticGraph {
    std::vector<GraphNode> nodes;  // sorted by node_id
    std::vector<GraphEdge> edges;  // sorted by key()
    std::vector<std::string> task_memory;
    std::map<std::string, NodeId> bindings;  // node name -> node_id
    int step = 0;
    bool hand_busy = false;  // proprioception: gripper closed on something
    NodeId next_node_id = 1;

    const GraphNode* find(NodeId id) const;
    GraphNode* find(NodeId id);
    const GraphNode& node(NodeId id) const;  // throws UnknownNode
    const GraphNode* find_by_name(const std::string& name) const;
    std::optional<NodeId> arm() const;

    // Query API. Results are ordered by node_id.
    std::vector<NodeId> objects_by(const ObjectQuery& q) const;
    std::optional<NodeId> container_of(NodeId x) const;
    std::optional<NodeId> supported_by(NodeId x) const;
    std::optional<NodeId> holding() const;
    std::vector<NodeId> empty_containers(const std::string& class_name) const;
    bool relation_holds(NodeId a, NodeId b, Relation r) const;

    void add_edge(GraphEdge e);
    void sort_edges();
    void rebuild_bindings();
};

// ---- association ---------------------------------------------------------

struct DetRef {
    std::size_t view = 0;
    std::size_t index = 0;
    auto operator<=>(const DetRef&) const = default;
};

struct CrossViewMatch {
    DetRef a;
    DetRef b;
    double distance = 0.0;
};

/// An object matched across views; per-view centroid where present.
struct Anchor {
    std::map<std::size_t, PixelPoint> centroids;
    std::map<std::size_t, std::size_t> detections;  // empty for node-backed anchors
};

struct SemanticAssociation {
    std::vector<CrossViewMatch> matches;
    std::vector<Anchor> anchors;
};

/// Mutual-nearest matching on cosine distance between every pair of views.
/// Throws std::invalid_argument with fewer than two views.
SemanticAssociation associate_semantic(const std::vector<ViewDetections>& views, double tau_vis);

/// Distances to each anchor, divided by the largest present one; nullopt
/// marks anchors missing from this view. Throws NoAnchors.
std::vector<std::optional<double>> distance_signature(PixelPoint m, const std::vector<std::optional<PixelPoint>>& anchors);

/// L2 over anchors present in both signatures, scaled by sqrt(total / shared);
/// infinity when nothing is shared.
double signature_distance(const std::vector<std::optional<double>>& a, const std::vector<std::optional<double>>& b);

/// Matches leftover detections by relative layout. Throws NoAnchors when two
/// views both hold unmatched detections but one of them has no anchor.
std::vector<CrossViewMatch> associate_geometric(const std::vector<ViewDetections>& views,
                                                const std::vector<std::vector<std::size_t>>& unmatched,
                                                const std::vector<Anchor>& anchors, const AssocThresholds& thresholds);

// ---- relations -----------------------------------------------------------

inline constexpr double kNearNormalized = 0.12;
inline constexpr double kContainmentRatio = 0.85;
inline constexpr int kContainmentDilation = 2;
inline constexpr std::size_t kContactColumns = 5;
inline constexpr double kMergeIoU = 0.5;

bool mask_contains(const Grounding& inner, const Grounding& outer);
bool mask_supports(const Grounding& top, const Grounding& bottom);

/// Relations among nodes with fresh groundings. Edges carry since_step = step.
std::vector<GraphEdge> induce_relations(const std::vector<GraphNode>& nodes, std::optional<ObjectId> held_label,
                                        int step);

// ---- construction and update ----------------------------------------------

/// Pipeline: segment, relevance filter, semantic then geometric association,
/// node creation, relation induction.
SemanticGraph init_graph(const RawObservation& obs, const TaskSpec& spec, const AssocThresholds& thresholds,
                         const NoiseConfig& noise, Rng& rng);

SemanticGraph update_graph(const SemanticGraph& prev, const RawObservation& obs, const TaskSpec& spec,
                           const AssocThresholds& thresholds, const NoiseConfig& noise, Rng& rng);

}  // namespace codegraph
