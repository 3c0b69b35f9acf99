#include "codegraph/graph.hpp"

#include <algorithm>
#include <stdexcept>

#include "codegraph/errors.hpp"

namespace codegraph {

bool GraphNode::visible() const {
    return std::any_of(groundings.begin(), groundings.end(), [](const auto& kv) { return kv.second.fresh; });
}

const Grounding* GraphNode::fresh_grounding(const std::string& view_id) const {
    auto it = groundings.find(view_id);
    if (it == groundings.end() || !it->second.fresh) return nullptr;
    return &it->second;
}

void AssocThresholds::validate() const {
    if (!(tau_vis > 0.0 && tau_vis < 2.0)) throw std::invalid_argument("tau_vis must be in (0, 2)");
    if (!(tau_geo > 0.0)) throw std::invalid_argument("tau_geo must be > 0");
    if (!(margin_geo >= 0.0)) throw std::invalid_argument("margin_geo must be >= 0");
}

const GraphNode* SemanticGraph::find(NodeId id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                               [](const GraphNode& n, NodeId v) { return n.node_id < v; });
    return it != nodes.end() && it->node_id == id ? &*it : nullptr;
}

GraphNode* SemanticGraph::find(NodeId id) {
    return const_cast<GraphNode*>(static_cast<const SemanticGraph&>(*this).find(id));
}

const GraphNode& SemanticGraph::node(NodeId id) const {
    const GraphNode* n = find(id);
    if (!n) throw UnknownNode("no node with id " + std::to_string(id));
    return *n;
}

const GraphNode* SemanticGraph::find_by_name(const std::string& name) const {
    auto it = bindings.find(name);
    return it == bindings.end() ? nullptr : find(it->second);
}

std::optional<NodeId> SemanticGraph::arm() const {
    for (const auto& n : nodes)
        if (n.is_arm) return n.node_id;
    return std::nullopt;
}

namespace {

bool has_edge(const std::vector<GraphEdge>& edges, NodeId src, NodeId dst, Relation r) {
    return std::any_of(edges.begin(), edges.end(),
                       [&](const GraphEdge& e) { return e.src == src && e.dst == dst && e.relation == r; });
}

std::optional<NodeId> dst_of(const std::vector<GraphEdge>& edges, NodeId src, Relation r) {
    for (const auto& e : edges)
        if (e.src == src && e.relation == r) return e.dst;
    return std::nullopt;
}

}  // namespace

std::vector<NodeId> SemanticGraph::objects_by(const ObjectQuery& q) const {
    std::vector<NodeId> out;
    for (const auto& n : nodes) {
        if (q.class_name && n.class_name != *q.class_name) continue;
        bool ok = true;
        for (const auto& [k, v] : q.attributes) {
            auto it = n.attributes.find(k);
            if (it == n.attributes.end() || it->second != v) ok = false;
        }
        if (!ok) continue;
        if (q.in && !has_edge(edges, n.node_id, *q.in, Relation::in)) continue;
        if (q.on && !has_edge(edges, n.node_id, *q.on, Relation::on)) continue;
        out.push_back(n.node_id);
    }
    return out;
}

std::optional<NodeId> SemanticGraph::container_of(NodeId x) const { return dst_of(edges, x, Relation::in); }

std::optional<NodeId> SemanticGraph::supported_by(NodeId x) const { return dst_of(edges, x, Relation::on); }

std::optional<NodeId> SemanticGraph::holding() const {
    for (const auto& e : edges)
        if (e.relation == Relation::holding) return e.dst;
    return std::nullopt;
}

std::vector<NodeId> SemanticGraph::empty_containers(const std::string& class_name) const {
    std::vector<NodeId> out;
    for (const auto& n : nodes) {
        if (n.class_name != class_name) continue;
        const bool occupied = std::any_of(edges.begin(), edges.end(), [&](const GraphEdge& e) {
            return e.dst == n.node_id && e.relation == Relation::in;
        });
        if (!occupied) out.push_back(n.node_id);
    }
    return out;
}

bool SemanticGraph::relation_holds(NodeId a, NodeId b, Relation r) const {
    if (r == Relation::near) return has_edge(edges, a, b, r) || has_edge(edges, b, a, r);
    return has_edge(edges, a, b, r);
}

void SemanticGraph::add_edge(GraphEdge e) {
    if (e.src == e.dst) throw std::invalid_argument("self edge");
    if (e.relation == Relation::near && e.src > e.dst) std::swap(e.src, e.dst);
    for (const auto& x : edges)
        if (x.key() == e.key()) return;
    edges.push_back(e);
}

void SemanticGraph::sort_edges() {
    std::sort(edges.begin(), edges.end(), [](const GraphEdge& a, const GraphEdge& b) { return a.key() < b.key(); });
}

void SemanticGraph::rebuild_bindings() {
    bindings.clear();
    for (const auto& n : nodes) bindings[n.name] = n.node_id;
}

}  // namespace codegraph
