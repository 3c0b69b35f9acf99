#include "codegraph/executor.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "codegraph/errors.hpp"

namespace codegraph {

double GroundingErrorModel::probability(std::size_t visible_distractors) const {
    return std::min(p_max, base_p + per_distractor_p * static_cast<double>(visible_distractors));
}

void GroundingErrorModel::validate() const {
    if (!(base_p >= 0.0 && base_p <= 1.0)) throw std::invalid_argument("base_p must be in [0,1]");
    if (!(per_distractor_p >= 0.0)) throw std::invalid_argument("per_distractor_p must be >= 0");
    if (!(p_max >= 0.0 && p_max <= 1.0)) throw std::invalid_argument("p_max must be in [0,1]");
    if (base_p > p_max) throw std::invalid_argument("base_p must not exceed p_max");
}

std::string to_string(Verb v) {
    switch (v) {
        case Verb::pick_up: return "pick_up";
        case Verb::put_inside: return "put_inside";
        case Verb::stack_on: return "stack_on";
        case Verb::place_on: return "place_on";
    }
    return "pick_up";
}

std::string to_string(ChunkOutcome o) {
    switch (o) {
        case ChunkOutcome::completed: return "completed";
        case ChunkOutcome::rejected: return "rejected";
        case ChunkOutcome::mis_grounded: return "mis_grounded";
        case ChunkOutcome::grounding_failed: return "grounding_failed";
    }
    return "completed";
}

namespace {

bool is_name(const std::string& s) { return !s.empty() && s.find(' ') == std::string::npos; }

bool split_two(const std::string& cue, const std::string& prefix, const std::string& mid, ParsedCue& out) {
    if (cue.rfind(prefix, 0) != 0) return false;
    const std::size_t at = cue.find(mid, prefix.size());
    if (at == std::string::npos) return false;
    const std::string x = cue.substr(prefix.size(), at - prefix.size());
    const std::string y = cue.substr(at + mid.size());
    if (!is_name(x) || !is_name(y)) return false;
    out.roles = {{"x", x}, {"y", y}};
    return true;
}

}  // namespace

ParsedCue parse_cue(const std::string& cue) {
    ParsedCue p;
    const std::string pick = "pick up the ";
    if (cue.rfind(pick, 0) == 0 && is_name(cue.substr(pick.size()))) {
        p.verb = Verb::pick_up;
        p.roles = {{"x", cue.substr(pick.size())}};
        return p;
    }
    if (split_two(cue, "put the ", " inside the ", p)) {
        p.verb = Verb::put_inside;
        return p;
    }
    if (split_two(cue, "stack the ", " on the ", p)) {
        p.verb = Verb::stack_on;
        return p;
    }
    if (split_two(cue, "place the ", " on the ", p)) {
        p.verb = Verb::place_on;
        return p;
    }
    throw UnknownVerbPattern("unrecognised subtask: \"" + cue + "\"");
}

GroundedTargets ground_targets(const MaskedObservation& obs, const SemanticGraph& graph, Rng& rng,
                               const GroundingErrorModel& err) {
    const ParsedCue cue = parse_cue(obs.subtask_cue);
    GroundedTargets t;
    t.verb = cue.verb;

    std::set<ObjectId> visible;
    for (const auto& v : obs.views)
        for (std::uint32_t l : v.labels.data())
            if (l != 0) visible.insert(l);
    std::set<ObjectId> relevant;
    for (NodeId id : obs.relevant_ids) relevant.insert(graph.node(id).label);
    std::optional<ObjectId> arm_label;
    if (auto arm = graph.arm()) arm_label = graph.node(*arm).label;

    for (ObjectId l : visible)
        if (!relevant.count(l) && l != arm_label) ++t.visible_distractors;

    for (const auto& [role, name] : cue.roles) {
        const GraphNode* n = graph.find_by_name(name);
        if (!n) throw UnknownNode("no node named " + name);
        const bool explained = graph.holding() == n->node_id || graph.container_of(n->node_id) ||
                               graph.supported_by(n->node_id);
        if (!visible.count(n->label) && !explained) throw TargetInvisible(name + " is not visible in any view");
        t.labels[role] = n->label;
        t.nodes[role] = n->node_id;
    }

    t.mis_ground_p = err.probability(t.visible_distractors);
    if (rng.bernoulli(t.mis_ground_p)) {
        auto it = std::next(t.labels.begin(), static_cast<long>(rng.below(t.labels.size())));
        std::vector<ObjectId> candidates;
        for (ObjectId l : visible)
            if (l != arm_label && l != it->second) candidates.push_back(l);
        if (!candidates.empty()) {
            const ObjectId wrong = candidates[rng.below(candidates.size())];
            it->second = wrong;
            t.nodes.erase(it->first);
            for (const auto& n : graph.nodes)
                if (n.label == wrong) t.nodes[it->first] = n.node_id;
            t.mis_grounded = true;
        }
    }
    return t;
}

std::pair<WorldState, ActionChunk> execute_chunk(const WorldState& world, const GroundedTargets& targets,
                                                 int horizon, Rng& rng) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    ActionChunk chunk;
    chunk.targets = targets;
    std::vector<Primitive> plan;
    const auto held = world.gripper.held;

    switch (targets.verb) {
        case Verb::pick_up: {
            const ObjectId x = targets.labels.at("x");
            if (held == x) {
                plan.push_back(Primitive::no_op());
                break;
            }
            if (held) {
                const auto spot = sample_free_position(world, world.object(*held).class_name, rng, held);
                plan.push_back(Primitive::place_at(spot.value_or(workspace_of(world.table).held_slot)));
            }
            plan.push_back(Primitive::approach(x));
            plan.push_back(Primitive::pick(x));
            break;
        }
        case Verb::put_inside: {
            const ObjectId y = targets.labels.at("y");
            plan.push_back(Primitive::approach(y));
            plan.push_back(Primitive::place_in(y));
            break;
        }
        case Verb::stack_on:
        case Verb::place_on: {
            const ObjectId y = targets.labels.at("y");
            plan.push_back(Primitive::approach(y));
            plan.push_back(Primitive::place_on(y));
            break;
        }
    }
    if (plan.size() > static_cast<std::size_t>(horizon)) plan.resize(static_cast<std::size_t>(horizon));

    WorldState w = world;
    bool rejected = false;
    for (const auto& p : plan) {
        PrimitiveEvent e;
        e.step = w.step_count;
        e.primitive = p;
        const auto before = w.gripper.held;
        auto [next, result] = apply_primitive(w, p);
        e.result = result;
        if (result == PrimitiveResult::accepted) {
            if (p.kind == Primitive::Kind::pick) e.moved = p.target;
            if (p.kind == Primitive::Kind::place_in || p.kind == Primitive::Kind::place_on ||
                p.kind == Primitive::Kind::place_at)
                e.moved = before;
        }
        chunk.primitives.push_back(p);
        chunk.events.push_back(e);
        w = std::move(next);
        if (result == PrimitiveResult::rejected) {
            rejected = true;
            break;
        }
    }
    chunk.outcome = targets.mis_grounded ? ChunkOutcome::mis_grounded
                    : rejected           ? ChunkOutcome::rejected
                                         : ChunkOutcome::completed;
    return {std::move(w), std::move(chunk)};
}

}  // namespace codegraph
