#include "codegraph/mock_vlm.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "codegraph/prompting.hpp"

namespace codegraph {

namespace {

struct RoleSpec {
    std::string role;
    std::string class_name;
    Attributes attributes;
};

struct Expect {
    enum class Kind { in, on, held, table };
    std::string role;
    Kind kind = Kind::table;
    std::string parent;
};

struct Stage {
    std::string id;
    std::vector<Expect> expects;
    std::optional<std::pair<std::string, std::string>> near;
    std::string cue;
    std::vector<std::string> focus;
    bool done = false;
};

struct TaskModel {
    std::vector<RoleSpec> roles;
    std::vector<Stage> stages;  // stages[0] is the initial stage
};

using K = Expect::Kind;

TaskModel model_for(const TaskId& task) {
    switch (task.kind) {
        case TaskKind::swap_cups:
            return {{{"F", "cup", {{"color", task.first_color}}},
                     {"O", "cup", {}},
                     {"fs", "plate", {}},
                     {"os", "plate", {}},
                     {"b", "plate", {}}},
                    {{"s0", {{"F", K::in, "fs"}, {"O", K::in, "os"}}, {}, "pick up the {F}", {"F"}},
                     {"s0h", {{"F", K::held, ""}, {"O", K::in, "os"}}, {}, "put the {F} inside the {b}", {"F", "b"}},
                     {"s1", {{"F", K::in, "b"}, {"O", K::in, "os"}}, {}, "pick up the {O}", {"O"}},
                     {"s1h", {{"F", K::in, "b"}, {"O", K::held, ""}}, {}, "put the {O} inside the {fs}", {"O", "fs"}},
                     {"s2", {{"F", K::in, "b"}, {"O", K::in, "fs"}}, {}, "pick up the {F}", {"F"}},
                     {"s2h", {{"F", K::held, ""}, {"O", K::in, "fs"}}, {}, "put the {F} inside the {os}", {"F", "os"}},
                     {"done", {{"F", K::in, "os"}, {"O", K::in, "fs"}}, {}, "", {}, true}}};
        case TaskKind::pnp_twice:
            return {{{"C", "cube", {}}, {"h", "plate", {}}, {"a", "plate", {}}},
                    {{"s0", {{"C", K::in, "h"}}, {}, "pick up the {C}", {"C"}},
                     {"s0h", {{"C", K::held, ""}}, {}, "put the {C} inside the {a}", {"C", "a"}},
                     {"s1", {{"C", K::in, "a"}}, {}, "pick up the {C}", {"C"}},
                     {"s1h", {{"C", K::held, ""}}, {}, "put the {C} inside the {h}", {"C", "h"}},
                     {"done", {{"C", K::in, "h"}}, {}, "", {}, true}}};
        case TaskKind::place_and_stack:
            return {{{"C", "cube", {}}, {"n", "cup", {}}, {"f", "cup", {}}},
                    {{"s0",
                      {{"C", K::table, ""}, {"n", K::table, ""}, {"f", K::table, ""}},
                      std::pair<std::string, std::string>{"C", "n"},
                      "pick up the {C}",
                      {"C"}},
                     {"s0h",
                      {{"C", K::held, ""}, {"n", K::table, ""}, {"f", K::table, ""}},
                      {},
                      "put the {C} inside the {n}",
                      {"C", "n"}},
                     {"s1", {{"C", K::in, "n"}, {"n", K::table, ""}, {"f", K::table, ""}}, {}, "pick up the {f}", {"f"}},
                     {"s1h",
                      {{"C", K::in, "n"}, {"n", K::table, ""}, {"f", K::held, ""}},
                      {},
                      "stack the {f} on the {n}",
                      {"f", "n"}},
                     {"done", {{"C", K::in, "n"}, {"n", K::table, ""}, {"f", K::on, "n"}}, {}, "", {}, true}}};
        case TaskKind::custom: break;
    }
    throw UnknownTask("no subtask chooser for custom scenes");
}

// How an object appears to the chooser. `hidden` only arises for rgb input.
struct Status {
    enum class Kind { in, on, held, table, hidden };
    Kind kind = Kind::table;
    NodeId parent = 0;
    bool operator==(const Status&) const = default;
};

bool shown(const SemanticGraph& g, NodeId id, VlmInput input) {
    return input == VlmInput::graph || g.node(id).visible() || g.holding() == id;
}

Status observe(const SemanticGraph& g, NodeId id, VlmInput input) {
    if (g.holding() == id) return {Status::Kind::held, 0};
    if (!shown(g, id, input)) return {Status::Kind::hidden, 0};
    if (auto c = g.container_of(id); c && shown(g, *c, input)) return {Status::Kind::in, *c};
    if (auto s = g.supported_by(id); s && shown(g, *s, input)) return {Status::Kind::on, *s};
    return {Status::Kind::table, 0};
}

Status expected(const Expect& e, const std::map<std::string, NodeId>& roles, const SemanticGraph& g,
                VlmInput input) {
    switch (e.kind) {
        case K::held: return {Status::Kind::held, 0};
        case K::table: return {Status::Kind::table, 0};
        case K::on: return {Status::Kind::on, roles.at(e.parent)};
        case K::in: {
            const NodeId p = roles.at(e.parent);
            if (input == VlmInput::rgb && class_info(g.node(p).class_name).opaque) return {Status::Kind::hidden, 0};
            return {Status::Kind::in, p};
        }
    }
    return {};
}

int mismatches(const Stage& s, const std::map<std::string, NodeId>& roles, const SemanticGraph& g, VlmInput input) {
    int n = 0;
    for (const auto& e : s.expects)
        if (!(observe(g, roles.at(e.role), input) == expected(e, roles, g, input))) ++n;
    if (s.near) {
        const NodeId a = roles.at(s.near->first);
        const NodeId b = roles.at(s.near->second);
        const bool seen = shown(g, a, input) && shown(g, b, input) &&
                          (g.relation_holds(a, b, Relation::near) || g.relation_holds(b, a, Relation::near));
        if (!seen) ++n;
    }
    return n;
}

void assignments(const std::vector<RoleSpec>& specs, const SemanticGraph& g, std::size_t i,
                 std::map<std::string, NodeId>& cur, std::set<NodeId>& used,
                 std::vector<std::map<std::string, NodeId>>& out) {
    if (i == specs.size()) {
        out.push_back(cur);
        return;
    }
    ObjectQuery q;
    q.class_name = specs[i].class_name;
    q.attributes = specs[i].attributes;
    for (NodeId id : g.objects_by(q)) {
        if (used.count(id) || g.node(id).is_arm) continue;
        cur[specs[i].role] = id;
        used.insert(id);
        assignments(specs, g, i + 1, cur, used, out);
        used.erase(id);
        cur.erase(specs[i].role);
    }
}

struct Hypothesis {
    std::map<std::string, NodeId> roles;
    const Stage* stage = nullptr;
};

}  // namespace

MockVlm::MockVlm(TaskId task, VlmInput input, double error_p) : task_(std::move(task)), input_(input), error_p_(error_p) {
    model_for(task_);
}

PlannerOutput MockVlm::choose(const SemanticGraph& graph, Rng& rng) {
    const TaskModel model = model_for(task_);

    std::vector<std::map<std::string, NodeId>> role_sets;
    if (anchored_) {
        for (const auto& [role, id] : *anchored_)
            if (!graph.find(id)) throw StaleNode("role '" + role + "' refers to vanished node " + std::to_string(id));
        role_sets.push_back(*anchored_);
    } else {
        std::map<std::string, NodeId> cur;
        std::set<NodeId> used;
        assignments(model.roles, graph, 0, cur, used, role_sets);
    }
    if (role_sets.empty()) throw PlannerError("no objects fit the task roles");

    if (input_ == VlmInput::graph && !anchored_) {
        // Roles are read off the first graph, which shows the initial stage.
        int best = std::numeric_limits<int>::max();
        std::vector<std::size_t> ties;
        for (std::size_t i = 0; i < role_sets.size(); ++i) {
            const int m = mismatches(model.stages[0], role_sets[i], graph, input_);
            if (m < best) {
                best = m;
                ties.clear();
            }
            if (m == best) ties.push_back(i);
        }
        anchored_ = role_sets[ties[rng.below(ties.size())]];
        role_sets = {*anchored_};
    }

    std::vector<Hypothesis> all;
    std::vector<int> scores;
    for (const auto& roles : role_sets)
        for (const auto& s : model.stages) {
            all.push_back({roles, &s});
            scores.push_back(mismatches(s, roles, graph, input_));
        }
    const int best = *std::min_element(scores.begin(), scores.end());
    std::vector<std::size_t> ties;
    for (std::size_t i = 0; i < all.size(); ++i)
        if (scores[i] == best) ties.push_back(i);
    last_ties_ = ties.size();

    const Hypothesis& h = rng.bernoulli(error_p_) ? all[rng.below(all.size())] : all[ties[rng.below(ties.size())]];
    PlannerOutput out;
    out.emitted_step = h.stage->id;
    if (h.stage->done) {
        out.done = true;
        return out;
    }
    std::map<std::string, std::string> names;
    for (const auto& [role, id] : h.roles) names[role] = graph.node(id).name;
    out.subtask_instruction = format_subtask_cue(h.stage->cue, names);
    std::set<NodeId> rel;
    for (const auto& r : h.stage->focus) rel.insert(h.roles.at(r));
    out.relevant_objects.assign(rel.begin(), rel.end());
    return out;
}

}  // namespace codegraph
