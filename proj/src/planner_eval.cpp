#include <algorithm>
#include <set>

#include "codegraph/planner.hpp"
#include "codegraph/prompting.hpp"

namespace codegraph {

namespace {

NodeId lookup(const Env& env, const std::string& var) {
    auto it = env.find(var);
    if (it == env.end()) throw UnboundVariable("variable '" + var + "' is not bound");
    return it->second;
}

bool has_record(const SemanticGraph& g, const std::string& record) {
    return std::find(g.task_memory.begin(), g.task_memory.end(), record) != g.task_memory.end();
}

// Task memory decoded into the cached role bindings and plan.
struct Memory {
    Env globals;
    std::map<std::string, Env> step_env;  // expanded step id -> loop binding
    std::optional<std::vector<std::string>> plan;
};

Memory read_memory(const std::vector<std::string>& records) {
    Memory m;
    for (const auto& r : records) {
        if (r.rfind("bind:", 0) == 0) {
            const std::size_t eq = r.find('=');
            if (eq == std::string::npos) continue;
            const std::string lhs = r.substr(5, eq - 5);
            const NodeId id = static_cast<NodeId>(std::stoul(r.substr(eq + 1)));
            const std::size_t at = lhs.find('@');
            if (at == std::string::npos) {
                m.globals[lhs] = id;
            } else {
                m.step_env[lhs.substr(at + 1)][lhs.substr(0, at)] = id;
            }
        } else if (r.rfind("plan:", 0) == 0) {
            std::vector<std::string> ids;
            std::string cur;
            for (char c : r.substr(5)) {
                if (c == ',') {
                    ids.push_back(cur);
                    cur.clear();
                } else {
                    cur += c;
                }
            }
            if (!cur.empty()) ids.push_back(cur);
            m.plan = ids;
        }
    }
    return m;
}

struct Expanded {
    std::string id;
    const Step* step = nullptr;
    Env loop;  // loop variable only
};

void expand(const std::vector<PlanItem>& items, const SemanticGraph& g, const Env& env, std::vector<Expanded>& out) {
    for (const auto& it : items) {
        switch (it.kind) {
            case PlanItem::Kind::step: out.push_back({it.step.step_id, &it.step, {}}); break;
            case PlanItem::Kind::branch:
                expand(eval_predicate(it.condition, g, env) ? it.then_items : it.else_items, g, env, out);
                break;
            case PlanItem::Kind::for_each: {
                const auto ids = eval_query(it.query, g, env);
                for (std::size_t k = 0; k < ids.size(); ++k)
                    for (const auto& s : it.body)
                        out.push_back({s.step_id + "." + std::to_string(k + 1), &s, {{it.var, ids[k]}}});
                break;
            }
        }
    }
}

const Step* step_by_id(const PlannerProgram& prog, const std::string& id) {
    const auto steps = prog.all_steps();
    for (const auto& [s, var] : steps)
        if (s->step_id == id) return s;
    const std::size_t dot = id.rfind('.');
    if (dot != std::string::npos)
        for (const auto& [s, var] : steps)
            if (!var.empty() && s->step_id == id.substr(0, dot)) return s;
    return nullptr;
}

}  // namespace

std::vector<NodeId> eval_query(const QueryExpr& q, const SemanticGraph& g, const Env& env) {
    std::vector<NodeId> out;
    switch (q.kind) {
        case QueryExpr::Kind::objects: {
            ObjectQuery oq;
            oq.class_name = q.class_name;
            oq.attributes = q.attributes;
            if (q.in_var) oq.in = lookup(env, *q.in_var);
            if (q.on_var) oq.on = lookup(env, *q.on_var);
            out = g.objects_by(oq);
            break;
        }
        case QueryExpr::Kind::first: {
            const auto all = eval_query(q.sub[0], g, env);
            if (!all.empty()) out.push_back(all.front());
            break;
        }
        case QueryExpr::Kind::container_of:
            if (auto c = g.container_of(lookup(env, q.var))) out.push_back(*c);
            break;
        case QueryExpr::Kind::empty_containers: out = g.empty_containers(q.container_class); break;
        case QueryExpr::Kind::other: {
            const NodeId drop = lookup(env, q.var);
            for (NodeId id : eval_query(q.sub[0], g, env))
                if (id != drop) out.push_back(id);
            break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool eval_predicate(const PredExpr& p, const SemanticGraph& g, const Env& env) {
    switch (p.kind) {
        case PredExpr::Kind::in: return g.relation_holds(lookup(env, p.args[0]), lookup(env, p.args[1]), Relation::in);
        case PredExpr::Kind::on: return g.relation_holds(lookup(env, p.args[0]), lookup(env, p.args[1]), Relation::on);
        case PredExpr::Kind::near:
            return g.relation_holds(lookup(env, p.args[0]), lookup(env, p.args[1]), Relation::near);
        case PredExpr::Kind::holding: {
            const auto held = g.holding();
            return held && *held == lookup(env, p.args[0]);
        }
        case PredExpr::Kind::hand_empty: return !g.hand_busy;
        case PredExpr::Kind::done: return has_record(g, "done:" + p.args[0]);
        case PredExpr::Kind::all:
            return std::all_of(p.sub.begin(), p.sub.end(), [&](const PredExpr& s) { return eval_predicate(s, g, env); });
        case PredExpr::Kind::any:
            return std::any_of(p.sub.begin(), p.sub.end(), [&](const PredExpr& s) { return eval_predicate(s, g, env); });
        case PredExpr::Kind::negate: return !eval_predicate(p.sub[0], g, env);
        case PredExpr::Kind::always: return true;
    }
    return false;
}

PlannerOutput evaluate_policy(const PlannerProgram& program, SemanticGraph& graph) {
    Memory mem = read_memory(graph.task_memory);
    std::vector<Expanded> steps;

    if (!mem.plan) {
        // One-time role binding and plan construction.
        Env env;
        std::vector<std::string> records;
        for (const auto& b : program.bindings) {
            const auto ids = eval_query(b.query, graph, env);
            if (ids.empty()) throw UnboundVariable("binding '" + b.var + "' matched no object");
            if (ids.size() > 1 && b.query.kind != QueryExpr::Kind::first)
                throw AmbiguousBinding("binding '" + b.var + "' matched " + std::to_string(ids.size()) +
                                       " objects; wrap the query in (first ...)");
            env[b.var] = ids.front();
            records.push_back("bind:" + b.var + "=" + std::to_string(ids.front()));
        }
        expand(program.plan, graph, env, steps);
        std::string plan = "plan:";
        for (std::size_t i = 0; i < steps.size(); ++i) {
            plan += (i ? "," : "") + steps[i].id;
            for (const auto& [var, id] : steps[i].loop)
                records.push_back("bind:" + var + "@" + steps[i].id + "=" + std::to_string(id));
        }
        records.push_back(plan);
        graph.task_memory.insert(graph.task_memory.end(), records.begin(), records.end());
        mem.globals = env;
    } else {
        for (const auto& id : *mem.plan) {
            const Step* s = step_by_id(program, id);
            if (!s) throw UnboundVariable("task memory names unknown step '" + id + "'");
            steps.push_back({id, s, mem.step_env[id]});
        }
    }

    auto check_live = [&](const Env& env) {
        for (const auto& [var, id] : env)
            if (!graph.find(id)) throw StaleNode("binding '" + var + "' refers to vanished node " + std::to_string(id));
    };
    check_live(mem.globals);

    for (const auto& s : steps) {
        if (has_record(graph, "done:" + s.id)) continue;
        check_live(s.loop);
        Env env = mem.globals;
        for (const auto& [var, id] : s.loop) env[var] = id;
        if (eval_predicate(s.step->goal, graph, env)) {
            graph.task_memory.push_back("done:" + s.id);
            continue;
        }
        for (const auto& a : s.step->actions) {
            if (!eval_predicate(a.guard, graph, env)) continue;
            std::map<std::string, std::string> names;
            for (const auto& [var, id] : env) names[var] = graph.node(id).name;
            PlannerOutput out;
            out.subtask_instruction = format_subtask_cue(a.instruction_template, names);
            std::set<NodeId> rel;
            for (const auto& v : a.relevant_vars) rel.insert(lookup(env, v));
            out.relevant_objects.assign(rel.begin(), rel.end());
            out.emitted_step = s.id;
            return out;
        }
    }
    PlannerOutput out;
    out.done = true;
    return out;
}

}  // namespace codegraph
