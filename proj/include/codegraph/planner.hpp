#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "codegraph/errors.hpp"
#include "codegraph/graph.hpp"

namespace codegraph {

struct SourcePos {
    int line = 1;
    int col = 1;
    bool operator==(const SourcePos&) const = default;
};

/// Base of all static errors in a plan file; carries a 1-based position.
class PlanSyntaxError : public Error {
public:
    PlanSyntaxError(const std::string& message, SourcePos pos, std::vector<std::string> expected = {});
    SourcePos pos;
    std::vector<std::string> expected;
    std::string detail;
};
class ParseError : public PlanSyntaxError { public: using PlanSyntaxError::PlanSyntaxError; };
class ArityError : public PlanSyntaxError { public: using PlanSyntaxError::PlanSyntaxError; };
class UnknownForm : public PlanSyntaxError { public: using PlanSyntaxError::PlanSyntaxError; };

class PlannerError : public Error { public: using Error::Error; };
class UnboundVariable : public PlannerError { public: using PlannerError::PlannerError; };
class AmbiguousBinding : public PlannerError { public: using PlannerError::PlannerError; };
class StaleNode : public PlannerError { public: using PlannerError::PlannerError; };

struct QueryExpr {
    enum class Kind { objects, first, container_of, empty_containers, other };
    Kind kind = Kind::objects;
    std::optional<std::string> class_name;  // objects
    Attributes attributes;                  // objects
    std::optional<std::string> in_var;      // objects
    std::optional<std::string> on_var;      // objects
    std::string var;                        // container-of, other
    std::string container_class;            // empty-containers
    std::vector<QueryExpr> sub;             // first, other
    SourcePos pos;
};

struct PredExpr {
    enum class Kind { in, on, near, holding, hand_empty, done, all, any, negate, always };
    Kind kind = Kind::always;
    std::vector<std::string> args;  // variables, or the step id for done
    std::vector<PredExpr> sub;
    SourcePos pos;
};

struct Action {
    PredExpr guard;
    std::string instruction_template;
    std::vector<std::string> relevant_vars;
    SourcePos say_pos;
    SourcePos focus_pos;
};

struct Step {
    std::string step_id;
    PredExpr goal;
    std::vector<Action> actions;
    SourcePos pos;
};

struct PlanItem {
    enum class Kind { step, branch, for_each };
    Kind kind = Kind::step;
    Step step;                        // step
    PredExpr condition;               // branch
    std::vector<PlanItem> then_items; // branch
    std::vector<PlanItem> else_items; // branch
    std::string var;                  // for-each
    QueryExpr query;                  // for-each
    std::vector<Step> body;           // for-each
};

struct Binding {
    std::string var;
    QueryExpr query;
    SourcePos pos;
};

struct PlannerProgram {
    std::string name;
    std::vector<Binding> bindings;
    std::vector<PlanItem> plan;

    /// Every step in source order, with the loop variable for for-each bodies.
    std::vector<std::pair<const Step*, std::string>> all_steps() const;
};

/// Throws ParseError, ArityError, UnknownForm.
PlannerProgram parse_program(const std::string& text);

/// Replaces ${name} placeholders before parsing. Throws ParseError on an
/// unknown or unterminated placeholder.
std::string instantiate_plan(const std::string& text, const std::map<std::string, std::string>& params);

struct PlannerOutput {
    std::string subtask_instruction;
    std::vector<NodeId> relevant_objects;  // sorted, unique
    bool done = false;
    std::optional<std::string> emitted_step;
    bool operator==(const PlannerOutput&) const = default;
};

using Env = std::map<std::string, NodeId>;

/// Results are sorted by node_id. Throws UnboundVariable.
std::vector<NodeId> eval_query(const QueryExpr& q, const SemanticGraph& graph, const Env& env);
bool eval_predicate(const PredExpr& p, const SemanticGraph& graph, const Env& env);

/// One planner call. Appends bind/plan/done records to graph.task_memory.
/// Throws UnboundVariable, AmbiguousBinding, StaleNode.
PlannerOutput evaluate_policy(const PlannerProgram& program, SemanticGraph& graph);

}  // namespace codegraph
