#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "codegraph/graph.hpp"
#include "codegraph/planner.hpp"
#include "codegraph/rng.hpp"
#include "codegraph/scene.hpp"

namespace codegraph {

/// What a VLM-style subtask chooser is shown each call.
enum class VlmInput {
    rgb,    // the current frame: only objects visible now, and relations among them
    graph,  // the semantic graph, including relations kept for occluded objects
};

/// Oracle subtask chooser standing in for a prompted VLM. It knows the task's
/// stages and which scene facts each stage implies, matches them against what
/// it is shown, and answers with the subtask of a best-matching hypothesis,
/// breaking ties uniformly. It keeps no memory of earlier calls, except that
/// the graph variant fixes object roles from the first graph it sees.
class MockVlm {
public:
    /// Throws UnknownTask for custom scenes.
    MockVlm(TaskId task, VlmInput input, double error_p = 0.0);

    /// Throws PlannerError when the scene has no objects to fill the task roles.
    PlannerOutput choose(const SemanticGraph& graph, Rng& rng);

    /// Number of hypotheses tied at the minimum on the last call.
    std::size_t last_tie_count() const { return last_ties_; }

private:
    TaskId task_;
    VlmInput input_;
    double error_p_;
    std::optional<std::map<std::string, NodeId>> anchored_;
    std::size_t last_ties_ = 0;
};

}  // namespace codegraph
