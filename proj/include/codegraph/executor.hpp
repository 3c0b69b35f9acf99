#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "codegraph/graph.hpp"
#include "codegraph/prompting.hpp"
#include "codegraph/scene.hpp"

namespace codegraph {

/// Probability that one target role binds to the wrong object, growing with
/// the number of non-relevant objects the executor can see.
struct GroundingErrorModel {
    double base_p = 0.0;
    double per_distractor_p = 0.0;
    double p_max = 0.0;

    double probability(std::size_t visible_distractors) const;
    /// Throws std::invalid_argument.
    void validate() const;
    bool operator==(const GroundingErrorModel&) const = default;
};

enum class Verb { pick_up, put_inside, stack_on, place_on };
std::string to_string(Verb v);

/// A subtask cue split into its verb and role names ("x", and "y" for two-object verbs).
struct ParsedCue {
    Verb verb = Verb::pick_up;
    std::map<std::string, std::string> roles;
};

/// Accepts "pick up the X", "put the X inside the Y", "stack the X on the Y"
/// and "place the X on the Y". Throws UnknownVerbPattern.
ParsedCue parse_cue(const std::string& cue);

struct GroundedTargets {
    Verb verb = Verb::pick_up;
    std::map<std::string, ObjectId> labels;  // role -> object the executor will act on
    std::map<std::string, NodeId> nodes;     // role -> graph node, when the label belongs to one
    std::size_t visible_distractors = 0;
    double mis_ground_p = 0.0;
    bool mis_grounded = false;
};

/// Resolves the cue's object names through the graph and applies the error
/// model. Throws UnknownVerbPattern, UnknownNode, TargetInvisible.
GroundedTargets ground_targets(const MaskedObservation& obs, const SemanticGraph& graph, Rng& rng,
                               const GroundingErrorModel& err);

enum class ChunkOutcome { completed, rejected, mis_grounded, grounding_failed };
std::string to_string(ChunkOutcome o);

struct ActionChunk {
    std::vector<Primitive> primitives;  // the primitives actually attempted
    std::vector<PrimitiveEvent> events;
    GroundedTargets targets;
    ChunkOutcome outcome = ChunkOutcome::completed;
};

inline constexpr int kDefaultHorizon = 10;

/// Expands the verb into primitives, truncated to `horizon`, and runs them
/// until one is rejected.
std::pair<WorldState, ActionChunk> execute_chunk(const WorldState& world, const GroundedTargets& targets,
                                                 int horizon, Rng& rng);

}  // namespace codegraph
