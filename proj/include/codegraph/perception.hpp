#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "codegraph/bitmap.hpp"
#include "codegraph/rng.hpp"
#include "codegraph/scene.hpp"

namespace codegraph {

inline constexpr std::size_t kFeatureDim = 16;
using Feature = std::array<double, kFeatureDim>;

/// Deterministic hash-to-sphere appearance embedding of an object instance.
Feature base_vector(std::uint64_t appearance_seed);
double cosine_distance(const Feature& a, const Feature& b);
Feature normalized(const Feature& f);

struct Detection {
    std::string view_id;
    Bitmap mask;
    PixelPoint centroid;
    std::string class_name;
    Attributes attributes;
    Feature feature{};
    std::size_t area_px = 0;
    /// Rendered label the mask was cut from. Only the tracker stand-in, the
    /// executor and test oracles read it; association never does.
    ObjectId label = 0;
    double visible_fraction = 1.0;
    bool is_arm = false;
};

struct ViewDetections {
    std::string view_id;
    std::vector<Detection> detections;
};

struct NoiseConfig {
    /// RMS norm of the Gaussian perturbation added to a feature before
    /// renormalisation (per-component sigma is feature_sigma / sqrt(16)).
    double feature_sigma = 0.0;
    double mask_dropout_occlusion = 0.0;
    double class_confusion_p = 0.0;
    double tracker_drift_px_per_step = 0.0;
    double tracker_loss_p = 0.0;

    /// Throws std::invalid_argument.
    void validate() const;
    bool operator==(const NoiseConfig&) const = default;
};

struct AttributeFilter {
    std::string class_name;
    std::string key;
    std::string value;
};

struct TaskSpec {
    std::string task_id;
    std::string instruction;
    std::set<std::string> relevant_classes;
    std::vector<AttributeFilter> relevant_attribute_filters;
    std::string robot_arm_class = kRobotArmClass;
};

/// Built-in task specs; custom scenes treat every non-distractor class as relevant.
TaskSpec task_spec_for(const TaskId& task, const std::vector<CustomObject>& custom_objects = {});

/// One detection per sufficiently visible object per view, in raster order
/// of each mask's first pixel.
std::vector<ViewDetections> segment(const RawObservation& obs, const NoiseConfig& noise, Rng& rng);

/// Keeps detections whose (possibly confused) class is task-relevant.
std::vector<ViewDetections> identify_relevant(const std::vector<ViewDetections>& detections, const TaskSpec& spec);

struct SemanticGraph;
using NodeId = std::uint32_t;

struct TrackedMask {
    Bitmap mask;
    int drift_dx = 0;
    int drift_dy = 0;
};

/// node -> view -> propagated mask. Missing entries are tracker losses.
using TrackedMasks = std::map<NodeId, std::map<std::string, TrackedMask>>;

/// Mask-propagation stand-in: re-cuts each node's mask from the new frame and
/// adds an integer drift whose per-step magnitude is bounded by the config.
TrackedMasks track(const SemanticGraph& prev, const RawObservation& obs, const NoiseConfig& noise, Rng& rng);

}  // namespace codegraph
