#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "codegraph/bitmap.hpp"
#include "codegraph/rng.hpp"

namespace codegraph {

using ObjectId = std::uint32_t;
using Attributes = std::map<std::string, std::string>;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Vec2&) const = default;
};

enum class TaskKind { swap_cups, pnp_twice, place_and_stack, custom };

std::string to_string(TaskKind kind);
/// Throws UnknownTask.
TaskKind parse_task_kind(const std::string& name);

/// A task plus its variant. For swap_cups, first_color names the cup that
/// must be moved first ("black" or "blue").
struct TaskId {
    TaskKind kind = TaskKind::swap_cups;
    std::string first_color = "black";
    bool operator==(const TaskId&) const = default;
};

/// Physical template for an object class.
struct ClassInfo {
    std::string name;
    bool round = true;
    double half_x = 0.0;  // radius for round objects
    double half_y = 0.0;
    double height = 0.0;
    double floor = 0.0;  // elevation of contents above the container base
    bool container = false;
    bool opaque = false;  // contents of an opaque container are never rendered
    bool pickable = true;

    double bounding_radius() const;
    std::vector<Vec2> footprint() const;
};

/// Throws UnknownObject for unregistered classes.
const ClassInfo& class_info(const std::string& class_name);

inline constexpr const char* kRobotArmClass = "robot_arm";
const std::vector<std::string>& distractor_classes();
const std::vector<std::string>& distractor_colors();

struct SimObject {
    ObjectId id = 0;
    std::string class_name;
    Attributes attributes;
    Vec2 position;
    int z_layer = 0;
    double elevation = 0.0;
    std::vector<Vec2> footprint;  // relative to position, counter-clockwise
    std::optional<ObjectId> container_of;
    std::optional<ObjectId> support_of;
    std::uint64_t appearance_seed = 0;
    bool distractor = false;

    bool operator==(const SimObject&) const = default;
};

struct GripperState {
    std::optional<ObjectId> held;
    /// Table position the gripper last moved over (approach or place_at).
    std::optional<Vec2> at;
    bool operator==(const GripperState&) const = default;
};

struct TableBounds {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 0.75;
    bool operator==(const TableBounds&) const = default;
};

struct CameraSpec {
    std::string view_id;
    int width = 0;
    int height = 0;
    /// u = a[0] x + a[1] y + a[2],  v = a[3] x + a[4] y + a[5]
    std::array<double, 6> affine{};
    /// Upward image shift per meter of elevation (oblique viewing).
    double elevation_px_per_m = 0.0;

    PixelPoint project(Vec2 p, double elevation) const;
    Vec2 unproject(PixelPoint px, double elevation) const;
    /// Throws std::invalid_argument when the projection is degenerate or the image too small.
    void validate() const;
    bool operator==(const CameraSpec&) const = default;
};

/// Default camera pair covering the whole table: an over-shoulder view and a
/// wrist view rotated by 180 degrees at a different resolution.
std::vector<CameraSpec> default_cameras(const TableBounds& table);

struct CustomObject {
    std::string class_name;
    Vec2 position;
    Attributes attributes;
};

struct SceneConfig {
    TaskId task;
    int distractors = 0;
    TableBounds table;
    std::vector<CameraSpec> cameras;
    double near_threshold_m = 0.15;
    double overlap_tolerance = 0.0;
    std::vector<CustomObject> custom_objects;  // task == custom only
};

struct WorldState {
    std::vector<SimObject> objects;  // sorted by id
    GripperState gripper;
    TableBounds table;
    int step_count = 0;
    Rng rng;
    double near_threshold_m = 0.15;
    double overlap_tolerance = 0.0;

    const SimObject& object(ObjectId id) const;
    SimObject& object(ObjectId id);
    const SimObject* find(ObjectId id) const;
    std::optional<ObjectId> find_class(const std::string& class_name, const Attributes& attrs = {}) const;
    ObjectId arm_id() const;

    /// Objects whose container/support chain passes through `id`.
    std::vector<ObjectId> descendants(ObjectId id) const;
    bool is_hidden(ObjectId id) const;  // inside an opaque container
    bool is_carried(ObjectId id) const;  // held, or a descendant of the held object
    std::optional<ObjectId> contents_of(ObjectId container) const;
    std::optional<ObjectId> supported_on(ObjectId support) const;

    bool operator==(const WorldState& o) const {
        return objects == o.objects && gripper == o.gripper && table == o.table && step_count == o.step_count &&
               rng.state() == o.rng.state();
    }
};

/// Layout geometry derived from the table.
struct Workspace {
    TableBounds layout;  // region where table-resting objects may be placed
    Vec2 arm_home;
    Vec2 held_slot;
};
Workspace workspace_of(const TableBounds& table);

inline constexpr int kLayoutAttempts = 1000;
inline constexpr double kLayoutClearance = 0.02;
/// Task-object pairs are kept out of (near - band, near + band) so that
/// image-space proximity never sits on the decision boundary.
inline constexpr double kNearBand = 0.04;

/// Throws LayoutInfeasible, UnknownTask.
WorldState init_world(const SceneConfig& config, std::uint64_t seed);

/// Samples a free table position for an object of the given class, or nullopt.
std::optional<Vec2> sample_free_position(const WorldState& world, const std::string& class_name, Rng& rng,
                                         std::optional<ObjectId> ignore = std::nullopt);

struct Primitive {
    enum class Kind { approach, pick, place_in, place_on, place_at, no_op };
    Kind kind = Kind::no_op;
    ObjectId target = 0;  // pick/approach target, or container/support for place_*
    Vec2 at;              // place_at only
    int duration_steps = 1;

    static Primitive approach(ObjectId t) { return {Kind::approach, t, {}, 1}; }
    static Primitive pick(ObjectId t) { return {Kind::pick, t, {}, 1}; }
    static Primitive place_in(ObjectId c) { return {Kind::place_in, c, {}, 1}; }
    static Primitive place_on(ObjectId s) { return {Kind::place_on, s, {}, 1}; }
    static Primitive place_at(Vec2 p) { return {Kind::place_at, 0, p, 1}; }
    static Primitive no_op() { return {}; }
    bool operator==(const Primitive&) const = default;
};

std::string to_string(Primitive::Kind kind);

enum class PrimitiveResult { accepted, rejected };

/// Throws UnknownObject. Rejected requests leave the world untouched.
std::pair<WorldState, PrimitiveResult> apply_primitive(const WorldState& world, const Primitive& p);

struct ViewImage {
    std::string view_id;
    LabelMap labels;
};

/// What the segmentation and attribute stand-ins know about a visible object.
struct ObjectAnnotation {
    std::string class_name;
    Attributes attributes;
    std::uint64_t appearance_seed = 0;
};

struct Proprioception {
    std::optional<ObjectId> held;
    /// Gripper position projected into each view at table height, once it has moved.
    std::map<std::string, PixelPoint> gripper_px;
};

struct RawObservation {
    std::vector<ViewImage> views;
    /// Pixel area each drawn object would cover with nothing in front of it, per view.
    std::map<std::string, std::map<ObjectId, std::size_t>> unoccluded_area;
    std::map<ObjectId, ObjectAnnotation> annotations;
    Proprioception proprio;
    int step = 0;

    const ViewImage& view(const std::string& view_id) const;
};

RawObservation render_views(const WorldState& world, const std::vector<CameraSpec>& cameras);

enum class Relation { in, on, near, holding };
std::string to_string(Relation r);
/// Throws std::invalid_argument.
Relation parse_relation(const std::string& s);

using RelationTriple = std::tuple<ObjectId, ObjectId, Relation>;

/// Exact relations from parent links and centre distances. near is emitted
/// once per unordered pair as (smaller id, larger id) and never for pairs
/// already related by in/on, nor for the arm or carried objects.
std::set<RelationTriple> ground_truth_relations(const WorldState& world);

struct PrimitiveEvent {
    int step = 0;
    Primitive primitive;
    PrimitiveResult result = PrimitiveResult::rejected;
    std::optional<ObjectId> moved;  // object picked or placed
};

struct EpisodeHistory {
    WorldState initial;
    std::vector<PrimitiveEvent> events;
};

inline constexpr const char* kMilestonePnpOnce = "PnP Once";
inline constexpr const char* kMilestoneDropCube = "Drop Cube";
inline constexpr const char* kMilestoneStageCup = "Stage Cup";

struct OracleVerdict {
    std::set<std::string> milestones;
    bool success = false;
};

/// Throws UnknownTask for custom scenes.
OracleVerdict task_oracle(const WorldState& world, const TaskId& task, const EpisodeHistory& history);

}  // namespace codegraph
