#include "codegraph/scene.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "codegraph/errors.hpp"

namespace codegraph {

namespace {

// Unit 16-gon, spelled out so footprints do not depend on libm.
constexpr double kC1 = 0.92387953251128674;
constexpr double kS1 = 0.38268343236508978;
constexpr double kC2 = 0.70710678118654757;
constexpr std::array<Vec2, 16> kUnitCircle{{{1, 0},
                                            {kC1, kS1},
                                            {kC2, kC2},
                                            {kS1, kC1},
                                            {0, 1},
                                            {-kS1, kC1},
                                            {-kC2, kC2},
                                            {-kC1, kS1},
                                            {-1, 0},
                                            {-kC1, -kS1},
                                            {-kC2, -kC2},
                                            {-kS1, -kC1},
                                            {0, -1},
                                            {kS1, -kC1},
                                            {kC2, -kC2},
                                            {kC1, -kS1}}};

const std::map<std::string, ClassInfo>& class_table() {
    static const std::map<std::string, ClassInfo> table = [] {
        std::map<std::string, ClassInfo> t;
        auto add = [&](ClassInfo c) { t.emplace(c.name, std::move(c)); };
        add({"plate", true, 0.08, 0.08, 0.01, 0.01, true, false, true});
        add({"cup", true, 0.045, 0.045, 0.09, 0.01, true, true, true});
        add({"cube", false, 0.02, 0.02, 0.04, 0.0, false, false, true});
        add({kRobotArmClass, false, 0.05, 0.03, 0.10, 0.0, false, false, false});
        add({"sponge", false, 0.04, 0.025, 0.03, 0.0, false, false, true});
        add({"marker", false, 0.06, 0.01, 0.02, 0.0, false, false, true});
        add({"bottle", true, 0.035, 0.035, 0.20, 0.0, false, false, true});
        add({"tape", true, 0.04, 0.04, 0.05, 0.0, false, false, true});
        add({"block", false, 0.025, 0.025, 0.05, 0.0, false, false, true});
        return t;
    }();
    return table;
}

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool is_task_object(const SimObject& o) { return !o.distractor && o.class_name != kRobotArmClass; }

std::optional<ObjectId> parent_of(const SimObject& o) {
    if (o.container_of) return o.container_of;
    return o.support_of;
}

// Recomputes derived pose fields: contained/supported objects sit at their
// parent's centre, held objects at the gripper slot.
void refresh_poses(WorldState& w) {
    const Workspace ws = workspace_of(w.table);
    std::map<ObjectId, bool> done;
    std::function<void(SimObject&)> resolve = [&](SimObject& o) {
        if (done[o.id]) return;
        done[o.id] = true;
        if (o.class_name == kRobotArmClass) {
            o.position = ws.arm_home;
            o.z_layer = 100;
            o.elevation = 0.0;
            return;
        }
        if (w.gripper.held == o.id) {
            o.position = ws.held_slot;
            o.z_layer = 20;
            o.elevation = 0.0;
            return;
        }
        const auto parent = parent_of(o);
        if (!parent) {
            o.z_layer = 0;
            o.elevation = 0.0;
            return;
        }
        SimObject& p = w.object(*parent);
        resolve(p);
        const ClassInfo& pc = class_info(p.class_name);
        o.position = p.position;
        o.z_layer = p.z_layer + 1;
        o.elevation = p.elevation + (o.container_of ? pc.floor : pc.height);
    };
    for (auto& o : w.objects) resolve(o);
}

bool inside_rect(const TableBounds& r, Vec2 p, double radius) {
    return p.x - radius >= r.x0 && p.x + radius <= r.x1 && p.y - radius >= r.y0 && p.y + radius <= r.y1;
}

bool is_table_resting(const WorldState& w, const SimObject& o) {
    return o.class_name != kRobotArmClass && !o.container_of && !o.support_of && w.gripper.held != o.id;
}

// Free-space test used for layout and for put-down positions.
bool position_ok(const WorldState& w, const std::string& class_name, bool task_object, Vec2 p,
                 std::optional<ObjectId> ignore) {
    const double r = class_info(class_name).bounding_radius();
    if (!inside_rect(workspace_of(w.table).layout, p, r)) return false;
    for (const auto& o : w.objects) {
        if (ignore == o.id || !is_table_resting(w, o)) continue;
        const double d = distance(p, o.position);
        if (d < r + class_info(o.class_name).bounding_radius() + kLayoutClearance - w.overlap_tolerance) return false;
        if (task_object && is_task_object(o) && std::abs(d - w.near_threshold_m) < kNearBand) return false;
    }
    return true;
}

ObjectId next_id(const WorldState& w) { return w.objects.empty() ? 1 : w.objects.back().id + 1; }

SimObject make_object(WorldState& w, const std::string& class_name, Attributes attrs, bool distractor) {
    SimObject o;
    o.id = next_id(w);
    o.class_name = class_name;
    o.attributes = std::move(attrs);
    o.footprint = class_info(class_name).footprint();
    o.distractor = distractor;
    o.appearance_seed = w.rng.next_u64();
    return o;
}

ObjectId place_on_table(WorldState& w, const std::string& class_name, Attributes attrs, bool distractor,
                        const TableBounds& region) {
    const double r = class_info(class_name).bounding_radius();
    for (int attempt = 0; attempt < kLayoutAttempts; ++attempt) {
        const Vec2 p{w.rng.uniform(region.x0 + r, region.x1 - r), w.rng.uniform(region.y0 + r, region.y1 - r)};
        if (position_ok(w, class_name, !distractor, p, std::nullopt)) {
            SimObject o = make_object(w, class_name, std::move(attrs), distractor);
            o.position = p;
            w.objects.push_back(std::move(o));
            return w.objects.back().id;
        }
    }
    throw LayoutInfeasible("could not place " + class_name + " after " + std::to_string(kLayoutAttempts) +
                           " attempts");
}

ObjectId put_inside(WorldState& w, const std::string& class_name, Attributes attrs, ObjectId container) {
    SimObject o = make_object(w, class_name, std::move(attrs), false);
    o.container_of = container;
    w.objects.push_back(std::move(o));
    return w.objects.back().id;
}

void add_distractors(WorldState& w, int count) {
    const auto& classes = distractor_classes();
    const auto& colors = distractor_colors();
    const TableBounds layout = workspace_of(w.table).layout;
    for (int i = 0; i < count; ++i) {
        const std::string& cls = classes[w.rng.below(classes.size())];
        const std::string& color = colors[w.rng.below(colors.size())];
        place_on_table(w, cls, {{"color", color}}, true, layout);
    }
}

void build_swap_cups(WorldState& w) {
    const TableBounds layout = workspace_of(w.table).layout;
    std::vector<ObjectId> plates;
    for (int i = 0; i < 3; ++i) plates.push_back(place_on_table(w, "plate", {}, false, layout));
    const std::size_t buffer = w.rng.below(3);
    std::vector<ObjectId> occupied;
    for (std::size_t i = 0; i < 3; ++i)
        if (i != buffer) occupied.push_back(plates[i]);
    if (w.rng.below(2) == 1) std::swap(occupied[0], occupied[1]);
    put_inside(w, "cup", {{"color", "black"}}, occupied[0]);
    put_inside(w, "cup", {{"color", "blue"}}, occupied[1]);
}

void build_pnp_twice(WorldState& w) {
    const TableBounds layout = workspace_of(w.table).layout;
    std::vector<ObjectId> plates;
    for (int i = 0; i < 2; ++i) plates.push_back(place_on_table(w, "plate", {}, false, layout));
    put_inside(w, "cube", {}, plates[w.rng.below(2)]);
}

void build_place_and_stack(WorldState& w) {
    const TableBounds layout = workspace_of(w.table).layout;
    const double third = (layout.x1 - layout.x0) / 3.0;
    const ObjectId left =
        place_on_table(w, "cup", {{"color", "white"}}, false, {layout.x0, layout.y0, layout.x0 + third, layout.y1});
    const ObjectId right =
        place_on_table(w, "cup", {{"color", "white"}}, false, {layout.x1 - third, layout.y0, layout.x1, layout.y1});
    const ObjectId near_cup = w.rng.below(2) == 0 ? left : right;
    const Vec2 c = w.object(near_cup).position;
    for (int attempt = 0; attempt < kLayoutAttempts; ++attempt) {
        const double angle = w.rng.uniform(0.0, 6.283185307179586);
        const double radius = w.rng.uniform(0.095, 0.105);
        const Vec2 p{c.x + radius * std::cos(angle), c.y + radius * std::sin(angle)};
        if (!position_ok(w, "cube", false, p, std::nullopt)) continue;
        // Must be far from the other cup in the same sense as any task pair.
        const Vec2 other = w.object(near_cup == left ? right : left).position;
        const double d = distance(p, other);
        if (d < w.near_threshold_m + kNearBand) continue;
        SimObject o = make_object(w, "cube", {}, false);
        o.position = p;
        w.objects.push_back(std::move(o));
        return;
    }
    throw LayoutInfeasible("could not place cube near a cup");
}

void build_custom(WorldState& w, const std::vector<CustomObject>& objects) {
    const auto& dclasses = distractor_classes();
    for (const auto& spec : objects) {
        const bool distractor = std::find(dclasses.begin(), dclasses.end(), spec.class_name) != dclasses.end();
        if (!position_ok(w, spec.class_name, false, spec.position, std::nullopt))
            throw LayoutInfeasible("custom object " + spec.class_name + " does not fit");
        SimObject o = make_object(w, spec.class_name, spec.attributes, distractor);
        o.position = spec.position;
        w.objects.push_back(std::move(o));
    }
}

}  // namespace

std::string to_string(TaskKind kind) {
    switch (kind) {
        case TaskKind::swap_cups: return "swap_cups";
        case TaskKind::pnp_twice: return "pnp_twice";
        case TaskKind::place_and_stack: return "place_and_stack";
        case TaskKind::custom: return "custom";
    }
    return "custom";
}

TaskKind parse_task_kind(const std::string& name) {
    if (name == "swap_cups") return TaskKind::swap_cups;
    if (name == "pnp_twice") return TaskKind::pnp_twice;
    if (name == "place_and_stack") return TaskKind::place_and_stack;
    if (name == "custom") return TaskKind::custom;
    throw UnknownTask("unknown task: " + name);
}

double ClassInfo::bounding_radius() const { return round ? half_x : std::hypot(half_x, half_y); }

std::vector<Vec2> ClassInfo::footprint() const {
    if (round) {
        std::vector<Vec2> pts;
        pts.reserve(kUnitCircle.size());
        for (const auto& u : kUnitCircle) pts.push_back({u.x * half_x, u.y * half_x});
        return pts;
    }
    return {{-half_x, -half_y}, {half_x, -half_y}, {half_x, half_y}, {-half_x, half_y}};
}

const ClassInfo& class_info(const std::string& class_name) {
    const auto& t = class_table();
    auto it = t.find(class_name);
    if (it == t.end()) throw UnknownObject("unknown object class: " + class_name);
    return it->second;
}

const std::vector<std::string>& distractor_classes() {
    static const std::vector<std::string> v{"sponge", "marker", "bottle", "tape", "block"};
    return v;
}

const std::vector<std::string>& distractor_colors() {
    static const std::vector<std::string> v{"red", "green", "yellow", "orange", "purple", "pink", "gray"};
    return v;
}

PixelPoint CameraSpec::project(Vec2 p, double elevation) const {
    return {affine[0] * p.x + affine[1] * p.y + affine[2],
            affine[3] * p.x + affine[4] * p.y + affine[5] - elevation * elevation_px_per_m};
}

Vec2 CameraSpec::unproject(PixelPoint px, double elevation) const {
    const double det = affine[0] * affine[4] - affine[1] * affine[3];
    const double u = px.x - affine[2];
    const double v = px.y + elevation * elevation_px_per_m - affine[5];
    return {(affine[4] * u - affine[1] * v) / det, (-affine[3] * u + affine[0] * v) / det};
}

void CameraSpec::validate() const {
    if (width < 64 || height < 64) throw std::invalid_argument("camera " + view_id + ": image smaller than 64x64");
    if (std::abs(affine[0] * affine[4] - affine[1] * affine[3]) < 1e-12)
        throw std::invalid_argument("camera " + view_id + ": projection is not invertible");
}

std::vector<CameraSpec> default_cameras(const TableBounds& t) {
    CameraSpec overhead{"overhead", 160, 120, {160.0, 0.0, -160.0 * t.x0, 0.0, -160.0, 160.0 * t.y1}, 84.0};
    CameraSpec wrist{"wrist", 128, 96, {-128.0, 0.0, 128.0 * t.x1, 0.0, 128.0, -128.0 * t.y0}, 67.0};
    return {overhead, wrist};
}

const SimObject& WorldState::object(ObjectId id) const {
    const SimObject* o = find(id);
    if (!o) throw UnknownObject("unknown object id " + std::to_string(id));
    return *o;
}

SimObject& WorldState::object(ObjectId id) {
    return const_cast<SimObject&>(static_cast<const WorldState&>(*this).object(id));
}

const SimObject* WorldState::find(ObjectId id) const {
    auto it = std::lower_bound(objects.begin(), objects.end(), id,
                               [](const SimObject& o, ObjectId v) { return o.id < v; });
    return (it != objects.end() && it->id == id) ? &*it : nullptr;
}

std::optional<ObjectId> WorldState::find_class(const std::string& class_name, const Attributes& attrs) const {
    for (const auto& o : objects) {
        if (o.class_name != class_name) continue;
        bool match = true;
        for (const auto& [k, v] : attrs) {
            auto it = o.attributes.find(k);
            if (it == o.attributes.end() || it->second != v) match = false;
        }
        if (match) return o.id;
    }
    return std::nullopt;
}

ObjectId WorldState::arm_id() const {
    auto id = find_class(kRobotArmClass);
    if (!id) throw UnknownObject("world has no robot arm");
    return *id;
}

std::vector<ObjectId> WorldState::descendants(ObjectId id) const {
    std::vector<ObjectId> out;
    std::vector<ObjectId> frontier{id};
    while (!frontier.empty()) {
        const ObjectId cur = frontier.back();
        frontier.pop_back();
        for (const auto& o : objects) {
            if (parent_of(o) == cur) {
                out.push_back(o.id);
                frontier.push_back(o.id);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool WorldState::is_hidden(ObjectId id) const {
    const SimObject* cur = &object(id);
    while (auto p = parent_of(*cur)) {
        const SimObject& parent = object(*p);
        if (cur->container_of && class_info(parent.class_name).opaque) return true;
        cur = &parent;
    }
    return false;
}

bool WorldState::is_carried(ObjectId id) const {
    if (!gripper.held) return false;
    if (*gripper.held == id) return true;
    const SimObject* cur = &object(id);
    while (auto p = parent_of(*cur)) {
        if (*p == *gripper.held) return true;
        cur = &object(*p);
    }
    return false;
}

std::optional<ObjectId> WorldState::contents_of(ObjectId container) const {
    for (const auto& o : objects)
        if (o.container_of == container) return o.id;
    return std::nullopt;
}

std::optional<ObjectId> WorldState::supported_on(ObjectId support) const {
    for (const auto& o : objects)
        if (o.support_of == support) return o.id;
    return std::nullopt;
}

Workspace workspace_of(const TableBounds& t) {
    Workspace ws;
    ws.layout = {t.x0 + 0.02, t.y0 + 0.02, t.x1 - 0.02, t.y1 - 0.15};
    ws.arm_home = {(t.x0 + t.x1) / 2.0, t.y1 - 0.05};
    ws.held_slot = {ws.arm_home.x + 0.16, t.y1 - 0.06};
    return ws;
}

WorldState init_world(const SceneConfig& config, std::uint64_t seed) {
    if (config.distractors < 0) throw std::invalid_argument("distractor count must be >= 0");
    WorldState w;
    w.table = config.table;
    w.rng = Rng::substream(seed, "scene");
    w.near_threshold_m = config.near_threshold_m;
    w.overlap_tolerance = config.overlap_tolerance;

    SimObject arm = make_object(w, kRobotArmClass, {}, false);
    w.objects.push_back(std::move(arm));

    switch (config.task.kind) {
        case TaskKind::swap_cups: build_swap_cups(w); break;
        case TaskKind::pnp_twice: build_pnp_twice(w); break;
        case TaskKind::place_and_stack: build_place_and_stack(w); break;
        case TaskKind::custom: build_custom(w, config.custom_objects); break;
    }
    refresh_poses(w);
    add_distractors(w, config.distractors);
    refresh_poses(w);

    std::set<std::uint64_t> seeds;
    for (const auto& o : w.objects) {
        if (!seeds.insert(o.appearance_seed).second) throw LayoutInfeasible("appearance seed collision");
    }
    return w;
}

std::optional<Vec2> sample_free_position(const WorldState& world, const std::string& class_name, Rng& rng,
                                         std::optional<ObjectId> ignore) {
    const TableBounds layout = workspace_of(world.table).layout;
    const double r = class_info(class_name).bounding_radius();
    const bool task_object =
        std::find(distractor_classes().begin(), distractor_classes().end(), class_name) == distractor_classes().end();
    for (int attempt = 0; attempt < kLayoutAttempts; ++attempt) {
        const Vec2 p{rng.uniform(layout.x0 + r, layout.x1 - r), rng.uniform(layout.y0 + r, layout.y1 - r)};
        if (position_ok(world, class_name, task_object, p, ignore)) return p;
    }
    return std::nullopt;
}

std::string to_string(Primitive::Kind kind) {
    switch (kind) {
        case Primitive::Kind::approach: return "approach";
        case Primitive::Kind::pick: return "pick";
        case Primitive::Kind::place_in: return "place_in";
        case Primitive::Kind::place_on: return "place_on";
        case Primitive::Kind::place_at: return "place_at";
        case Primitive::Kind::no_op: return "no_op";
    }
    return "no_op";
}

std::pair<WorldState, PrimitiveResult> apply_primitive(const WorldState& world, const Primitive& p) {
    using Kind = Primitive::Kind;
    if (p.kind != Kind::place_at && p.kind != Kind::no_op) world.object(p.target);  // throws UnknownObject

    const auto reject = [&] { return std::pair{world, PrimitiveResult::rejected}; };
    WorldState w = world;
    const auto held = w.gripper.held;

    switch (p.kind) {
        case Kind::no_op:
            break;
        case Kind::approach:
            w.gripper.at = w.object(p.target).position;
            break;
        case Kind::pick: {
            const SimObject& t = w.object(p.target);
            if (held || !class_info(t.class_name).pickable || w.is_hidden(t.id)) return reject();
            SimObject& tm = w.object(p.target);
            tm.container_of.reset();
            tm.support_of.reset();
            w.gripper.held = p.target;
            break;
        }
        case Kind::place_in: {
            if (!held) return reject();
            const SimObject& c = w.object(p.target);
            const ClassInfo& cc = class_info(c.class_name);
            if (!cc.container || w.is_carried(c.id) || w.is_hidden(c.id) || w.contents_of(c.id)) return reject();
            if (class_info(w.object(*held).class_name).bounding_radius() >= cc.bounding_radius()) return reject();
            w.object(*held).container_of = c.id;
            w.gripper.held.reset();
            break;
        }
        case Kind::place_on: {
            if (!held) return reject();
            const SimObject& s = w.object(p.target);
            if (s.class_name == kRobotArmClass || w.is_carried(s.id) || w.is_hidden(s.id) || w.supported_on(s.id))
                return reject();
            w.object(*held).support_of = s.id;
            w.gripper.held.reset();
            break;
        }
        case Kind::place_at: {
            if (!held) return reject();
            const SimObject& h = w.object(*held);
            if (!position_ok(w, h.class_name, false, p.at, h.id)) return reject();
            w.object(*held).position = p.at;
            w.gripper.held.reset();
            w.gripper.at = p.at;
            break;
        }
    }
    ++w.step_count;
    refresh_poses(w);
    return {std::move(w), PrimitiveResult::accepted};
}

const ViewImage& RawObservation::view(const std::string& view_id) const {
    for (const auto& v : views)
        if (v.view_id == view_id) return v;
    throw std::out_of_range("no view named " + view_id);
}

namespace {

// Rasterises a convex polygon given in pixel coordinates, sampling pixel centres.
template <typename Fn>
void raster_convex(const std::vector<PixelPoint>& poly, int width, int height, Fn&& on_pixel) {
    double minx = poly[0].x, maxx = poly[0].x, miny = poly[0].y, maxy = poly[0].y;
    double area2 = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % poly.size()];
        minx = std::min(minx, a.x);
        maxx = std::max(maxx, a.x);
        miny = std::min(miny, a.y);
        maxy = std::max(maxy, a.y);
        area2 += a.x * b.y - b.x * a.y;
    }
    const double orient = area2 >= 0 ? 1.0 : -1.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(minx - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::floor(miny - 0.5)));
    const int x1 = std::min(width, static_cast<int>(std::ceil(maxx + 0.5)));
    const int y1 = std::min(height, static_cast<int>(std::ceil(maxy + 0.5)));
    for (int y = y0; y < y1; ++y) {
        const double cy = y + 0.5;
        for (int x = x0; x < x1; ++x) {
            const double cx = x + 0.5;
            bool inside = true;
            for (std::size_t i = 0; i < poly.size() && inside; ++i) {
                const auto& a = poly[i];
                const auto& b = poly[(i + 1) % poly.size()];
                const double cross = (b.x - a.x) * (cy - a.y) - (b.y - a.y) * (cx - a.x);
                if (cross * orient < 0.0) inside = false;
            }
            if (inside) on_pixel(x, y);
        }
    }
}

}  // namespace

RawObservation render_views(const WorldState& world, const std::vector<CameraSpec>& cameras) {
    RawObservation obs;
    obs.step = world.step_count;
    obs.proprio.held = world.gripper.held;
    if (world.gripper.at)
        for (const auto& cam : cameras) obs.proprio.gripper_px[cam.view_id] = cam.project(*world.gripper.at, 0.0);

    std::vector<const SimObject*> drawables;
    for (const auto& o : world.objects)
        if (!world.is_hidden(o.id)) drawables.push_back(&o);
    std::stable_sort(drawables.begin(), drawables.end(), [](const SimObject* a, const SimObject* b) {
        return std::tie(a->z_layer, a->id) < std::tie(b->z_layer, b->id);
    });

    for (const auto& cam : cameras) {
        ViewImage view{cam.view_id, LabelMap(cam.width, cam.height)};
        auto& areas = obs.unoccluded_area[cam.view_id];
        for (const SimObject* o : drawables) {
            std::vector<PixelPoint> poly;
            poly.reserve(o->footprint.size());
            for (const auto& v : o->footprint)
                poly.push_back(cam.project({o->position.x + v.x, o->position.y + v.y}, o->elevation));
            std::size_t area = 0;
            raster_convex(poly, cam.width, cam.height, [&](int x, int y) {
                view.labels.set(x, y, o->id);
                ++area;
            });
            if (area > 0) areas[o->id] = area;
        }
        obs.views.push_back(std::move(view));
    }

    std::set<ObjectId> visible;
    for (const auto& v : obs.views)
        for (std::uint32_t l : v.labels.data())
            if (l != 0) visible.insert(l);
    for (ObjectId id : visible) {
        const SimObject& o = world.object(id);
        obs.annotations[id] = {o.class_name, o.attributes, o.appearance_seed};
    }
    return obs;
}

std::string to_string(Relation r) {
    switch (r) {
        case Relation::in: return "in";
        case Relation::on: return "on";
        case Relation::near: return "near";
        case Relation::holding: return "holding";
    }
    return "near";
}

Relation parse_relation(const std::string& s) {
    if (s == "in") return Relation::in;
    if (s == "on") return Relation::on;
    if (s == "near") return Relation::near;
    if (s == "holding") return Relation::holding;
    throw std::invalid_argument("unknown relation: " + s);
}

std::set<RelationTriple> ground_truth_relations(const WorldState& world) {
    std::set<RelationTriple> out;
    for (const auto& o : world.objects) {
        if (o.container_of) out.emplace(o.id, *o.container_of, Relation::in);
        if (o.support_of) out.emplace(o.id, *o.support_of, Relation::on);
    }
    if (world.gripper.held) {
        if (auto arm = world.find_class(kRobotArmClass)) out.emplace(*arm, *world.gripper.held, Relation::holding);
    }
    auto excluded = [&](const SimObject& o) { return o.class_name == kRobotArmClass || world.is_carried(o.id); };
    for (std::size_t i = 0; i < world.objects.size(); ++i) {
        const SimObject& a = world.objects[i];
        if (excluded(a)) continue;
        for (std::size_t j = i + 1; j < world.objects.size(); ++j) {
            const SimObject& b = world.objects[j];
            if (excluded(b)) continue;
            if (parent_of(a) == b.id || parent_of(b) == a.id) continue;
            if (distance(a.position, b.position) < world.near_threshold_m) out.emplace(a.id, b.id, Relation::near);
        }
    }
    return out;
}

namespace {

// Replays accepted events on the initial world so predicates can inspect
// every intermediate state.
template <typename Fn>
WorldState replay_history(const EpisodeHistory& h, Fn&& after_event) {
    WorldState w = h.initial;
    for (const auto& e : h.events) {
        if (e.result != PrimitiveResult::accepted) continue;
        w = apply_primitive(w, e.primitive).first;
        after_event(e, w);
    }
    return w;
}

std::optional<ObjectId> cup_carried(const WorldState& w) {
    if (!w.gripper.held) return std::nullopt;
    if (w.object(*w.gripper.held).class_name == "cup") return w.gripper.held;
    for (ObjectId d : w.descendants(*w.gripper.held))
        if (w.object(d).class_name == "cup") return d;
    return std::nullopt;
}

}  // namespace

OracleVerdict task_oracle(const WorldState& world, const TaskId& task, const EpisodeHistory& history) {
    const WorldState& init = history.initial;
    OracleVerdict verdict;
    switch (task.kind) {
        case TaskKind::pnp_twice: {
            const ObjectId cube = *init.find_class("cube");
            const ObjectId home = *init.object(cube).container_of;
            ObjectId away = 0;
            for (const auto& o : init.objects)
                if (o.class_name == "plate" && o.id != home) away = o.id;
            std::vector<ObjectId> visits;
            replay_history(history, [&](const PrimitiveEvent& e, const WorldState& w) {
                if (e.primitive.kind != Primitive::Kind::place_in) return;
                const auto c = w.object(cube).container_of;
                if (!c || w.object(*c).class_name != "plate") return;
                if (visits.empty() || visits.back() != *c) visits.push_back(*c);
            });
            if (std::find(visits.begin(), visits.end(), away) != visits.end())
                verdict.milestones.insert(kMilestonePnpOnce);
            const bool returned = world.object(cube).container_of == home && !world.is_carried(cube);
            verdict.success = returned && visits == std::vector<ObjectId>{away, home};
            break;
        }
        case TaskKind::place_and_stack: {
            const ObjectId cube = *init.find_class("cube");
            std::vector<ObjectId> cups;
            for (const auto& o : init.objects)
                if (o.class_name == "cup") cups.push_back(o.id);
            const Vec2 cp = init.object(cube).position;
            const ObjectId near_cup =
                distance(cp, init.object(cups[0]).position) <= distance(cp, init.object(cups[1]).position) ? cups[0]
                                                                                                            : cups[1];
            const ObjectId other_cup = near_cup == cups[0] ? cups[1] : cups[0];
            bool dropped = false;
            replay_history(history, [&](const PrimitiveEvent&, const WorldState& w) {
                if (w.object(cube).container_of == near_cup) dropped = true;
            });
            if (dropped) verdict.milestones.insert(kMilestoneDropCube);
            verdict.success =
                world.object(cube).container_of == near_cup && world.object(other_cup).support_of == near_cup;
            break;
        }
        case TaskKind::swap_cups: {
            const ObjectId first = *init.find_class("cup", {{"color", task.first_color}});
            ObjectId second = 0;
            for (const auto& o : init.objects)
                if (o.class_name == "cup" && o.id != first) second = o.id;
            const ObjectId first_src = *init.object(first).container_of;
            const ObjectId second_src = *init.object(second).container_of;
            ObjectId buffer = 0;
            for (const auto& o : init.objects)
                if (o.class_name == "plate" && !init.contents_of(o.id)) buffer = o.id;
            std::optional<ObjectId> first_moved;
            bool staged = false;
            replay_history(history, [&](const PrimitiveEvent& e, const WorldState& w) {
                if (e.primitive.kind == Primitive::Kind::pick && !first_moved) first_moved = cup_carried(w);
                if (w.object(first).container_of == buffer) staged = true;
            });
            if (staged) verdict.milestones.insert(kMilestoneStageCup);
            verdict.success = first_moved == first && world.object(first).container_of == second_src &&
                              world.object(second).container_of == first_src;
            break;
        }
        case TaskKind::custom:
            throw UnknownTask("custom scenes have no task oracle");
    }
    return verdict;
}

}  // namespace codegraph
