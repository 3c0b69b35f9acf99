#include "codegraph/perception.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "codegraph/graph.hpp"

namespace codegraph {

Feature normalized(const Feature& f) {
    double s = 0.0;
    for (double v : f) s += v * v;
    const double n = std::sqrt(s);
    Feature out{};
    if (n == 0.0) return out;
    for (std::size_t i = 0; i < kFeatureDim; ++i) out[i] = f[i] / n;
    return out;
}

Feature base_vector(std::uint64_t appearance_seed) {
    Rng rng(splitmix64_mix(appearance_seed));
    Feature f{};
    do {
        for (double& v : f) v = rng.uniform() * 2.0 - 1.0;
    } while (std::all_of(f.begin(), f.end(), [](double v) { return v == 0.0; }));
    return normalized(f);
}

double cosine_distance(const Feature& a, const Feature& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < kFeatureDim; ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 1.0;
    return 1.0 - dot / std::sqrt(na * nb);
}

void NoiseConfig::validate() const {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (feature_sigma < 0.0) throw std::invalid_argument("feature_sigma must be >= 0");
    if (!unit(mask_dropout_occlusion)) throw std::invalid_argument("mask_dropout_occlusion must be in [0,1]");
    if (!unit(class_confusion_p)) throw std::invalid_argument("class_confusion_p must be in [0,1]");
    if (tracker_drift_px_per_step < 0.0) throw std::invalid_argument("tracker_drift_px_per_step must be >= 0");
    if (!unit(tracker_loss_p)) throw std::invalid_argument("tracker_loss_p must be in [0,1]");
}

TaskSpec task_spec_for(const TaskId& task, const std::vector<CustomObject>& custom_objects) {
    TaskSpec s;
    s.task_id = to_string(task.kind);
    switch (task.kind) {
        case TaskKind::swap_cups:
            s.instruction = "swap the black cup and the blue cup, starting with the " + task.first_color + " cup";
            s.relevant_classes = {"plate", "cup", kRobotArmClass};
            break;
        case TaskKind::pnp_twice:
            s.instruction = "move the cube to the other plate, then bring it back";
            s.relevant_classes = {"plate", "cube", kRobotArmClass};
            break;
        case TaskKind::place_and_stack:
            s.instruction = "put the cube into the nearest cup, then stack the other cup on it";
            s.relevant_classes = {"cup", "cube", kRobotArmClass};
            break;
        case TaskKind::custom: {
            s.instruction = "custom scene";
            s.relevant_classes = {kRobotArmClass};
            const auto& dc = distractor_classes();
            for (const auto& o : custom_objects)
                if (std::find(dc.begin(), dc.end(), o.class_name) == dc.end()) s.relevant_classes.insert(o.class_name);
            break;
        }
    }
    return s;
}

std::vector<ViewDetections> segment(const RawObservation& obs, const NoiseConfig& noise, Rng& rng) {
    const double component_sigma = noise.feature_sigma / std::sqrt(static_cast<double>(kFeatureDim));
    std::vector<ViewDetections> out;
    for (const auto& view : obs.views) {
        const LabelMap& labels = view.labels;
        std::vector<ObjectId> order;
        std::map<ObjectId, Bitmap> masks;
        for (int y = 0; y < labels.height(); ++y) {
            for (int x = 0; x < labels.width(); ++x) {
                const ObjectId l = labels.get(x, y);
                if (l == 0) continue;
                auto it = masks.find(l);
                if (it == masks.end()) {
                    order.push_back(l);
                    it = masks.emplace(l, Bitmap(labels.width(), labels.height())).first;
                }
                it->second.set(x, y);
            }
        }
        ViewDetections vd{view.view_id, {}};
        const auto& areas = obs.unoccluded_area.at(view.view_id);
        for (ObjectId l : order) {
            const ObjectAnnotation& ann = obs.annotations.at(l);
            Bitmap& mask = masks.at(l);
            const std::size_t area = mask.count();
            const double fraction = static_cast<double>(area) / static_cast<double>(areas.at(l));
            if (fraction < noise.mask_dropout_occlusion) continue;
            Detection d;
            d.view_id = view.view_id;
            d.centroid = mask.centroid();
            d.mask = std::move(mask);
            d.area_px = area;
            d.label = l;
            d.visible_fraction = fraction;
            d.class_name = ann.class_name;
            d.attributes = ann.attributes;
            if (rng.bernoulli(noise.class_confusion_p)) {
                const auto& dc = distractor_classes();
                d.class_name = dc[rng.below(dc.size())];
            }
            Feature f = base_vector(ann.appearance_seed);
            if (component_sigma > 0.0)
                for (double& v : f) v += rng.normal() * component_sigma;
            d.feature = normalized(f);
            vd.detections.push_back(std::move(d));
        }
        out.push_back(std::move(vd));
    }
    return out;
}

std::vector<ViewDetections> identify_relevant(const std::vector<ViewDetections>& detections, const TaskSpec& spec) {
    std::vector<ViewDetections> out;
    for (const auto& view : detections) {
        ViewDetections kept{view.view_id, {}};
        for (const auto& d : view.detections) {
            if (!spec.relevant_classes.count(d.class_name)) continue;
            bool ok = true;
            for (const auto& f : spec.relevant_attribute_filters) {
                if (f.class_name != d.class_name) continue;
                auto it = d.attributes.find(f.key);
                if (it == d.attributes.end() || it->second != f.value) ok = false;
            }
            if (!ok) continue;
            Detection copy = d;
            copy.is_arm = d.class_name == spec.robot_arm_class;
            kept.detections.push_back(std::move(copy));
        }
        out.push_back(std::move(kept));
    }
    return out;
}

namespace {

std::pair<int, int> drift_step(Rng& rng, double max_px) {
    const int r = static_cast<int>(std::floor(max_px));
    if (r <= 0) return {0, 0};
    for (;;) {
        const int dx = static_cast<int>(rng.below(2 * r + 1)) - r;
        const int dy = static_cast<int>(rng.below(2 * r + 1)) - r;
        if (dx * dx + dy * dy <= r * r) return {dx, dy};
    }
}

}  // namespace

TrackedMasks track(const SemanticGraph& prev, const RawObservation& obs, const NoiseConfig& noise, Rng& rng) {
    TrackedMasks out;
    for (const auto& node : prev.nodes) {
        for (const auto& [view_id, g] : node.groundings) {
            const ViewImage* view = nullptr;
            for (const auto& v : obs.views)
                if (v.view_id == view_id) view = &v;
            if (!view) continue;
            auto [sx, sy] = drift_step(rng, noise.tracker_drift_px_per_step);
            const bool lost = rng.bernoulli(noise.tracker_loss_p);
            Bitmap fresh = view->labels.mask_of(node.label);
            if (lost || fresh.empty()) continue;
            TrackedMask t;
            t.drift_dx = g.drift_dx + sx;
            t.drift_dy = g.drift_dy + sy;
            t.mask = (t.drift_dx == 0 && t.drift_dy == 0) ? std::move(fresh) : fresh.shifted(t.drift_dx, t.drift_dy);
            if (t.mask.empty()) continue;
            out[node.node_id][view_id] = std::move(t);
        }
    }
    return out;
}

}  // namespace codegraph
