#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "codegraph/errors.hpp"
#include "codegraph/graph.hpp"

namespace codegraph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t root(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void join(std::size_t a, std::size_t b) {
        a = root(a);
        b = root(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

// Index of the row minimum; ties go to the lower index. Returns n if empty.
std::size_t argmin(const std::vector<double>& row) {
    std::size_t best = row.size();
    for (std::size_t j = 0; j < row.size(); ++j)
        if (best == row.size() || row[j] < row[best]) best = j;
    return best;
}

// Smallest value other than at `skip`.
double second_min(const std::vector<double>& row, std::size_t skip) {
    double s = kInf;
    for (std::size_t j = 0; j < row.size(); ++j)
        if (j != skip) s = std::min(s, row[j]);
    return s;
}

std::vector<double> column(const std::vector<std::vector<double>>& m, std::size_t j) {
    std::vector<double> c;
    c.reserve(m.size());
    for (const auto& row : m) c.push_back(row[j]);
    return c;
}

double pixel_distance(PixelPoint a, PixelPoint b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

SemanticAssociation associate_semantic(const std::vector<ViewDetections>& views, double tau_vis) {
    if (views.size() < 2) throw std::invalid_argument("semantic association needs at least two views");
    SemanticAssociation out;
    for (std::size_t va = 0; va < views.size(); ++va) {
        for (std::size_t vb = va + 1; vb < views.size(); ++vb) {
            const auto& A = views[va].detections;
            const auto& B = views[vb].detections;
            if (A.empty() || B.empty()) continue;
            std::vector<std::vector<double>> d(A.size(), std::vector<double>(B.size()));
            for (std::size_t i = 0; i < A.size(); ++i)
                for (std::size_t j = 0; j < B.size(); ++j) d[i][j] = cosine_distance(A[i].feature, B[j].feature);
            for (std::size_t i = 0; i < A.size(); ++i) {
                const std::size_t j = argmin(d[i]);
                if (argmin(column(d, j)) != i || !(d[i][j] < tau_vis)) continue;
                out.matches.push_back({{va, i}, {vb, j}, d[i][j]});
            }
        }
    }

    std::vector<DetRef> refs;
    for (std::size_t v = 0; v < views.size(); ++v)
        for (std::size_t i = 0; i < views[v].detections.size(); ++i) refs.push_back({v, i});
    auto pos = [&](DetRef r) {
        return static_cast<std::size_t>(std::lower_bound(refs.begin(), refs.end(), r) - refs.begin());
    };
    UnionFind uf(refs.size());
    for (const auto& m : out.matches) uf.join(pos(m.a), pos(m.b));

    std::map<std::size_t, Anchor> groups;
    for (const auto& m : out.matches) {
        for (DetRef r : {m.a, m.b}) {
            Anchor& g = groups[uf.root(pos(r))];
            if (g.detections.count(r.view)) continue;  // keep the first detection per view
            g.detections[r.view] = r.index;
            g.centroids[r.view] = views[r.view].detections[r.index].centroid;
        }
    }
    for (auto& [root, anchor] : groups) out.anchors.push_back(std::move(anchor));
    return out;
}

std::vector<std::optional<double>> distance_signature(PixelPoint m, const std::vector<std::optional<PixelPoint>>& anchors) {
    std::vector<std::optional<double>> sig(anchors.size());
    double max_d = -1.0;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        if (!anchors[i]) continue;
        sig[i] = pixel_distance(m, *anchors[i]);
        max_d = std::max(max_d, *sig[i]);
    }
    if (max_d < 0.0) throw NoAnchors("no anchor present in this view");
    for (auto& s : sig)
        if (s) *s = max_d > 0.0 ? *s / max_d : 0.0;
    return sig;
}

double signature_distance(const std::vector<std::optional<double>>& a, const std::vector<std::optional<double>>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("signature length mismatch");
    double sum = 0.0;
    std::size_t shared = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i] || !b[i]) continue;
        const double d = *a[i] - *b[i];
        sum += d * d;
        ++shared;
    }
    if (shared == 0) return kInf;
    return std::sqrt(sum) * std::sqrt(static_cast<double>(a.size()) / static_cast<double>(shared));
}

std::vector<CrossViewMatch> associate_geometric(const std::vector<ViewDetections>& views,
                                                const std::vector<std::vector<std::size_t>>& unmatched,
                                                const std::vector<Anchor>& anchors, const AssocThresholds& thresholds) {
    if (unmatched.size() != views.size()) throw std::invalid_argument("unmatched list per view expected");

    auto anchor_points = [&](std::size_t view) {
        std::vector<std::optional<PixelPoint>> pts(anchors.size());
        for (std::size_t i = 0; i < anchors.size(); ++i) {
            auto it = anchors[i].centroids.find(view);
            if (it != anchors[i].centroids.end()) pts[i] = it->second;
        }
        return pts;
    };

    std::vector<CrossViewMatch> out;
    for (std::size_t va = 0; va < views.size(); ++va) {
        for (std::size_t vb = va + 1; vb < views.size(); ++vb) {
            const auto& UA = unmatched[va];
            const auto& UB = unmatched[vb];
            if (UA.empty() || UB.empty()) continue;
            const auto pa = anchor_points(va);
            const auto pb = anchor_points(vb);
            std::vector<std::vector<std::optional<double>>> sa, sb;
            for (std::size_t i : UA) sa.push_back(distance_signature(views[va].detections[i].centroid, pa));
            for (std::size_t j : UB) sb.push_back(distance_signature(views[vb].detections[j].centroid, pb));

            std::vector<std::vector<double>> d(UA.size(), std::vector<double>(UB.size(), kInf));
            for (std::size_t i = 0; i < UA.size(); ++i) {
                for (std::size_t j = 0; j < UB.size(); ++j) {
                    if (views[va].detections[UA[i]].class_name != views[vb].detections[UB[j]].class_name) continue;
                    d[i][j] = signature_distance(sa[i], sb[j]);
                }
            }
            for (std::size_t i = 0; i < UA.size(); ++i) {
                const std::size_t j = argmin(d[i]);
                const auto col = column(d, j);
                if (argmin(col) != i || !(d[i][j] < thresholds.tau_geo)) continue;
                if (second_min(d[i], j) - d[i][j] < thresholds.margin_geo) continue;
                if (second_min(col, i) - d[i][j] < thresholds.margin_geo) continue;
                out.push_back({{va, UA[i]}, {vb, UB[j]}, d[i][j]});
            }
        }
    }
    return out;
}

}  // namespace codegraph
