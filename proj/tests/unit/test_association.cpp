#include <doctest.h>

#include <cmath>

#include "codegraph/assoc_bench.hpp"
#include "codegraph/errors.hpp"
#include "codegraph/graph.hpp"
#include "oracles.hpp"

using namespace codegraph;

namespace {

Detection det(double x, double y, const Feature& f, const std::string& cls = "cup") {
    Detection d;
    d.centroid = {x, y};
    d.feature = f;
    d.class_name = cls;
    return d;
}

Feature axis(std::size_t i) {
    Feature f{};
    f[i] = 1.0;
    return f;
}

double cosine(const Feature& a, const Feature& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return 1.0 - dot / std::sqrt(na * nb);
}

}  // namespace

TEST_CASE("distance signature of a point against two anchors") {
    // |m - a1| = sqrt(20), |m - a2| = 4.
    const auto sig = distance_signature({0, 0}, {PixelPoint{4, 2}, PixelPoint{4, 0}});
    REQUIRE(sig.size() == 2);
    CHECK(*sig[0] == doctest::Approx(1.0));
    CHECK(*sig[1] == doctest::Approx(4.0 / std::sqrt(20.0)));
    CHECK(*sig[1] == doctest::Approx(0.8944).epsilon(1e-4));
}

TEST_CASE("single anchor gives a signature of one") {
    const auto sig = distance_signature({3, 7}, {PixelPoint{10, 1}});
    CHECK(*sig[0] == 1.0);
}

TEST_CASE("point on its only anchor gives zero") {
    const auto sig = distance_signature({5, 5}, {PixelPoint{5, 5}});
    CHECK(*sig[0] == 0.0);
}

TEST_CASE("missing anchors stay missing and all-missing throws") {
    const auto sig = distance_signature({0, 0}, {std::nullopt, PixelPoint{3, 4}});
    CHECK_FALSE(sig[0].has_value());
    CHECK(*sig[1] == 1.0);
    CHECK_THROWS_AS(distance_signature({0, 0}, {std::nullopt, std::nullopt}), NoAnchors);
    CHECK_THROWS_AS(distance_signature({0, 0}, {}), NoAnchors);
}

TEST_CASE("signatures are invariant to uniform scaling") {
    Rng rng(17);
    for (int t = 0; t < 2000; ++t) {
        const double s = std::exp(rng.uniform() * 12.0 - 6.0);
        const PixelPoint m{rng.uniform() * 100, rng.uniform() * 100};
        std::vector<std::optional<PixelPoint>> a, b;
        for (int k = 0; k < 4; ++k) {
            const PixelPoint p{rng.uniform() * 100, rng.uniform() * 100};
            a.push_back(p);
            b.push_back(PixelPoint{p.x * s, p.y * s});
        }
        const auto sa = distance_signature(m, a);
        const auto sb = distance_signature({m.x * s, m.y * s}, b);
        for (std::size_t k = 0; k < sa.size(); ++k) CHECK(*sa[k] == doctest::Approx(*sb[k]).epsilon(1e-9));
    }
}

TEST_CASE("signature distance scales up with fewer shared anchors") {
    const std::vector<std::optional<double>> a{1.0, 0.5, std::nullopt, 0.2};
    const std::vector<std::optional<double>> b{0.8, 0.5, 0.3, std::nullopt};
    // shared: anchors 0 and 1, raw L2 0.2, scale sqrt(4/2)
    CHECK(signature_distance(a, b) == doctest::Approx(0.2 * std::sqrt(2.0)));
    const std::vector<std::optional<double>> c{std::nullopt, std::nullopt, 0.1, std::nullopt};
    CHECK(std::isinf(signature_distance(a, c)));
    CHECK(signature_distance(a, a) == 0.0);
    CHECK_THROWS_AS(signature_distance(a, {1.0}), std::invalid_argument);
}

TEST_CASE("semantic association keeps mutual nearest pairs under tau") {
    std::vector<ViewDetections> v(2);
    v[0].detections = {det(0, 0, axis(0)), det(0, 0, axis(1)), det(0, 0, axis(2))};
    v[1].detections = {det(0, 0, axis(1)), det(0, 0, axis(0)), det(0, 0, axis(5))};
    const auto a = associate_semantic(v, 0.15);
    REQUIRE(a.matches.size() == 2);
    CHECK(a.matches[0].a.index == 0);
    CHECK(a.matches[0].b.index == 1);
    CHECK(a.matches[1].a.index == 1);
    CHECK(a.matches[1].b.index == 0);
    CHECK(a.anchors.size() == 2);
    CHECK_THROWS_AS(associate_semantic({v[0]}, 0.15), std::invalid_argument);
}

TEST_CASE("geometric association recovers a pair with identical features") {
    // Two anchors matched by appearance; two objects whose features disagree
    // across views so that only the layout can pair them.
    std::vector<ViewDetections> v(2);
    v[0].detections = {det(10, 10, axis(0)), det(90, 10, axis(1)), det(20, 60, axis(7)), det(80, 60, axis(8))};
    // Second view: rotated by 180 degrees and scaled by 1.5.
    auto rot = [](double x, double y) { return std::pair{150 - 1.5 * x, 120 - 1.5 * y}; };
    auto d = [&](double x, double y, const Feature& f) {
        auto [u, w] = rot(x, y);
        return det(u, w, f);
    };
    v[1].detections = {d(80, 60, axis(9)), d(90, 10, axis(1)), d(20, 60, axis(10)), d(10, 10, axis(0))};
    const auto pairs = associate_two_views(v, AssocThresholds{});
    CHECK(pairs == std::vector<DetPair>{{0, 3}, {1, 1}, {2, 2}, {3, 0}});
}

TEST_CASE("geometric association refuses ambiguous layouts") {
    std::vector<ViewDetections> v(2);
    // Two objects mirror-symmetric about the single anchor.
    v[0].detections = {det(50, 50, axis(0)), det(30, 50, axis(7)), det(70, 50, axis(8))};
    v[1].detections = {det(50, 50, axis(0)), det(30, 50, axis(9)), det(70, 50, axis(10))};
    const auto pairs = associate_two_views(v, AssocThresholds{});
    CHECK(pairs == std::vector<DetPair>{{0, 0}});
}

TEST_CASE("geometric association needs anchors") {
    std::vector<ViewDetections> v(2);
    v[0].detections = {det(0, 0, axis(0))};
    v[1].detections = {det(0, 0, axis(1))};
    CHECK_THROWS_AS(associate_geometric(v, {{0}, {0}}, {}, AssocThresholds{}), NoAnchors);
    CHECK(associate_two_views(v, AssocThresholds{}).empty());
}

TEST_CASE("geometric association never pairs across classes") {
    std::vector<ViewDetections> v(2);
    v[0].detections = {det(10, 10, axis(0)), det(90, 90, axis(1)), det(40, 60, axis(7), "cup")};
    v[1].detections = {det(10, 10, axis(0)), det(90, 90, axis(1)), det(40, 60, axis(8), "plate")};
    CHECK(associate_two_views(v, AssocThresholds{}) == std::vector<DetPair>{{0, 0}, {1, 1}});
}

TEST_CASE("min-cost matching agrees with permutation search") {
    Rng rng(23);
    for (int t = 0; t < 200; ++t) {
        std::vector<ViewDetections> v(2);
        const std::size_t n0 = 1 + rng.below(6), n1 = 1 + rng.below(6);
        auto feat = [&] {
            Feature f{};
            for (double& x : f) x = rng.normal();
            return f;
        };
        for (std::size_t i = 0; i < n0; ++i) v[0].detections.push_back(det(0, 0, feat()));
        for (std::size_t i = 0; i < n1; ++i) v[1].detections.push_back(det(0, 0, feat()));
        std::vector<std::vector<double>> cost(n0, std::vector<double>(n1));
        for (std::size_t i = 0; i < n0; ++i)
            for (std::size_t j = 0; j < n1; ++j) cost[i][j] = cosine(v[0].detections[i].feature, v[1].detections[j].feature);
        CHECK(min_cost_matching(v) == oracle::brute_force_assignment(cost));
    }
}

TEST_CASE("association on rendered scenes matches object identity") {
    const auto r = assoc_bench(100, 0.0, 5);
    CHECK(r.scenes == 100);
    CHECK(r.agree_with_identity == 100);
}

TEST_CASE("threshold validation") {
    AssocThresholds t;
    CHECK_NOTHROW(t.validate());
    t.tau_vis = -1;
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}
