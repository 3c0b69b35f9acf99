#include <doctest.h>

#include "codegraph/bitmap.hpp"
#include "codegraph/rng.hpp"

using namespace codegraph;

namespace {

Bitmap rect(int w, int h, int x0, int y0, int x1, int y1) {
    Bitmap b(w, h);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) b.set(x, y);
    return b;
}

}  // namespace

TEST_CASE("count, centroid and bounds of a rectangle") {
    const Bitmap b = rect(20, 10, 2, 3, 6, 5);
    CHECK(b.count() == 8);
    CHECK(b.centroid() == PixelPoint{3.5, 3.5});
    CHECK(b.bounds().x0 == 2);
    CHECK(b.bounds().y1 == 5);
    CHECK(Bitmap(4, 4).centroid() == PixelPoint{0.0, 0.0});
}

TEST_CASE("RLE round trip on random masks") {
    Rng r(9);
    for (int t = 0; t < 50; ++t) {
        Bitmap b(37, 23);
        for (int i = 0; i < 200; ++i) b.set(static_cast<int>(r.below(37)), static_cast<int>(r.below(23)));
        const Rle e = b.encode();
        std::size_t total = 0;
        for (auto c : e.counts) total += c;
        CHECK(total == 37u * 23u);
        CHECK(Bitmap::decode(e) == b);
    }
}

TEST_CASE("RLE of an empty and a full mask") {
    Bitmap empty(4, 3);
    CHECK(empty.encode().counts == std::vector<std::uint32_t>{12});
    const Bitmap full = rect(4, 3, 0, 0, 4, 3);
    CHECK(full.encode().counts == std::vector<std::uint32_t>{0, 12});
}

TEST_CASE("decode rejects inconsistent counts") {
    Rle bad{4, 3, {5, 5}};
    CHECK_THROWS_AS(Bitmap::decode(bad), std::invalid_argument);
}

TEST_CASE("iou and intersection") {
    const Bitmap a = rect(10, 10, 0, 0, 4, 4);
    const Bitmap b = rect(10, 10, 2, 0, 6, 4);
    CHECK(intersection_count(a, b) == 8);
    CHECK(iou(a, b) == doctest::Approx(8.0 / 24.0));
    CHECK(iou(a, a) == 1.0);
    CHECK(iou(Bitmap(10, 10), Bitmap(10, 10)) == 0.0);
}

TEST_CASE("shift clips at the border") {
    const Bitmap a = rect(10, 10, 0, 0, 3, 3);
    const Bitmap s = a.shifted(8, 0);
    CHECK(s.count() == 6);
    CHECK(s.get(9, 0));
    CHECK_FALSE(s.get(0, 0));
}

TEST_CASE("dilation by a disk") {
    Bitmap p(11, 11);
    p.set(5, 5);
    const Bitmap d = p.dilated(2);
    // Lattice points with dx^2 + dy^2 <= 4.
    CHECK(d.count() == 13);
    CHECK(d.get(7, 5));
    CHECK_FALSE(d.get(7, 7));
    CHECK(p.dilated(0) == p);
}

TEST_CASE("filled closes holes but not notches") {
    auto outline = [](bool notched) {
        Bitmap b(12, 12);
        for (int y = 2; y < 9; ++y)
            for (int x = 2; x < 9; ++x)
                if ((x == 2 || x == 8 || y == 2 || y == 8) && !(notched && y == 8 && x == 5)) b.set(x, y);
        return b;
    };
    CHECK(outline(false).filled() == rect(12, 12, 2, 2, 9, 9));
    CHECK(outline(true).filled() == outline(true));
}

TEST_CASE("label map masking keeps only retained labels") {
    LabelMap m(4, 1);
    m.set(0, 0, 3);
    m.set(1, 0, 4);
    m.set(2, 0, 3);
    CHECK(m.mask_of(3).count() == 2);
    Bitmap keep(4, 1);
    keep.set(1, 0);
    keep.set(2, 0);
    const LabelMap k = m.masked(keep);
    CHECK(k.get(0, 0) == 0);
    CHECK(k.get(1, 0) == 4);
    CHECK(k.get(2, 0) == 3);
}
