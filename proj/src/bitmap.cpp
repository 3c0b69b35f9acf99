#include "codegraph/bitmap.hpp"

#include <algorithm>
#include <deque>

namespace codegraph {

PixelBox PixelBox::intersect(const PixelBox& o) const noexcept {
    PixelBox r{std::max(x0, o.x0), std::max(y0, o.y0), std::min(x1, o.x1), std::min(y1, o.y1)};
    if (r.empty()) return {};
    return r;
}

PixelBox PixelBox::unite(const PixelBox& o) const noexcept {
    if (empty()) return o;
    if (o.empty()) return *this;
    return {std::min(x0, o.x0), std::min(y0, o.y0), std::max(x1, o.x1), std::max(y1, o.y1)};
}

Bitmap::Bitmap(int width, int height) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw std::invalid_argument("Bitmap: negative size");
    bits_.assign(std::size_t(width) * std::size_t(height), 0);
}

void Bitmap::set(int x, int y) noexcept {
    bits_[index(x, y)] = 1;
    box_ = box_.unite(PixelBox{x, y, x + 1, y + 1});
}

std::size_t Bitmap::count() const noexcept {
    std::size_t n = 0;
    for (int y = box_.y0; y < box_.y1; ++y) {
        const auto* row = &bits_[index(0, y)];
        for (int x = box_.x0; x < box_.x1; ++x) n += row[x];
    }
    return n;
}

PixelPoint Bitmap::centroid() const noexcept {
    std::int64_t sx = 0, sy = 0, n = 0;
    for (int y = box_.y0; y < box_.y1; ++y) {
        for (int x = box_.x0; x < box_.x1; ++x) {
            if (get(x, y)) {
                sx += x;
                sy += y;
                ++n;
            }
        }
    }
    if (n == 0) return {};
    return {static_cast<double>(sx) / static_cast<double>(n), static_cast<double>(sy) / static_cast<double>(n)};
}

namespace {
void require_same_size(const Bitmap& a, const Bitmap& b) {
    if (a.width() != b.width() || a.height() != b.height())
        throw std::invalid_argument("Bitmap: size mismatch");
}
}  // namespace

Bitmap Bitmap::united(const Bitmap& o) const {
    require_same_size(*this, o);
    Bitmap r = *this;
    const PixelBox& ob = o.bounds();
    for (int y = ob.y0; y < ob.y1; ++y)
        for (int x = ob.x0; x < ob.x1; ++x)
            if (o.get(x, y)) r.set(x, y);
    return r;
}

Bitmap Bitmap::intersected(const Bitmap& o) const {
    require_same_size(*this, o);
    Bitmap r(width_, height_);
    const PixelBox box = box_.intersect(o.bounds());
    for (int y = box.y0; y < box.y1; ++y)
        for (int x = box.x0; x < box.x1; ++x)
            if (get(x, y) && o.get(x, y)) r.set(x, y);
    return r;
}

Bitmap Bitmap::shifted(int dx, int dy) const {
    Bitmap r(width_, height_);
    for (int y = box_.y0; y < box_.y1; ++y) {
        for (int x = box_.x0; x < box_.x1; ++x) {
            if (!get(x, y)) continue;
            const int nx = x + dx, ny = y + dy;
            if (nx >= 0 && ny >= 0 && nx < width_ && ny < height_) r.set(nx, ny);
        }
    }
    return r;
}

Bitmap Bitmap::dilated(int radius) const {
    Bitmap r(width_, height_);
    std::vector<std::pair<int, int>> offsets;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) offsets.emplace_back(dx, dy);
    for (int y = box_.y0; y < box_.y1; ++y) {
        for (int x = box_.x0; x < box_.x1; ++x) {
            if (!get(x, y)) continue;
            for (auto [dx, dy] : offsets) {
                const int nx = x + dx, ny = y + dy;
                if (nx >= 0 && ny >= 0 && nx < width_ && ny < height_) r.set(nx, ny);
            }
        }
    }
    return r;
}

Bitmap Bitmap::filled() const {
    if (box_.empty()) return *this;
    // Flood the complement inside the box grown by one pixel; whatever the
    // flood cannot reach is enclosed.
    const int x0 = std::max(0, box_.x0 - 1), y0 = std::max(0, box_.y0 - 1);
    const int x1 = std::min(width_, box_.x1 + 1), y1 = std::min(height_, box_.y1 + 1);
    const int w = x1 - x0, h = y1 - y0;
    std::vector<std::uint8_t> outside(std::size_t(w) * h, 0);
    std::deque<std::pair<int, int>> queue;
    auto seed = [&](int x, int y) {
        const std::size_t i = std::size_t(y - y0) * w + (x - x0);
        if (!outside[i] && !get(x, y)) {
            outside[i] = 1;
            queue.emplace_back(x, y);
        }
    };
    for (int x = x0; x < x1; ++x) {
        seed(x, y0);
        seed(x, y1 - 1);
    }
    for (int y = y0; y < y1; ++y) {
        seed(x0, y);
        seed(x1 - 1, y);
    }
    while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop_front();
        if (x > x0) seed(x - 1, y);
        if (x + 1 < x1) seed(x + 1, y);
        if (y > y0) seed(x, y - 1);
        if (y + 1 < y1) seed(x, y + 1);
    }
    Bitmap r = *this;
    for (int y = box_.y0; y < box_.y1; ++y)
        for (int x = box_.x0; x < box_.x1; ++x)
            if (!outside[std::size_t(y - y0) * w + (x - x0)]) r.set(x, y);
    return r;
}

Rle Bitmap::encode() const {
    Rle rle{width_, height_, {}};
    std::uint8_t current = 0;
    std::uint32_t run = 0;
    for (std::uint8_t b : bits_) {
        if (b != current) {
            rle.counts.push_back(run);
            run = 0;
            current = b;
        }
        ++run;
    }
    rle.counts.push_back(run);
    return rle;
}

Bitmap Bitmap::decode(const Rle& rle) {
    Bitmap r(rle.width, rle.height);
    const std::size_t total = std::size_t(rle.width) * std::size_t(rle.height);
    std::size_t pos = 0;
    bool value = false;
    for (std::uint32_t run : rle.counts) {
        if (pos + run > total) throw std::invalid_argument("Rle: runs exceed image size");
        if (value) {
            for (std::size_t i = pos; i < pos + run; ++i)
                r.set(static_cast<int>(i % rle.width), static_cast<int>(i / rle.width));
        }
        pos += run;
        value = !value;
    }
    if (pos != total) throw std::invalid_argument("Rle: runs do not cover image");
    return r;
}

bool Bitmap::operator==(const Bitmap& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_ && bits_ == o.bits_;
}

std::size_t intersection_count(const Bitmap& a, const Bitmap& b) {
    require_same_size(a, b);
    const PixelBox box = a.bounds().intersect(b.bounds());
    std::size_t n = 0;
    for (int y = box.y0; y < box.y1; ++y)
        for (int x = box.x0; x < box.x1; ++x) n += (a.get(x, y) && b.get(x, y)) ? 1 : 0;
    return n;
}

double iou(const Bitmap& a, const Bitmap& b) {
    const std::size_t inter = intersection_count(a, b);
    const std::size_t uni = a.count() + b.count() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Bitmap LabelMap::mask_of(std::uint32_t label) const {
    Bitmap m(width_, height_);
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            if (get(x, y) == label) m.set(x, y);
    return m;
}

LabelMap LabelMap::masked(const Bitmap& keep) const {
    if (keep.width() != width_ || keep.height() != height_) throw std::invalid_argument("LabelMap: mask size mismatch");
    LabelMap r(width_, height_);
    const PixelBox& box = keep.bounds();
    for (int y = box.y0; y < box.y1; ++y)
        for (int x = box.x0; x < box.x1; ++x)
            if (keep.get(x, y)) r.set(x, y, get(x, y));
    return r;
}

}  // namespace codegraph
