#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace codegraph {

/// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct PixelBox {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    bool empty() const noexcept { return x0 >= x1 || y0 >= y1; }
    PixelBox intersect(const PixelBox& o) const noexcept;
    PixelBox unite(const PixelBox& o) const noexcept;
};

struct PixelPoint {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const PixelPoint&) const = default;
};

/// Uncompressed run-length encoding, row-major, first run counts zeros.
struct Rle {
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> counts;
    bool operator==(const Rle&) const = default;
};

/// Binary mask over an image grid.
///
/// Keeps a conservative bounding box of set pixels so that the pairwise
/// operations (IoU, containment, unions) only walk the region that matters.
class Bitmap {
public:
    Bitmap() = default;
    Bitmap(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool get(int x, int y) const noexcept { return bits_[index(x, y)] != 0; }
    bool at(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_ && get(x, y);
    }
    void set(int x, int y) noexcept;

    /// Bounding box of set pixels; may be loose after in-place edits.
    const PixelBox& bounds() const noexcept { return box_; }

    std::size_t count() const noexcept;
    bool empty() const noexcept { return count() == 0; }

    /// Center of mass using pixel indices; (0, 0) for an empty mask.
    PixelPoint centroid() const noexcept;

    Bitmap united(const Bitmap& o) const;
    Bitmap intersected(const Bitmap& o) const;
    Bitmap shifted(int dx, int dy) const;
    /// Dilation with a Euclidean disk of the given radius.
    Bitmap dilated(int radius) const;
    /// Fills regions not 4-connected to the image border through unset pixels.
    Bitmap filled() const;

    Rle encode() const;
    static Bitmap decode(const Rle& rle);

    bool operator==(const Bitmap& o) const noexcept;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
    PixelBox box_;
};

std::size_t intersection_count(const Bitmap& a, const Bitmap& b);
double iou(const Bitmap& a, const Bitmap& b);

/// Per-pixel object labels of one rendered view; 0 is the table background.
class LabelMap {
public:
    LabelMap() = default;
    LabelMap(int width, int height) : width_(width), height_(height), labels_(std::size_t(width) * height, 0) {}

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::uint32_t get(int x, int y) const noexcept { return labels_[std::size_t(y) * width_ + x]; }
    void set(int x, int y, std::uint32_t label) noexcept { labels_[std::size_t(y) * width_ + x] = label; }
    const std::vector<std::uint32_t>& data() const noexcept { return labels_; }

    Bitmap mask_of(std::uint32_t label) const;
    /// Keeps labels where the mask is set, background elsewhere.
    LabelMap masked(const Bitmap& keep) const;

    bool operator==(const LabelMap&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint32_t> labels_;
};

}  // namespace codegraph
