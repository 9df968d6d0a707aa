#pragma once

#include <algorithm>
#include <cassert>
#include <vector>

namespace pbda {

// Axis-aligned pixel rectangle: (x, y) is the top-left corner, w/h the extent.
struct BBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool operator==(const BBox&) const = default;

    // Box lies inside a width x height image.
    bool fits_in(int width, int height) const {
        return w >= 1 && h >= 1 && x >= 0 && y >= 0 && x + w <= width && y + h <= height;
    }

    // Box plus its one-pixel exterior ring lies inside the image. Blending
    // needs the ring for the Dirichlet boundary values.
    bool has_exterior_ring(int width, int height) const {
        return w >= 1 && h >= 1 && x >= 1 && y >= 1 && x + w <= width - 1 && y + h <= height - 1;
    }
};

// RGB raster, float intensities in [0,1], row-major and channel-interleaved.
class ImageBuffer {
public:
    static constexpr int kChannels = 3;

    ImageBuffer() = default;
    ImageBuffer(int width, int height, float fill = 0.0f)
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(width) * height * kChannels, fill) {
        assert(width >= 0 && height >= 0);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return data_.empty(); }

    float at(int x, int y, int c) const { return data_[index(x, y, c)]; }
    float& at(int x, int y, int c) { return data_[index(x, y, c)]; }

    const std::vector<float>& data() const { return data_; }
    std::vector<float>& data() { return data_; }

    void clamp01() {
        for (float& v : data_) v = std::clamp(v, 0.0f, 1.0f);
    }

    bool operator==(const ImageBuffer&) const = default;

private:
    std::size_t index(int x, int y, int c) const {
        assert(x >= 0 && x < width_ && y >= 0 && y < height_ && c >= 0 && c < kChannels);
        return (static_cast<std::size_t>(y) * width_ + x) * kChannels + c;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<float> data_;
};

}  // namespace pbda
