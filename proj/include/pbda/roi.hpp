#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pbda/image.hpp"

namespace pbda {

// Optional per-pixel feasibility raster; candidate windows must lie fully in
// the true region.
struct PixelMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    bool at(int x, int y) const {
        return data[static_cast<std::size_t>(y) * width + x] != 0;
    }
};

struct RoiSearchConfig {
    int stride = 8;
    int margin = 1;  // exterior ring the blend needs around the window
    // Grid phase in [0, stride): shifts the candidate grid so repeated
    // searches over the same pair can land on different windows.
    int phase_x = 0;
    int phase_y = 0;
    const PixelMask* valid_mask = nullptr;
};

struct RoiResult {
    BBox bbox;
    double score = 0.0;
    std::size_t candidates_evaluated = 0;
};

// Perimeter ring of a box in clockwise order starting at (x, y):
// top row left to right, right column down, bottom row right to left, left
// column back up. Length is 2w + 2h - 4; requires w, h >= 2.
std::vector<std::pair<int, int>> border_pixels(const BBox& b);

// Mean over the ring of per-pixel RGB Euclidean distances between the source
// box border and the candidate box border, matched positionally under the
// shared perimeter ordering.
double roi_score(const ImageBuffer& source, const BBox& src_bbox,
                 const ImageBuffer& target, const BBox& cand);

// Slide a src_bbox-sized window over the target at stride offsets (plus the
// maximal offset so the far edge stays reachable) and return the
// lowest-scoring placement; ties go to raster order. Deterministic.
RoiResult select_roi(const ImageBuffer& source, const BBox& src_bbox,
                     const ImageBuffer& target, const RoiSearchConfig& cfg = {});

}  // namespace pbda
