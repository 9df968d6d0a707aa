#include "pbda/roi.hpp"

#include <cmath>
#include <string>

#include "pbda/errors.hpp"

namespace pbda {

std::vector<std::pair<int, int>> border_pixels(const BBox& b) {
    if (b.w < 2 || b.h < 2)
        throw ValidationError("degenerate bbox: perimeter needs w, h >= 2");

    std::vector<std::pair<int, int>> ring;
    ring.reserve(2 * (b.w + b.h) - 4);
    const int right = b.x + b.w - 1;
    const int bottom = b.y + b.h - 1;
    for (int x = b.x; x <= right; ++x) ring.emplace_back(x, b.y);
    for (int y = b.y + 1; y <= bottom; ++y) ring.emplace_back(right, y);
    for (int x = right - 1; x >= b.x; --x) ring.emplace_back(x, bottom);
    for (int y = bottom - 1; y >= b.y + 1; --y) ring.emplace_back(b.x, y);
    return ring;
}

double roi_score(const ImageBuffer& source, const BBox& src_bbox,
                 const ImageBuffer& target, const BBox& cand) {
    if (cand.w != src_bbox.w || cand.h != src_bbox.h)
        throw ValidationError("candidate bbox dimensions do not match the source bbox");
    if (!src_bbox.fits_in(source.width(), source.height()))
        throw ValidationError("source bbox out of bounds");
    if (!cand.fits_in(target.width(), target.height()))
        throw ValidationError("candidate bbox out of bounds");

    const auto src_ring = border_pixels(src_bbox);
    const auto cand_ring = border_pixels(cand);

    double total = 0.0;
    for (std::size_t j = 0; j < src_ring.size(); ++j) {
        const auto [sx, sy] = src_ring[j];
        const auto [tx, ty] = cand_ring[j];
        double sq = 0.0;
        for (int c = 0; c < 3; ++c) {
            const double d = double(source.at(sx, sy, c)) - double(target.at(tx, ty, c));
            sq += d * d;
        }
        total += std::sqrt(sq);
    }
    return total / static_cast<double>(src_ring.size());
}

namespace {

bool window_clear(const PixelMask& mask, const BBox& b) {
    for (int y = b.y; y < b.y + b.h; ++y)
        for (int x = b.x; x < b.x + b.w; ++x)
            if (!mask.at(x, y)) return false;
    return true;
}

// Stride offsets over [lo, hi] shifted by phase, always including hi so the
// far edge stays reachable.
std::vector<int> grid_offsets(int lo, int hi, int stride, int phase) {
    std::vector<int> out;
    for (int v = lo + phase; v < hi; v += stride) out.push_back(v);
    out.push_back(hi);
    return out;
}

}  // namespace

RoiResult select_roi(const ImageBuffer& source, const BBox& src_bbox,
                     const ImageBuffer& target, const RoiSearchConfig& cfg) {
    if (cfg.stride < 1) throw ValidationError("stride must be at least 1");
    if (cfg.margin < 0) throw ValidationError("margin must be non-negative");
    if (cfg.phase_x < 0 || cfg.phase_x >= cfg.stride || cfg.phase_y < 0 ||
        cfg.phase_y >= cfg.stride)
        throw ValidationError("grid phase must lie in [0, stride)");
    if (!src_bbox.fits_in(source.width(), source.height()))
        throw ValidationError("source bbox out of bounds");
    if (cfg.valid_mask != nullptr &&
        (cfg.valid_mask->width != target.width() || cfg.valid_mask->height != target.height()))
        throw ValidationError("valid mask dimensions do not match the target image");

    const int min_x = cfg.margin;
    const int min_y = cfg.margin;
    const int max_x = target.width() - cfg.margin - src_bbox.w;
    const int max_y = target.height() - cfg.margin - src_bbox.h;
    if (max_x < min_x || max_y < min_y)
        throw ValidationError("no feasible candidate window: target " +
                              std::to_string(target.width()) + "x" +
                              std::to_string(target.height()) + " cannot host a " +
                              std::to_string(src_bbox.w) + "x" + std::to_string(src_bbox.h) +
                              " window with margin " + std::to_string(cfg.margin));

    const auto xs = grid_offsets(min_x, max_x, cfg.stride, cfg.phase_x);
    const auto ys = grid_offsets(min_y, max_y, cfg.stride, cfg.phase_y);

    RoiResult best;
    bool found = false;
    for (const int y : ys) {
        for (const int x : xs) {
            const BBox cand{x, y, src_bbox.w, src_bbox.h};
            if (cfg.valid_mask != nullptr && !window_clear(*cfg.valid_mask, cand)) continue;
            const double score = roi_score(source, src_bbox, target, cand);
            ++best.candidates_evaluated;
            if (!found || score < best.score) {  // raster order keeps the first minimum
                found = true;
                best.bbox = cand;
                best.score = score;
            }
        }
    }
    if (!found)
        throw ValidationError("no feasible candidate window: the valid mask rejects "
                              "every grid position");
    return best;
}

}  // namespace pbda
