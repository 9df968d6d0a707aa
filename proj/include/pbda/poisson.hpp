#pragma once

#include <array>
#include <utility>
#include <vector>

#include "pbda/image.hpp"

namespace pbda {

// Discrete Dirichlet problem on a rectangular region of the target image.
// Unknowns are the region pixels in row-major order; the matrix is the
// 5-point Laplacian (4 on the diagonal, -1 towards every 4-neighbour inside
// the region), which is symmetric positive definite. Boundary and guidance
// contributions are folded into the per-channel right-hand sides.
struct PoissonSystem {
    int width = 0;
    int height = 0;
    int origin_x = 0;  // region's top-left pixel in the target image
    int origin_y = 0;
    std::array<std::vector<double>, 3> rhs;

    int unknowns() const { return width * height; }

    // Unknown index <-> target pixel coordinate.
    std::pair<int, int> pixel_of(int i) const {
        return {origin_x + i % width, origin_y + i / width};
    }
    int index_of(int px, int py) const {
        const int ix = px - origin_x, iy = py - origin_y;
        if (ix < 0 || ix >= width || iy < 0 || iy >= height) return -1;
        return iy * width + ix;
    }

    // In-region neighbours of unknown i (the -1 entries of matrix row i).
    // Fills `out` in up/left/right/down order, returns how many.
    int neighbors(int i, int out[4]) const;
};

// Build the seamless-cloning system: for every region pixel p,
//   4 f_p - sum_{q in N_p ∩ Ω} f_q = sum_{q in N_p ∩ ∂Ω} f*_q + sum_{q in N_p} (g_p - g_q)
// with N_p the 4-neighbourhood, Ω the dst_bbox pixels, ∂Ω their one-pixel
// exterior ring in the target, f* the target and g the source translated from
// src_bbox. Both boxes need equal dimensions and an in-bounds exterior ring.
PoissonSystem assemble_system(const ImageBuffer& target, const ImageBuffer& source,
                              const BBox& src_bbox, const BBox& dst_bbox);

struct SolveResult {
    std::array<std::vector<double>, 3> channel;
    std::array<int, 3> iterations{};
    std::array<double, 3> residual{};  // achieved relative residual
};

// Conjugate-gradient solve of each channel to ||A f - b|| <= tol * ||b||
// (zero rhs gives the zero vector). max_iter <= 0 selects the default of
// 10 * unknowns. Throws PipelineError with the achieved residual when an
// iteration budget runs out.
SolveResult solve_system(const PoissonSystem& sys, double tol = 1e-6, int max_iter = 0);

struct CloneStats {
    std::array<int, 3> iterations{};
};

// Paste src_bbox of `source` over dst_bbox of `target` by solving the guided
// Poisson equation. The result equals `target` bit-for-bit outside dst_bbox;
// inside it holds the solution clamped to [0,1].
ImageBuffer seamless_clone(const ImageBuffer& source, const BBox& src_bbox,
                           const ImageBuffer& target, const BBox& dst_bbox,
                           double tol = 1e-6, int max_iter = 0, CloneStats* stats = nullptr);

// Same composite through the correction-function route: solve the Laplace
// equation for the membrane interpolant of the boundary mismatch (f* - g) and
// add it to the source patch. Independent algebraic path used to cross-check
// seamless_clone.
ImageBuffer seamless_clone_via_correction(const ImageBuffer& source, const BBox& src_bbox,
                                          const ImageBuffer& target, const BBox& dst_bbox,
                                          double tol = 1e-6, int max_iter = 0,
                                          CloneStats* stats = nullptr);

}  // namespace pbda
