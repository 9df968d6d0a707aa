#pragma once

#include <cstddef>
#include <vector>

namespace pbda::kernels {

// One table of inner-loop kernels per instruction set. Everything accumulates
// in double, so variants agree to rounding error and a fixed selection gives
// reproducible runs.
struct Ops {
    const char* name;

    // Sum of squared differences; float inputs widened to double before the
    // subtraction so all variants compute the same exact differences.
    double (*sq_dist_f32)(const float* a, const float* b, std::size_t n);

    double (*dot)(const double* a, const double* b, std::size_t n);

    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

    // y = x + beta * y
    void (*xpay)(const double* x, double beta, double* y, std::size_t n);

    // y = A x for the 5-point Laplacian on a w x h grid: diagonal 4, -1 per
    // in-grid 4-neighbour, zero Dirichlet outside.
    void (*laplace5)(const double* x, double* y, int w, int h);
};

const Ops& scalar_ops();

// AVX2+FMA table, or null when the build target or the running CPU lacks it.
const Ops* avx2_ops();

// Best available table. PBDA_KERNELS=scalar|avx2 overrides the selection.
const Ops& active_ops();

// All tables usable on this machine, scalar first. For equivalence tests.
std::vector<const Ops*> available_ops();

}  // namespace pbda::kernels
