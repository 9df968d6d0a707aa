#include "pbda/kernels.hpp"

namespace pbda::kernels {
namespace {

double sq_dist_f32(const float* a, const float* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        acc += d * d;
    }
    return acc;
}

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpay(const double* x, double beta, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void laplace5(const double* x, double* y, int w, int h) {
    for (int r = 0; r < h; ++r) {
        const double* row = x + static_cast<std::size_t>(r) * w;
        double* out = y + static_cast<std::size_t>(r) * w;
        for (int c = 0; c < w; ++c) {
            double v = 4.0 * row[c];
            if (c > 0) v -= row[c - 1];
            if (c + 1 < w) v -= row[c + 1];
            if (r > 0) v -= row[c - w];
            if (r + 1 < h) v -= row[c + w];
            out[c] = v;
        }
    }
}

}  // namespace

const Ops& scalar_ops() {
    static constexpr Ops ops{"scalar", sq_dist_f32, dot, axpy, xpay, laplace5};
    return ops;
}

}  // namespace pbda::kernels
