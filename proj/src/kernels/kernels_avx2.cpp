#include "kernels_internal.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace pbda::kernels {
namespace {

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    const __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double sq_dist_f32(const float* a, const float* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    // Widen to double before subtracting so the differences match the scalar
    // kernel exactly; only the summation order differs.
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_cvtps_pd(_mm_loadu_ps(a + i)),
                                         _mm256_cvtps_pd(_mm_loadu_ps(b + i)));
        const __m256d d1 = _mm256_sub_pd(_mm256_cvtps_pd(_mm_loadu_ps(a + i + 4)),
                                         _mm256_cvtps_pd(_mm_loadu_ps(b + i + 4)));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
        acc1 = _mm256_fmadd_pd(d1, d1, acc1);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        acc += d * d;
    }
    return acc;
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d av = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i),
                                                _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void xpay(const double* x, double beta, double* y, std::size_t n) {
    const __m256d bv = _mm256_set1_pd(beta);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(bv, _mm256_loadu_pd(y + i),
                                                _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void laplace5(const double* x, double* y, int w, int h) {
    const __m256d four = _mm256_set1_pd(4.0);
    for (int r = 0; r < h; ++r) {
        const double* row = x + static_cast<std::size_t>(r) * w;
        double* out = y + static_cast<std::size_t>(r) * w;
        const bool has_up = r > 0;
        const bool has_dn = r + 1 < h;

        const auto scalar_at = [&](int c) {
            double v = 4.0 * row[c];
            if (c > 0) v -= row[c - 1];
            if (c + 1 < w) v -= row[c + 1];
            if (has_up) v -= row[c - w];
            if (has_dn) v -= row[c + w];
            out[c] = v;
        };

        scalar_at(0);
        int c = 1;
        for (; c + 4 <= w - 1; c += 4) {
            __m256d v = _mm256_mul_pd(four, _mm256_loadu_pd(row + c));
            v = _mm256_sub_pd(v, _mm256_loadu_pd(row + c - 1));
            v = _mm256_sub_pd(v, _mm256_loadu_pd(row + c + 1));
            if (has_up) v = _mm256_sub_pd(v, _mm256_loadu_pd(row + c - w));
            if (has_dn) v = _mm256_sub_pd(v, _mm256_loadu_pd(row + c + w));
            _mm256_storeu_pd(out + c, v);
        }
        for (; c < w; ++c) scalar_at(c);
    }
}

}  // namespace

namespace detail {

const Ops* avx2_table() {
    static constexpr Ops ops{"avx2", sq_dist_f32, dot, axpy, xpay, laplace5};
    return &ops;
}

}  // namespace detail
}  // namespace pbda::kernels

#else  // no AVX2 at build time

namespace pbda::kernels::detail {

const Ops* avx2_table() { return nullptr; }

}  // namespace pbda::kernels::detail

#endif
