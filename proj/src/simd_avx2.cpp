#include "gamelab/simd.hpp"

#include <cmath>
#include <immintrin.h>

namespace gamelab::simd::detail {
namespace {

const __m256d kSignMask = _mm256_set1_pd(-0.0);

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    lo = _mm_max_sd(lo, _mm_unpackhi_pd(lo, lo));
    return _mm_cvtsd_f64(lo);
}

double max_abs_diff_avx2(std::span<const double> a, std::span<const double> b) {
    const size_t n = a.size();
    size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
        const __m256d va = _mm256_loadu_pd(a.data() + i);
        const __m256d vb = _mm256_loadu_pd(b.data() + i);
        const __m256d d = _mm256_andnot_pd(kSignMask, _mm256_sub_pd(va, vb));
        acc = _mm256_max_pd(acc, d);
    }
    double m = hmax(acc);
    for (; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (d > m) m = d;
    }
    return m;
}

double max_abs_avx2(std::span<const double> a) {
    const size_t n = a.size();
    size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_andnot_pd(kSignMask, _mm256_loadu_pd(a.data() + i));
        acc = _mm256_max_pd(acc, v);
    }
    double m = hmax(acc);
    for (; i < n; ++i) {
        const double d = std::fabs(a[i]);
        if (d > m) m = d;
    }
    return m;
}

// No FMA: mul then add, matching the scalar backend bit-for-bit.
void axpy_avx2(double alpha, std::span<const double> x, std::span<double> y) {
    const size_t n = x.size();
    size_t i = 0;
    const __m256d va = _mm256_set1_pd(alpha);
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x.data() + i);
        const __m256d vy = _mm256_loadu_pd(y.data() + i);
        _mm256_storeu_pd(y.data() + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
    }
    for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

}  // namespace

const Kernels avx2_kernels = {max_abs_diff_avx2, max_abs_avx2, axpy_avx2, "avx2"};

}  // namespace gamelab::simd::detail
