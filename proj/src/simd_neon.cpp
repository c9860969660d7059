#include "gamelab/simd.hpp"

#include <arm_neon.h>
#include <cmath>

namespace gamelab::simd::detail {
namespace {

double max_abs_diff_neon(std::span<const double> a, std::span<const double> b) {
    const size_t n = a.size();
    size_t i = 0;
    float64x2_t acc = vdupq_n_f64(0.0);
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vabdq_f64(vld1q_f64(a.data() + i), vld1q_f64(b.data() + i));
        acc = vmaxq_f64(acc, d);
    }
    double m = vmaxvq_f64(acc);
    for (; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (d > m) m = d;
    }
    return m;
}

double max_abs_neon(std::span<const double> a) {
    const size_t n = a.size();
    size_t i = 0;
    float64x2_t acc = vdupq_n_f64(0.0);
    for (; i + 2 <= n; i += 2) {
        acc = vmaxq_f64(acc, vabsq_f64(vld1q_f64(a.data() + i)));
    }
    double m = vmaxvq_f64(acc);
    for (; i < n; ++i) {
        const double d = std::fabs(a[i]);
        if (d > m) m = d;
    }
    return m;
}

// vmulq + vaddq, not vfmaq: results must match the scalar backend exactly.
void axpy_neon(double alpha, std::span<const double> x, std::span<double> y) {
    const size_t n = x.size();
    size_t i = 0;
    const float64x2_t va = vdupq_n_f64(alpha);
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vx = vld1q_f64(x.data() + i);
        const float64x2_t vy = vld1q_f64(y.data() + i);
        vst1q_f64(y.data() + i, vaddq_f64(vy, vmulq_f64(va, vx)));
    }
    for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

}  // namespace

const Kernels neon_kernels = {max_abs_diff_neon, max_abs_neon, axpy_neon, "neon"};

}  // namespace gamelab::simd::detail
