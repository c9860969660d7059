#include "gamelab/simd.hpp"

#include <cmath>

namespace gamelab::simd::detail {
namespace {

double max_abs_diff_scalar(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (d > m) m = d;
    }
    return m;
}

double max_abs_scalar(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) {
        const double d = std::fabs(v);
        if (d > m) m = d;
    }
    return m;
}

void axpy_scalar(double alpha, std::span<const double> x, std::span<double> y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] = y[i] + alpha * x[i];
}

}  // namespace

const Kernels scalar_kernels = {max_abs_diff_scalar, max_abs_scalar, axpy_scalar, "scalar"};

}  // namespace gamelab::simd::detail
