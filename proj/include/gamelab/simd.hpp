#pragma once

#include <cstddef>
#include <span>

namespace gamelab::simd {

enum class Backend { scalar, avx2, neon };

// Flat-array kernels used by the hot loops (path distances, Newton updates,
// Cauchy differences). All backends are required to return bit-identical
// results: elementwise ops only, no FMA, max-reductions are order-invariant.
struct Kernels {
    // max_i |a[i] - b[i]|
    double (*max_abs_diff)(std::span<const double> a, std::span<const double> b);
    // max_i |a[i]|
    double (*max_abs)(std::span<const double> a);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, std::span<const double> x, std::span<double> y);
    const char* name;
};

// Kernels for the backend selected at startup: the widest one the CPU
// supports, unless GAMELAB_SIMD=scalar|avx2|neon overrides it.
const Kernels& kernels();

// Kernels for a specific backend, or nullptr when unavailable on this host.
const Kernels* kernels_for(Backend backend);

const char* active_backend_name();

namespace detail {
extern const Kernels scalar_kernels;
#ifdef GAMELAB_HAVE_AVX2
extern const Kernels avx2_kernels;
#endif
#ifdef GAMELAB_HAVE_NEON
extern const Kernels neon_kernels;
#endif
}  // namespace detail

}  // namespace gamelab::simd
