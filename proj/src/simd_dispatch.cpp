#include "gamelab/simd.hpp"

#include <cstdlib>
#include <cstring>

namespace gamelab::simd {
namespace {

const Kernels* detect() {
    const char* env = std::getenv("GAMELAB_SIMD");
    if (env) {
        if (std::strcmp(env, "scalar") == 0) return &detail::scalar_kernels;
#ifdef GAMELAB_HAVE_AVX2
        if (std::strcmp(env, "avx2") == 0) return &detail::avx2_kernels;
#endif
#ifdef GAMELAB_HAVE_NEON
        if (std::strcmp(env, "neon") == 0) return &detail::neon_kernels;
#endif
        return &detail::scalar_kernels;  // unknown or unavailable: fall back
    }
#ifdef GAMELAB_HAVE_AVX2
    if (__builtin_cpu_supports("avx2")) return &detail::avx2_kernels;
#endif
#ifdef GAMELAB_HAVE_NEON
    return &detail::neon_kernels;  // baseline on aarch64
#endif
    return &detail::scalar_kernels;
}

}  // namespace

const Kernels& kernels() {
    static const Kernels* selected = detect();
    return *selected;
}

const Kernels* kernels_for(Backend backend) {
    switch (backend) {
        case Backend::scalar:
            return &detail::scalar_kernels;
        case Backend::avx2:
#ifdef GAMELAB_HAVE_AVX2
            if (__builtin_cpu_supports("avx2")) return &detail::avx2_kernels;
#endif
            return nullptr;
        case Backend::neon:
#ifdef GAMELAB_HAVE_NEON
            return &detail::neon_kernels;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

const char* active_backend_name() { return kernels().name; }

}  // namespace gamelab::simd
