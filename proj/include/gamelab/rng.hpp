#pragma once

#include <cmath>
#include <cstdint>

namespace gamelab {

// splitmix64 output function; also used as the mixing step when deriving
// substream keys.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based Gaussian stream. The key is derived from
// (master seed, path index, stream tag); drawing the n-th variate never
// depends on how many other streams exist or in which order they run, so
// parallel path generation is order-independent and bit-reproducible.
class GaussianStream {
  public:
    enum class Tag : uint64_t { W = 0x57, Wtilde = 0x77 };

    GaussianStream(uint64_t master_seed, uint64_t path_index, Tag tag) {
        key_ = master_seed;
        key_ = mix64(key_ ^ mix64(path_index));
        key_ = mix64(key_ ^ static_cast<uint64_t>(tag));
    }

    uint64_t next_bits() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * (++counter_)); }

    // Uniform in (0, 1], 53-bit resolution.
    double next_uniform() {
        return (static_cast<double>(next_bits() >> 11) + 1.0) * 0x1p-53;
    }

    // Box-Muller; owned uniforms keep the stream portable across platforms.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    uint64_t key_ = 0;
    uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace gamelab
