#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "gamelab/rng.hpp"
#include "gamelab/simd.hpp"

using namespace gamelab;

namespace {

std::vector<double> random_vec(size_t n, uint64_t seed) {
    GaussianStream s(seed, 0, GaussianStream::Tag::W);
    std::vector<double> v(n);
    for (double& x : v) x = s.next_gaussian() * std::exp(4.0 * (s.next_uniform() - 0.5));
    return v;
}

double scalar_max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

bool bits_equal(double a, double b) {
    uint64_t ua, ub;
    std::memcpy(&ua, &a, 8);
    std::memcpy(&ub, &b, 8);
    return ua == ub;
}

}  // namespace

TEST_CASE("scalar kernels match a plain loop") {
    const auto* k = simd::kernels_for(simd::Backend::scalar);
    REQUIRE(k != nullptr);
    for (size_t n : {size_t{0}, size_t{1}, size_t{3}, size_t{8}, size_t{17}, size_t{1000}}) {
        const auto a = random_vec(n, 11), b = random_vec(n, 22);
        CHECK(bits_equal(k->max_abs_diff(a, b), scalar_max_abs_diff(a, b)));
        CHECK(bits_equal(k->max_abs(a), scalar_max_abs_diff(a, std::vector<double>(n, 0.0))));
    }
}

TEST_CASE("every available backend is bit-identical to scalar") {
    const auto* scalar = simd::kernels_for(simd::Backend::scalar);
    REQUIRE(scalar != nullptr);
    for (auto backend : {simd::Backend::avx2, simd::Backend::neon}) {
        const auto* k = simd::kernels_for(backend);
        if (!k) continue;
        INFO("backend ", k->name);
        for (size_t n : {size_t{0}, size_t{1}, size_t{3}, size_t{4}, size_t{5}, size_t{8},
                         size_t{17}, size_t{64}, size_t{1000}, size_t{1001}}) {
            const auto a = random_vec(n, 7 * n + 1), b = random_vec(n, 13 * n + 2);
            CHECK(bits_equal(k->max_abs_diff(a, b), scalar->max_abs_diff(a, b)));
            CHECK(bits_equal(k->max_abs(a), scalar->max_abs(a)));

            auto y1 = random_vec(n, 5 * n + 3), y2 = y1;
            const double alpha = 0.731530428582190;
            scalar->axpy(alpha, a, y1);
            k->axpy(alpha, a, y2);
            for (size_t i = 0; i < n; ++i) CHECK(bits_equal(y1[i], y2[i]));
        }
    }
}

TEST_CASE("axpy accumulates in place") {
    const auto& k = simd::kernels();
    std::vector<double> y(9, 1.0);
    const std::vector<double> x(9, 2.0);
    k.axpy(0.5, x, y);
    for (double v : y) CHECK(v == 2.0);
}

TEST_CASE("max_abs handles signed extremes") {
    const auto& k = simd::kernels();
    const std::vector<double> v = {0.0, -3.5, 2.0, -0.0, 1.25};
    CHECK(k.max_abs(v) == 3.5);
    const std::vector<double> w = {0.0, 3.5, -2.0, 0.0, -1.25};
    CHECK(k.max_abs_diff(v, w) == 7.0);
}

TEST_CASE("an active backend is reported") {
    CHECK(simd::active_backend_name() != nullptr);
    CHECK(simd::kernels().name == simd::active_backend_name());
}
