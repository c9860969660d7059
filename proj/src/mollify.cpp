#include "gamelab/mollify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gamelab {

namespace {

double lerp_lattice(const std::vector<double>& vals, double x0, double dx, double x) {
    if (vals.empty()) return 0.0;
    const double pos = (x - x0) / dx;
    if (pos <= 0.0) return vals.front();
    if (pos >= static_cast<double>(vals.size() - 1)) return vals.back();
    const size_t i = static_cast<size_t>(pos);
    const double w = pos - i;
    return (1.0 - w) * vals[i] + w * vals[i + 1];
}

// Smooth cutoff: 1 on |x| <= k-1, 0 on |x| >= k, quintic smoothstep between.
double cutoff(double r, int k) {
    if (r <= k - 1) return 1.0;
    if (r >= k) return 0.0;
    const double t = static_cast<double>(k) - r;  // in (0,1)
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

std::vector<double> convolve_same(const std::vector<double>& v, const std::vector<double>& w) {
    const int half = static_cast<int>(w.size()) / 2;
    const int n = static_cast<int>(v.size());
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int q = 0; q < static_cast<int>(w.size()); ++q) {
            const int src = std::clamp(i + q - half, 0, n - 1);
            s += w[q] * v[src];
        }
        out[i] = s;
    }
    return out;
}

}  // namespace

std::vector<double> bump_weights(int j, double dx) {
    const double radius = 1.0 / j;
    const int half = std::max(1, static_cast<int>(std::floor(radius / dx)));
    std::vector<double> w(2 * half + 1, 0.0);
    double sum = 0.0;
    for (int q = -half; q <= half; ++q) {
        const double y = q * dx * j;  // in [-1, 1]
        if (std::abs(y) < 1.0) w[q + half] = std::exp(-1.0 / (1.0 - y * y));
        sum += w[q + half];
    }
    for (double& v : w) v /= sum;  // mollification of a constant returns the constant
    return w;
}

MollifiedPayoffs mollify_payoffs(const GameSpec& spec, int j, int k, int m) {
    if (j < 1 || k < 1 || m < 1) throw ConfigError("mollify_payoffs: j, k, m must be >= 1");
    if (k < 2) throw ConfigError("mollify_payoffs: cutoff radius must exceed the mollifier radius");
    if (spec.d != 1) throw ConfigError("mollify_payoffs: spatial dimension 1 supported");

    MollifiedPayoffs mp;
    mp.j = j;
    mp.k = k;
    mp.m = m;
    mp.horizon = spec.horizon;

    // Spatial lattice over [-(k + 1/j) - pad, +] at 1/(20 j) spacing.
    const double radius = 1.0 / j;
    mp.lattice_dx = radius / 20.0;
    const double extent = k + radius + 2.0 * mp.lattice_dx;
    mp.lattice_x0 = -extent;
    const int n = 2 * static_cast<int>(std::ceil(extent / mp.lattice_dx)) + 1;

    std::vector<double> g_raw(n), h_raw(n);
    for (int i = 0; i < n; ++i) {
        const double x = mp.lattice_x0 + i * mp.lattice_dx;
        const std::span<const double> xs(&x, 1);
        g_raw[i] = std::min(spec.g_at(0.0, xs), static_cast<double>(m));
        h_raw[i] = std::min(spec.h_at(0.0, xs), static_cast<double>(m));
    }
    const std::vector<double> w = bump_weights(j, mp.lattice_dx);
    mp.g_lattice = convolve_same(g_raw, w);
    mp.h_lattice = convolve_same(h_raw, w);
    for (int i = 0; i < n; ++i) {
        const double x = mp.lattice_x0 + i * mp.lattice_dx;
        const double chi = cutoff(std::abs(x), k);
        mp.g_lattice[i] *= chi;
        mp.h_lattice[i] *= chi;
    }

    // f: truncate at m, smooth in time only, floor at the positive minimum so
    // f_jkm stays strictly positive.
    const int nt = 257;
    mp.time_dt = spec.horizon / (nt - 1);
    std::vector<double> f_raw(nt);
    double fmin = std::numeric_limits<double>::max();
    for (int i = 0; i < nt; ++i) {
        f_raw[i] = std::min(spec.f_at(i * mp.time_dt), static_cast<double>(m));
        fmin = std::min(fmin, f_raw[i]);
    }
    mp.f_floor = fmin;
    const std::vector<double> wt = bump_weights(j, mp.time_dt);
    mp.f_lattice = convolve_same(f_raw, wt);
    for (double& v : mp.f_lattice) v = std::max(v, mp.f_floor);

    return mp;
}

double MollifiedPayoffs::g(double, std::span<const double> x) const {
    return lerp_lattice(g_lattice, lattice_x0, lattice_dx, x[0]);
}

double MollifiedPayoffs::h(double, std::span<const double> x) const {
    return lerp_lattice(h_lattice, lattice_x0, lattice_dx, x[0]);
}

double MollifiedPayoffs::f(double t) const {
    return lerp_lattice(f_lattice, 0.0, time_dt, t);
}

}  // namespace gamelab
