#pragma once

#include <span>
#include <vector>

#include "gamelab/game_spec.hpp"

namespace gamelab {

// Smooth compactly supported approximants (f_jkm, g_jkm, h_jkm):
//   value truncation at m, convolution with a bump mollifier of radius 1/j,
//   smooth cutoff identically 1 on B_{k-1} and 0 outside B_k.
// Built on a fine auxiliary lattice with linear interpolation between nodes.
// Spatial dimension 1.
struct MollifiedPayoffs {
    int j = 1, k = 1, m = 1;

    double g(double t, std::span<const double> x) const;
    double h(double t, std::span<const double> x) const;
    double f(double t) const;

    // Lattice internals (exposed for diagnostics/tests).
    double lattice_x0 = 0.0, lattice_dx = 0.0;
    std::vector<double> g_lattice, h_lattice;
    double time_dt = 0.0;
    std::vector<double> f_lattice;  // over [0, T]
    double f_floor = 0.0;
    double horizon = 1.0;
};

MollifiedPayoffs mollify_payoffs(const GameSpec& spec, int j, int k, int m);

// Normalized bump weights on a lattice of spacing dx, radius 1/j; sums to 1.
std::vector<double> bump_weights(int j, double dx);

}  // namespace gamelab
