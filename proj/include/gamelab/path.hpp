#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "gamelab/core.hpp"

namespace gamelab {

// Gaussian increments for one path: dW (d'-dim) and the independent dWtilde
// (d-dim), each entry with variance dt. Regenerating with the same
// (seed, path_index) is bit-for-bit reproducible; the two blocks come from
// disjoint substreams of the same master seed.
struct BrownianDriver {
    uint64_t seed = 0;
    uint64_t path_index = 0;
    int n_steps = 0;
    double dt = 0.0;
    int d = 1, dprime = 1;
    std::vector<double> dW;       // n_steps x d'
    std::vector<double> dWtilde;  // n_steps x d

    std::span<const double> dW_at(int step) const {
        return {dW.data() + static_cast<size_t>(step) * dprime, static_cast<size_t>(dprime)};
    }
    std::span<const double> dWtilde_at(int step) const {
        return {dWtilde.data() + static_cast<size_t>(step) * d, static_cast<size_t>(d)};
    }

    static BrownianDriver generate(uint64_t seed, uint64_t path_index, int n_steps, double dt,
                                   int d, int dprime);

    // Audit export: s, dW_1..dW_d', dWtilde_1..dWtilde_d per step.
    void write_csv(std::ostream& os) const;
};

// Discretized cadlag path with explicit left limits at every node.
// values[i] - pre_values[i] = n_{s_i} * dnu_{s_i} where dnu is the atom of nu
// at s_i; the absolutely continuous part of the control accrues before the
// left limit. jump_flags marks the atom nodes.
struct CadlagPath {
    TimeGrid grid;
    int d = 1;
    std::vector<double> values;      // (N+1) x d, right limits
    std::vector<double> pre_values;  // (N+1) x d, left limits
    std::vector<uint8_t> jump_flags;

    std::span<const double> value_at(int node) const {
        return {values.data() + static_cast<size_t>(node) * d, static_cast<size_t>(d)};
    }
    std::span<const double> pre_value_at(int node) const {
        return {pre_values.data() + static_cast<size_t>(node) * d, static_cast<size_t>(d)};
    }

    // Columns: s, x_1..x_d, pre_x_1..pre_x_d, jump_flag.
    void write_csv(std::ostream& os) const;
};

// One Brownian driver, one control, several gammas: the base path (gamma=0)
// and its perturbed companions.
struct CoupledSample {
    CadlagPath base;
    std::vector<std::pair<double, CadlagPath>> perturbed;  // in input gamma order
    uint64_t driver_seed = 0;

    const CadlagPath& at_gamma(double gamma) const;
};

}  // namespace gamelab
