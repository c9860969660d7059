#pragma once

#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "gamelab/core.hpp"

namespace gamelab {

struct CadlagPath;

// The pair (n, nu): unit direction per grid node, plus the non-decreasing
// cost process split into an absolutely continuous part (piecewise-constant
// density per step) and a finite list of atoms snapped to grid nodes.
struct ControlPath {
    TimeGrid grid;
    int d = 1;
    std::vector<double> directions;            // (N+1) x d, unit vectors
    std::vector<double> density;               // N rates, density[i] acts on (s_i, s_{i+1}]
    std::vector<std::pair<int, double>> atoms;  // (node, jump size >= 0), sorted by node
    std::vector<double> total;                 // nu_{s_i} (right limits), includes time-0 atom
    bool tagged_opt = false;

    std::span<const double> direction_at(int node) const {
        return {directions.data() + static_cast<size_t>(node) * d, static_cast<size_t>(d)};
    }
    double atom_at(int node) const { return node_atoms.empty() ? 0.0 : node_atoms[node]; }
    // Total control increment applied at node i: density over (s_{i-1}, s_i] plus the atom.
    // At node 0 only a possible atom.
    double increment_at(int node) const {
        double inc = atom_at(node);
        if (node > 0) inc += density[node - 1] * grid.dt();
        return inc;
    }

    // Rebuilds the per-node atom cache and the running total; call after
    // editing atoms or density.
    void rebuild_total();
    void validate() const;

    static ControlPath zero(const TimeGrid& grid, int d);

  private:
    std::vector<double> node_atoms;  // atom mass per node, derived from `atoms`
};

// Parametric control families. The feedback families (reflect_at,
// threshold_push) are built from an already-simulated reference path sharing
// the same driver; the resulting ControlPath is then fixed and can be applied
// to base and perturbed dynamics alike.
struct ZeroControl {};
struct ConstantDensity {
    double rate;
    std::vector<double> direction;
};
struct JumpAt {
    double time;
    double size;
    std::vector<double> direction;
};
struct ReflectAt {
    double barrier;
    std::vector<double> direction;  // +/- e_j
};
struct ThresholdPush {
    double level;   // trigger: first node with x_1 <= level
    double size;    // atom applied there
    std::vector<double> direction;
};
using ControlFamily = std::variant<ZeroControl, ConstantDensity, JumpAt, ReflectAt, ThresholdPush>;

// Open-loop families only; throws ConfigError for feedback families.
ControlPath make_control(const ControlFamily& family, const TimeGrid& grid, int d);

// All families; `reference` is the uncontrolled path the feedback families react to.
ControlPath make_control(const ControlFamily& family, const TimeGrid& grid, int d,
                         const CadlagPath& reference);

const char* control_family_name(const ControlFamily& family);

}  // namespace gamelab
