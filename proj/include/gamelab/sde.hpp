#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gamelab/control.hpp"
#include "gamelab/game_spec.hpp"
#include "gamelab/path.hpp"

namespace gamelab {

// Euler-Maruyama with exact injection of singular-control increments:
// per step X_{s+D-} = X_s + b dt + sigma dW + gamma dWtilde, then the control
// increment n * dnu at the right endpoint; the time-0 atom shifts the initial
// state before the first step.
CadlagPath simulate_controlled(const GameSpec& spec, const ControlPath& control,
                               const BrownianDriver& driver, double gamma,
                               std::span<const double> x0);

// Base path plus perturbed companions sharing one driver and one control.
CoupledSample simulate_coupled(const GameSpec& spec, const ControlPath& control, uint64_t seed,
                               std::span<const double> gammas, std::span<const double> x0,
                               uint64_t path_index = 0);

// max over grid nodes (both limits) of |a - b|_d, raised to p.
double sup_distance(const CadlagPath& a, const CadlagPath& b, double p);

// Left limit at a grid time s.
std::vector<double> left_limit(const CadlagPath& path, double s);

enum class PathStatistic { sup_distance, terminal_norm };

MeanStderr moment_estimate(std::span<const CoupledSample> samples, double gamma, double p,
                           PathStatistic statistic);

}  // namespace gamelab
