#pragma once

#include "gamelab/control.hpp"
#include "gamelab/game_spec.hpp"
#include "gamelab/path.hpp"

namespace gamelab {

// Discounted cost of control over the closed interval [0, tau]:
// atoms at 0 and at tau included, density part by trapezoid quadrature.
double stieltjes_cost(const ControlCost& f, const ControlPath& control, double tau, double t,
                      double r);

// e^{-r tau} g(t+tau, X_tau) + trapezoid of e^{-rs} h(t+s, X_s) ds
// + Stieltjes cost over [0, tau].
double evaluate_payoff(const GameSpec& spec, const CadlagPath& path, const ControlPath& control,
                       double tau, double t);

}  // namespace gamelab
