#include "gamelab/payoff.hpp"

#include <cmath>

namespace gamelab {

double stieltjes_cost(const ControlCost& f, const ControlPath& control, double tau, double t,
                      double r) {
    const int k = control.grid.node_of(tau);
    double cost = 0.0;
    for (const auto& [node, size] : control.atoms) {
        if (size < 0.0) throw InvariantError("stieltjes_cost: negative atom");
        if (node <= k) {
            const double s = control.grid.time(node);
            cost += std::exp(-r * s) * f.eval(t + s) * size;
        }
    }
    // Density part: trapezoid of e^{-rs} f(t+s) rho_s over [0, tau].
    const double dt = control.grid.dt();
    for (int i = 0; i < k; ++i) {
        const double s0 = control.grid.time(i), s1 = control.grid.time(i + 1);
        const double w0 = std::exp(-r * s0) * f.eval(t + s0);
        const double w1 = std::exp(-r * s1) * f.eval(t + s1);
        cost += 0.5 * (w0 + w1) * control.density[i] * dt;
    }
    return cost;
}

double evaluate_payoff(const GameSpec& spec, const CadlagPath& path, const ControlPath& control,
                       double tau, double t) {
    if (path.grid != control.grid) throw ConfigError("evaluate_payoff: path/control grids misaligned");
    const int k = path.grid.node_of(tau);
    const double r = spec.discount;

    double value = std::exp(-r * tau) * spec.g_at(t + tau, path.value_at(k));

    // Running payoff by trapezoid on the right limits.
    const double dt = path.grid.dt();
    double running = 0.0;
    double prev = spec.h_at(t, path.value_at(0));
    for (int i = 1; i <= k; ++i) {
        const double s = path.grid.time(i);
        const double cur = std::exp(-r * s) * spec.h_at(t + s, path.value_at(i));
        running += 0.5 * (prev + cur) * dt;
        prev = cur;
    }
    value += running;

    value += stieltjes_cost(spec.f, control, tau, t, r);
    return value;
}

}  // namespace gamelab
