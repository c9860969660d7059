#pragma once

#include <vector>

#include "gamelab/game_spec.hpp"
#include "gamelab/value_grid.hpp"

namespace gamelab {

struct GridParams {
    double x_min = -1.0;
    double x_max = 1.0;
    int n_x = 200;  // spatial nodes
    int n_t = 100;  // time steps (n_t + 1 levels)
    double boundary_layer_frac = 0.1;
};

// Vanishing penalty weights for the obstacle constraint (from below) and the
// gradient constraint (from above); one full backward sweep per stage, warm
// started from the previous stage.
struct PenaltySchedule {
    std::vector<double> eps_obstacle = {1e-2, 1e-4, 1e-6};
    std::vector<double> eps_gradient = {1e-2, 1e-4, 1e-6};
    int max_outer = 200;       // Newton iteration cap per time level
    double newton_tol = 1e-10;

    void validate() const;
};

struct ResidualSummary {
    double max_interior = 0.0;
    double p99_interior = 0.0;
};

struct SolveDiagnostics {
    std::vector<ResidualSummary> stage_residuals;  // after each penalty stage
    long newton_iterations = 0;
    long damping_events = 0;
};

// Backward-in-time implicit solve of the penalized semilinear equation
//   dt u + L^gamma u - r u + h + (1/e1)(g-u)^+ - (1/e2)(|grad u| - f)^+ = 0
// with u(T,.) = g(T,.) and u = g on the lateral boundary. Damped Newton with
// a tridiagonal Jacobian per time level. gamma enters only through
// a_gamma = a + gamma^2 at assembly.
ValueGrid solve_vi(const GameSpec& spec, double gamma, const GridParams& grid,
                   const PenaltySchedule& schedule, SolveDiagnostics* diag = nullptr);

// Per-node residual of both displayed forms
//   min{max{A, B}, C} and max{min{A, C}, B}
// with A = dt u + L^gamma u - r u + h, B = g - u, C = f - |grad u|; stores the
// larger magnitude per node into vg.residual and summarizes over interior
// nodes away from the boundary layer.
ResidualSummary vi_residual(ValueGrid& vg, const GameSpec& spec, double gamma);

struct GradientReport {
    double max_ratio = 0.0;  // max |grad u| / f(t) over interior nodes
    double tol = 0.02;
    bool pass = true;
};

GradientReport gradient_bound_check(const ValueGrid& vg, const GameSpec& spec,
                                    double grad_tol = 0.02);

// Mask (time-major, size n_t*n_x) of nodes with u - g <= tol; the terminal
// slice is always included.
std::vector<uint8_t> extract_contact_set(const ValueGrid& vg, const GameSpec& spec, double tol);

}  // namespace gamelab
