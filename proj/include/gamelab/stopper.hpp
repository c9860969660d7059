#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gamelab/control.hpp"
#include "gamelab/game_spec.hpp"
#include "gamelab/path.hpp"
#include "gamelab/value_grid.hpp"

namespace gamelab {

// Evaluable scalar field over (t, x).
class ValueField {
  public:
    virtual ~ValueField() = default;
    virtual double eval(double t, std::span<const double> x) const = 0;
};

class CallableField final : public ValueField {
  public:
    explicit CallableField(std::function<double(double, std::span<const double>)> fn)
        : fn_(std::move(fn)) {}
    double eval(double t, std::span<const double> x) const override { return fn_(t, x); }

  private:
    std::function<double(double, std::span<const double>)> fn_;
};

// Bilinear interpolant of a solved ValueGrid; out-of-grid queries clamp to
// the boundary and are counted as extrapolations.
class GridField final : public ValueField {
  public:
    explicit GridField(const ValueGrid& grid) : grid_(grid) {}
    double eval(double t, std::span<const double> x) const override;
    long extrapolations() const { return extrapolations_; }

  private:
    const ValueGrid& grid_;
    mutable long extrapolations_ = 0;
};

struct StopResult {
    double time = 0.0;
    int node = 0;
    bool horizon_fallback = false;  // contact band never hit; v(T,.)=g(T,.) makes this interpolation error
};

// First grid node where value - g <= tol at the right limits X_s.
StopResult tau_star(const ValueField& value, const ValueField& g, const CadlagPath& path,
                    double t, double tol);
// Same, monitored at the left limits X_{s-}.
StopResult sigma_star(const ValueField& value, const ValueField& g, const CadlagPath& path,
                      double t, double tol);
// min(tau_star, sigma_star).
StopResult theta_star(const ValueField& value, const ValueField& g, const CadlagPath& path,
                      double t, double tol);

struct PathUnderControl {
    CadlagPath path;
    ControlPath control;
};

struct GapResult {
    MeanStderr gap;               // mean of payoff(tau*) - payoff(theta*)
    double frac_theta_lt_tau = 0; // fraction of paths with theta* < tau*
    long n_paths = 0;
};

// Payoff comparison of the two stopping rules on paths generated under a
// control with contact-set jumps. theta* stops no later than tau*; against a
// controller who jumps from contact into continuation, waiting until tau*
// collects at least as much, so the gap mean should be >= 0 up to MC error.
GapResult stop_rule_payoff_gap(const GameSpec& spec, const ValueField& value,
                               const ValueField& g, std::span<const PathUnderControl> paths,
                               double t, double tol);

}  // namespace gamelab
