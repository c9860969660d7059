#include "gamelab/stopper.hpp"

#include <algorithm>
#include <cmath>

#include "gamelab/payoff.hpp"

namespace gamelab {

double GridField::eval(double t, std::span<const double> x) const {
    bool extrap = false;
    const double v = grid_.interp(t, x[0], &extrap);
    if (extrap) ++extrapolations_;
    return v;
}

namespace {

enum class Limit { right, left };

StopResult first_contact(const ValueField& value, const ValueField& g, const CadlagPath& path,
                         double t, double tol, Limit limit) {
    if (tol < 0.0) throw ConfigError("stopping tolerance must be nonnegative");
    const int n = path.grid.n_nodes();
    for (int i = 0; i < n; ++i) {
        const auto x = limit == Limit::right ? path.value_at(i) : path.pre_value_at(i);
        const double s = path.grid.time(i);
        const double gap = value.eval(t + s, x) - g.eval(t + s, x);
        if (gap < -10.0 * std::max(tol, 1e-14))
            throw NumericError("value dominance violated: value < g - 10*tol at s=" +
                               std::to_string(s));
        if (gap <= tol) return {s, i, false};
    }
    // v(T,.) = g(T,.): missing contact at the horizon is interpolation error.
    return {path.grid.span, n - 1, true};
}

}  // namespace

StopResult tau_star(const ValueField& value, const ValueField& g, const CadlagPath& path,
                    double t, double tol) {
    return first_contact(value, g, path, t, tol, Limit::right);
}

StopResult sigma_star(const ValueField& value, const ValueField& g, const CadlagPath& path,
                      double t, double tol) {
    return first_contact(value, g, path, t, tol, Limit::left);
}

StopResult theta_star(const ValueField& value, const ValueField& g, const CadlagPath& path,
                      double t, double tol) {
    const StopResult a = tau_star(value, g, path, t, tol);
    const StopResult b = sigma_star(value, g, path, t, tol);
    return a.time <= b.time ? a : b;
}

GapResult stop_rule_payoff_gap(const GameSpec& spec, const ValueField& value,
                               const ValueField& g, std::span<const PathUnderControl> paths,
                               double t, double tol) {
    GapResult out;
    RunningStat stat;
    long theta_lt = 0;
    for (const auto& pc : paths) {
        const StopResult tau = tau_star(value, g, pc.path, t, tol);
        const StopResult theta = theta_star(value, g, pc.path, t, tol);
        if (theta.time < tau.time) ++theta_lt;
        const double j_tau = evaluate_payoff(spec, pc.path, pc.control, tau.time, t);
        const double j_theta = evaluate_payoff(spec, pc.path, pc.control, theta.time, t);
        stat.add(j_tau - j_theta);
    }
    out.gap = stat.result();
    out.n_paths = stat.count();
    out.frac_theta_lt_tau = out.n_paths ? static_cast<double>(theta_lt) / out.n_paths : 0.0;
    return out;
}

}  // namespace gamelab
