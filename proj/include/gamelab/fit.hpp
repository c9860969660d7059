#pragma once

#include <span>

namespace gamelab {

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;  // in log space
    double r2 = 0.0;
    int n_used = 0;
    bool degenerate = false;  // fewer than 2 usable rows or all below noise floor
};

// Least squares of log(y) against log(x); rows with y <= floor are skipped.
LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y,
                     double noise_floor = 1e-300);

// Least squares fit through the origin of y = c * x.
double fit_through_origin(std::span<const double> x, std::span<const double> y);

}  // namespace gamelab
