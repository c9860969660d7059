#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gamelab {

// Bad inputs: mismatched grids, out-of-range parameters, malformed configs.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite values, solver breakdowns.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invariant of a domain type broken (negative control atom, non-unit direction, ...).
struct InvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Uniform time grid s_0 = 0 < s_1 < ... < s_N = span.
struct TimeGrid {
    double span = 0.0;  // T - t
    int n_steps = 0;

    double dt() const { return span / n_steps; }
    int n_nodes() const { return n_steps + 1; }
    double time(int i) const { return span * static_cast<double>(i) / n_steps; }

    bool operator==(const TimeGrid&) const = default;

    // Grid node for a time value; throws if s is not a node.
    int node_of(double s) const {
        const double pos = s / dt();
        const int i = static_cast<int>(std::lround(pos));
        if (i < 0 || i > n_steps || std::abs(pos - i) > 1e-9 * (n_steps + 1))
            throw ConfigError("time " + std::to_string(s) + " is not a grid node");
        return i;
    }
};

inline double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    long n = 0;
};

// Streaming mean/variance accumulator (Welford).
class RunningStat {
  public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / n_;
        m2_ += d * (x - mean_);
    }
    long count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / (n_ - 1) : 0.0; }
    double stderr_() const { return n_ > 1 ? std::sqrt(variance() / n_) : 0.0; }
    MeanStderr result() const { return {mean(), stderr_(), n_}; }

  private:
    long n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

}  // namespace gamelab
