#pragma once

#include <string>
#include <vector>

#include "gamelab/game_spec.hpp"

#include <json.hpp>

namespace gamelab {

struct AssumptionCheck {
    std::string name;
    bool pass = true;
    double estimate = 0.0;  // worst quotient / ratio found
    double bound = 0.0;     // the bound it was compared against
    std::vector<double> witness;  // worst-case sample point
    std::string note;
};

struct AssumptionReport {
    std::vector<AssumptionCheck> checks;
    bool conforming = true;

    nlohmann::json to_json() const;
};

// Sampled (not certified) checks of the standing assumptions: gradient-vs-f
// ratio for g, Lipschitz quotients for b and sigma against D1, growth of g+h
// against the profile bound, the sigma structure (i.a)/(i.b), and positivity/
// monotonicity of f. Violations are reported, never thrown.
AssumptionReport validate_assumptions(const GameSpec& spec,
                                      const std::vector<std::vector<double>>& sample_points);

// Convenience: low-discrepancy-ish sample over [-box, box]^d, n points.
std::vector<std::vector<double>> sample_box(int d, double box, int n, uint64_t seed);

}  // namespace gamelab
