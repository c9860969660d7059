#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "gamelab/control.hpp"
#include "gamelab/fit.hpp"
#include "gamelab/game_spec.hpp"
#include "gamelab/stopper.hpp"
#include "gamelab/vi_solver.hpp"

#include <json.hpp>

namespace gamelab {

struct SweepRow {
    double param = 0.0;
    std::string statistic;
    double mean = 0.0;
    double stderr_ = 0.0;
    long n = 0;
};

struct SweepReport {
    std::vector<SweepRow> rows;  // sorted by param
    LogLogFit fit;               // over rows with stderr < 20% of mean
    bool pass = false;
    std::string verdict;

    nlohmann::json verdict_json() const;
    // Plot-ready long format: parameter,statistic,mean,stderr,n.
    void write_csv(std::ostream& os) const;
};

struct GammaSweepConfig {
    std::vector<double> gammas;  // >= 5 values
    long n_paths = 1000;         // >= 1000
    double p = 1.0;
    uint64_t seed = 1;
    int n_steps = 1000;
    std::vector<double> x0;
    ControlFamily control = ZeroControl{};
    int threads = 1;
};

// MC means of sup_distance^p per gamma with a log-log fit; verdict
// slope in [0.9 p, 1.1 p].
SweepReport gamma_sweep(const GameSpec& spec, const GammaSweepConfig& cfg);

struct RateStudyConfig {
    std::vector<double> gammas;  // dyadic decreasing
    GridParams grid;
    PenaltySchedule schedule;
    int threads = 1;
    double slope_min = 0.8;
    double r2_min = 0.0;
};

// Cauchy differences D(gamma) = sup over the interior compact of
// |u^gamma - u^{gamma/2}|; verdict: fitted slope >= slope_min.
SweepReport value_rate_study(const GameSpec& spec, const RateStudyConfig& cfg);

struct MollifySweepConfig {
    std::vector<int> js;  // increasing
    int k = 4;
    int m = 4;
    double grad_tol = 1e-3;
    double final_error_factor = 0.6;  // final sup error must be <= factor / j_max
};

// j-sweep of sup |g_jkm - g^m| over B_{k-2} plus a finite-difference
// gradient check on B_{k-1}.
SweepReport mollify_sweep(const GameSpec& spec, const MollifySweepConfig& cfg);

struct LiminfConfig {
    std::vector<double> gamma_ks;  // decreasing
    long n_paths = 1000;
    uint64_t seed = 1;
    int n_steps = 1000;
    std::vector<double> x0;
    ControlFamily control = ZeroControl{};
    double tol = 1e-3;
    double max_violation_frac = 0.05;
};

struct LiminfReport {
    double violation_fraction = 0.0;
    long n_paths = 0;
    bool pass = false;

    nlohmann::json to_json() const;
};

// Per coupled path, theta*^{gamma_k} on the perturbed path against
// u^{gamma_k} and theta* on the base path against the reference value;
// a violation is min over the last 3 k's of theta^{gamma_k} < theta* - 2*dt.
LiminfReport stopping_liminf_check(const GameSpec& spec, const LiminfConfig& cfg,
                                   const std::vector<const ValueGrid*>& grids,
                                   const ValueField& reference);

struct OptimalityConfig {
    long n_paths = 1000;
    uint64_t seed = 1;
    int n_steps = 1000;
    std::vector<double> x0;
    double tol = 1e-3;
    double budget = 0.0;          // discretization allowance
    double reference_value = 0.0; // u^gamma(t, x0) or analytic v(t, x0)
};

struct OptimalityRow {
    std::string control;
    double mean = 0.0;
    double stderr_ = 0.0;
    double nu_mean = 0.0;  // E[nu_{T-t}] under this control
};

struct OptimalityReport {
    std::vector<OptimalityRow> rows;
    double min_gap = 0.0;  // min over controls of E[J(n,nu,theta*)] - reference
    bool pass = false;

    nlohmann::json to_json() const;
};

// MC payoff under theta* per control; no control in the family may beat the
// value by more than MC error plus the budget. Controls must sit in the
// bounded-expectation class E[nu_{T-t}] <= K2 (1 + |x|).
OptimalityReport optimality_gap_study(const GameSpec& spec, const ValueField& value,
                                      const std::vector<ControlFamily>& family,
                                      const OptimalityConfig& cfg);

}  // namespace gamelab
