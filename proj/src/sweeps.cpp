#include "gamelab/sweeps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>

#include "gamelab/csv.hpp"
#include "gamelab/mollify.hpp"
#include "gamelab/payoff.hpp"
#include "gamelab/sde.hpp"
#include "gamelab/simd.hpp"

namespace gamelab {

using nlohmann::json;

json SweepReport::verdict_json() const {
    json j;
    j["pass"] = pass;
    j["verdict"] = verdict;
    j["fit"] = {{"slope", fit.slope},
                {"intercept", fit.intercept},
                {"r2", fit.r2},
                {"n_used", fit.n_used},
                {"degenerate", fit.degenerate}};
    json rows_j = json::array();
    for (const auto& r : rows)
        rows_j.push_back({{"param", r.param},
                          {"statistic", r.statistic},
                          {"mean", r.mean},
                          {"stderr", r.stderr_},
                          {"n", r.n}});
    j["rows"] = rows_j;
    return j;
}

void SweepReport::write_csv(std::ostream& os) const {
    os << "parameter,statistic,mean,stderr,n\n";
    for (const auto& r : rows)
        os << fmt_double(r.param) << ',' << r.statistic << ',' << fmt_double(r.mean) << ','
           << fmt_double(r.stderr_) << ',' << r.n << "\n";
}

namespace {

// Fit over rows whose standard error is below 20% of the mean.
LogLogFit filtered_fit(const std::vector<SweepRow>& rows) {
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
        if (r.mean > 0.0 && (r.n < 2 || r.stderr_ < 0.2 * r.mean)) {
            xs.push_back(r.param);
            ys.push_back(r.mean);
        }
    }
    return fit_loglog(xs, ys);
}

ControlPath build_control(const ControlFamily& family, const GameSpec& spec, const TimeGrid& grid,
                          uint64_t seed, uint64_t path_index, std::span<const double> x0) {
    const bool feedback = std::holds_alternative<ReflectAt>(family) ||
                          std::holds_alternative<ThresholdPush>(family);
    if (!feedback) return make_control(family, grid, spec.d);
    // Feedback families react to the uncontrolled base path on the same driver.
    const BrownianDriver drv =
        BrownianDriver::generate(seed, path_index, grid.n_steps, grid.dt(), spec.d, spec.dprime);
    const CadlagPath ref =
        simulate_controlled(spec, ControlPath::zero(grid, spec.d), drv, 0.0, x0);
    return make_control(family, grid, spec.d, ref);
}

template <typename Fn>
void parallel_paths(long n_paths, int threads, Fn&& per_path) {
    threads = std::max(1, threads);
    if (threads == 1) {
        for (long i = 0; i < n_paths; ++i) per_path(i);
        return;
    }
    std::vector<std::future<void>> futs;
    const long chunk = (n_paths + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const long lo = t * chunk, hi = std::min<long>(n_paths, lo + chunk);
        if (lo >= hi) break;
        futs.push_back(std::async(std::launch::async, [lo, hi, &per_path]() {
            for (long i = lo; i < hi; ++i) per_path(i);
        }));
    }
    for (auto& f : futs) f.get();
}

}  // namespace

SweepReport gamma_sweep(const GameSpec& spec, const GammaSweepConfig& cfg) {
    if (cfg.gammas.size() < 5) throw ConfigError("gamma_sweep: insufficient sweep points (need >= 5)");
    if (cfg.n_paths < 1000) throw ConfigError("gamma_sweep: need at least 1000 paths");
    if (static_cast<int>(cfg.x0.size()) != spec.d) throw ConfigError("gamma_sweep: x0 dimension mismatch");

    const TimeGrid grid{spec.horizon, cfg.n_steps};
    const size_t ng = cfg.gammas.size();

    // Per-path statistics into fixed slots, reduced sequentially afterwards,
    // so threading never changes the result.
    std::vector<double> stats(static_cast<size_t>(cfg.n_paths) * ng);
    parallel_paths(cfg.n_paths, cfg.threads, [&](long i) {
        const ControlPath control =
            build_control(cfg.control, spec, grid, cfg.seed, static_cast<uint64_t>(i), cfg.x0);
        const CoupledSample s =
            simulate_coupled(spec, control, cfg.seed, cfg.gammas, cfg.x0, static_cast<uint64_t>(i));
        for (size_t gi = 0; gi < ng; ++gi)
            stats[static_cast<size_t>(i) * ng + gi] =
                sup_distance(s.base, s.perturbed[gi].second, cfg.p);
    });

    SweepReport rep;
    for (size_t gi = 0; gi < ng; ++gi) {
        RunningStat acc;
        for (long i = 0; i < cfg.n_paths; ++i) acc.add(stats[static_cast<size_t>(i) * ng + gi]);
        rep.rows.push_back({cfg.gammas[gi], "sup_distance_p" + fmt_double(cfg.p), acc.mean(),
                            acc.stderr_(), acc.count()});
    }
    std::sort(rep.rows.begin(), rep.rows.end(),
              [](const SweepRow& a, const SweepRow& b) { return a.param < b.param; });
    rep.fit = filtered_fit(rep.rows);
    if (rep.fit.degenerate) {
        rep.pass = false;
        rep.verdict = "degenerate fit: statistics below noise floor";
        return rep;
    }
    const double lo = 0.9 * cfg.p, hi = 1.1 * cfg.p;
    rep.pass = rep.fit.slope >= lo && rep.fit.slope <= hi;
    rep.verdict = "slope " + fmt_double(rep.fit.slope) + (rep.pass ? " within " : " outside ") +
                  "[" + fmt_double(lo) + ", " + fmt_double(hi) + "]";
    return rep;
}

SweepReport value_rate_study(const GameSpec& spec, const RateStudyConfig& cfg) {
    if (cfg.gammas.size() < 2) throw ConfigError("value_rate_study: insufficient sweep points");
    std::vector<double> sorted = cfg.gammas;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());

    // Solves at every gamma and every gamma/2 (same grid, so differences nest).
    std::vector<double> solve_gammas = sorted;
    for (double g : sorted)
        if (std::find(solve_gammas.begin(), solve_gammas.end(), g / 2.0) == solve_gammas.end())
            solve_gammas.push_back(g / 2.0);

    std::vector<ValueGrid> grids(solve_gammas.size());
    std::vector<std::future<void>> futs;
    const int threads = std::max(1, cfg.threads);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < solve_gammas.size(); i = next.fetch_add(1))
            grids[i] = solve_vi(spec, solve_gammas[i], cfg.grid, cfg.schedule);
    };
    for (int t = 1; t < threads; ++t) futs.push_back(std::async(std::launch::async, worker));
    worker();
    for (auto& f : futs) f.get();

    auto grid_for = [&](double g) -> const ValueGrid& {
        for (size_t i = 0; i < solve_gammas.size(); ++i)
            if (solve_gammas[i] == g) return grids[i];
        throw NumericError("missing solve for gamma");
    };

    auto interior_values = [](const ValueGrid& vg) {
        std::vector<double> out;
        const int ilo = vg.interior_lo(), ihi = vg.interior_hi();
        out.reserve(static_cast<size_t>(vg.n_t()) * (ihi - ilo + 1));
        for (int k = 0; k < vg.n_t(); ++k)
            for (int i = ilo; i <= ihi; ++i) out.push_back(vg.u[vg.idx(k, i)]);
        return out;
    };

    SweepReport rep;
    double usup = 0.0;
    for (double g : sorted) {
        const ValueGrid& a = grid_for(g);
        const ValueGrid& b = grid_for(g / 2.0);
        const std::vector<double> va = interior_values(a);
        const std::vector<double> vb = interior_values(b);
        const double d = simd::kernels().max_abs_diff(va, vb);
        usup = std::max(usup, simd::kernels().max_abs(va));
        rep.rows.push_back({g, "cauchy_sup", d, 0.0, static_cast<long>(va.size())});
    }
    std::sort(rep.rows.begin(), rep.rows.end(),
              [](const SweepRow& a, const SweepRow& b) { return a.param < b.param; });

    const double noise_floor = 1e-11 * (1.0 + usup);
    if (std::all_of(rep.rows.begin(), rep.rows.end(),
                    [&](const SweepRow& r) { return r.mean <= noise_floor; })) {
        rep.pass = true;
        rep.verdict = "degenerate: below noise floor";
        rep.fit.degenerate = true;
        return rep;
    }

    std::vector<double> xs, ys;
    for (const auto& r : rep.rows) {
        xs.push_back(r.param);
        ys.push_back(r.mean);
    }
    rep.fit = fit_loglog(xs, ys, noise_floor);
    rep.pass = !rep.fit.degenerate && rep.fit.slope >= cfg.slope_min && rep.fit.r2 >= cfg.r2_min;
    rep.verdict = "cauchy slope " + fmt_double(rep.fit.slope) + ", r2 " + fmt_double(rep.fit.r2) +
                  (rep.pass ? " >= " : " below ") + fmt_double(cfg.slope_min);
    return rep;
}

SweepReport mollify_sweep(const GameSpec& spec, const MollifySweepConfig& cfg) {
    if (cfg.js.size() < 2) throw ConfigError("mollify_sweep: need at least 2 j values");
    if (!std::is_sorted(cfg.js.begin(), cfg.js.end()))
        throw ConfigError("mollify_sweep: j values must be increasing");

    SweepReport rep;
    const double lim = cfg.k - 2.0;
    std::vector<double> sup_errors;
    for (int j : cfg.js) {
        const MollifiedPayoffs mp = mollify_payoffs(spec, j, cfg.k, cfg.m);
        // Sup error over B_{k-2} against g truncated at m.
        double sup_err = 0.0;
        const int n = 4001;
        for (int i = 0; i < n; ++i) {
            const double x = -lim + 2.0 * lim * i / (n - 1);
            const std::span<const double> xs(&x, 1);
            const double target = std::min(spec.g_at(0.0, xs), static_cast<double>(cfg.m));
            sup_err = std::max(sup_err, std::abs(mp.g(0.0, xs) - target));
        }
        // FD gradient over B_{k-1} on a lattice 10x finer than the mollifier radius.
        double max_grad = 0.0;
        const double fd = 1.0 / (10.0 * j) / 10.0;
        const double glim = cfg.k - 1.0;
        const int ng = static_cast<int>(2.0 * glim / fd);
        for (int i = 0; i <= ng; ++i) {
            const double x = -glim + 2.0 * glim * i / ng;
            const double xp = x + fd, xm = x - fd;
            const double der = (mp.g(0.0, std::span<const double>(&xp, 1)) -
                                mp.g(0.0, std::span<const double>(&xm, 1))) /
                               (2.0 * fd);
            max_grad = std::max(max_grad, std::abs(der));
        }
        double fmin = mp.f(0.0);
        for (int i = 0; i <= 64; ++i) fmin = std::min(fmin, mp.f(spec.horizon * i / 64.0));

        rep.rows.push_back({static_cast<double>(j), "sup_error_Bkm2", sup_err, 0.0, n});
        rep.rows.push_back({static_cast<double>(j), "max_grad_ratio_Bkm1", max_grad / fmin, 0.0,
                            static_cast<long>(ng + 1)});
        sup_errors.push_back(sup_err);
    }

    bool nonincreasing = true;
    for (size_t i = 1; i < sup_errors.size(); ++i)
        if (sup_errors[i] > sup_errors[i - 1] + 1e-9) nonincreasing = false;
    const double final_bound = cfg.final_error_factor / cfg.js.back();
    const bool final_ok = sup_errors.back() <= final_bound;
    double worst_grad = 0.0;
    for (const auto& r : rep.rows)
        if (r.statistic == "max_grad_ratio_Bkm1") worst_grad = std::max(worst_grad, r.mean);
    const bool grad_ok = worst_grad <= 1.0 + cfg.grad_tol;

    rep.pass = nonincreasing && final_ok && grad_ok;
    rep.verdict = std::string(nonincreasing ? "sup error non-increasing" : "sup error increased") +
                  "; final " + fmt_double(sup_errors.back()) + (final_ok ? " <= " : " > ") +
                  fmt_double(final_bound) + "; max grad ratio " + fmt_double(worst_grad);
    return rep;
}

json LiminfReport::to_json() const {
    return {{"violation_fraction", violation_fraction}, {"n_paths", n_paths}, {"pass", pass}};
}

LiminfReport stopping_liminf_check(const GameSpec& spec, const LiminfConfig& cfg,
                                   const std::vector<const ValueGrid*>& grids,
                                   const ValueField& reference) {
    if (grids.size() != cfg.gamma_ks.size() || grids.empty())
        throw ConfigError("stopping_liminf_check: missing value grids for the gamma sequence");
    for (size_t i = 1; i < cfg.gamma_ks.size(); ++i)
        if (cfg.gamma_ks[i] >= cfg.gamma_ks[i - 1])
            throw ConfigError("stopping_liminf_check: gamma sequence must decrease");
    if (static_cast<int>(cfg.x0.size()) != spec.d)
        throw ConfigError("stopping_liminf_check: x0 dimension mismatch");

    const TimeGrid grid{spec.horizon, cfg.n_steps};
    const double slack = 2.0 * grid.dt();
    const size_t tail = std::min<size_t>(3, cfg.gamma_ks.size());

    CallableField gfield(
        [&spec](double t, std::span<const double> x) { return spec.g_at(t, x); });

    long violations = 0;
    for (long i = 0; i < cfg.n_paths; ++i) {
        const ControlPath control =
            build_control(cfg.control, spec, grid, cfg.seed, static_cast<uint64_t>(i), cfg.x0);
        const CoupledSample s = simulate_coupled(spec, control, cfg.seed, cfg.gamma_ks, cfg.x0,
                                                 static_cast<uint64_t>(i));
        const StopResult limit_stop = theta_star(reference, gfield, s.base, 0.0, cfg.tol);
        double min_tail = std::numeric_limits<double>::max();
        for (size_t k = cfg.gamma_ks.size() - tail; k < cfg.gamma_ks.size(); ++k) {
            GridField vf(*grids[k]);
            const StopResult st = theta_star(vf, gfield, s.perturbed[k].second, 0.0, cfg.tol);
            min_tail = std::min(min_tail, st.time);
        }
        if (min_tail < limit_stop.time - slack) ++violations;
    }

    LiminfReport rep;
    rep.n_paths = cfg.n_paths;
    rep.violation_fraction = cfg.n_paths ? static_cast<double>(violations) / cfg.n_paths : 0.0;
    rep.pass = rep.violation_fraction <= cfg.max_violation_frac;
    return rep;
}

json OptimalityReport::to_json() const {
    json j;
    j["min_gap"] = min_gap;
    j["pass"] = pass;
    json rows_j = json::array();
    for (const auto& r : rows)
        rows_j.push_back({{"control", r.control},
                          {"mean_payoff", r.mean},
                          {"stderr", r.stderr_},
                          {"nu_mean", r.nu_mean}});
    j["rows"] = rows_j;
    return j;
}

OptimalityReport optimality_gap_study(const GameSpec& spec, const ValueField& value,
                                      const std::vector<ControlFamily>& family,
                                      const OptimalityConfig& cfg) {
    if (family.size() < 10) throw ConfigError("optimality_gap_study: need a family of >= 10 controls");
    if (static_cast<int>(cfg.x0.size()) != spec.d)
        throw ConfigError("optimality_gap_study: x0 dimension mismatch");

    const TimeGrid grid{spec.horizon, cfg.n_steps};
    CallableField gfield(
        [&spec](double t, std::span<const double> x) { return spec.g_at(t, x); });
    const double class_bound = spec.profile.K2 * (1.0 + norm2(cfg.x0));

    OptimalityReport rep;
    rep.min_gap = std::numeric_limits<double>::max();
    double se_at_min = 0.0;
    for (const ControlFamily& fam : family) {
        RunningStat payoff_acc, nu_acc;
        for (long i = 0; i < cfg.n_paths; ++i) {
            const ControlPath control =
                build_control(fam, spec, grid, cfg.seed, static_cast<uint64_t>(i), cfg.x0);
            const BrownianDriver drv = BrownianDriver::generate(
                cfg.seed, static_cast<uint64_t>(i), grid.n_steps, grid.dt(), spec.d, spec.dprime);
            const CadlagPath path = simulate_controlled(spec, control, drv, 0.0, cfg.x0);
            const StopResult stop = theta_star(value, gfield, path, 0.0, cfg.tol);
            payoff_acc.add(evaluate_payoff(spec, path, control, stop.time, 0.0));
            nu_acc.add(control.total.back());
        }
        if (nu_acc.mean() > class_bound + 1e-9)
            throw ConfigError(std::string("control '") + control_family_name(fam) +
                              "' outside the admissible class: E[nu] = " +
                              std::to_string(nu_acc.mean()) + " > K2(1+|x|) = " +
                              std::to_string(class_bound));
        rep.rows.push_back({control_family_name(fam), payoff_acc.mean(), payoff_acc.stderr_(),
                            nu_acc.mean()});
        const double gap = payoff_acc.mean() - cfg.reference_value;
        if (gap < rep.min_gap) {
            rep.min_gap = gap;
            se_at_min = payoff_acc.stderr_();
        }
    }
    rep.pass = rep.min_gap >= -(2.0 * se_at_min + cfg.budget);
    return rep;
}

}  // namespace gamelab
