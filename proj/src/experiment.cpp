#include "gamelab/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gamelab/assumptions.hpp"
#include "gamelab/csv.hpp"
#include "gamelab/mollify.hpp"
#include "gamelab/payoff.hpp"
#include "gamelab/sde.hpp"
#include "gamelab/stopper.hpp"
#include "gamelab/sweeps.hpp"
#include "gamelab/vi_solver.hpp"

namespace gamelab {

namespace fs = std::filesystem;
using nlohmann::json;

uint64_t config_hash(const json& config) {
    const std::string canon = config.dump();  // nlohmann keeps object keys sorted
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw NumericError("cannot open " + tmp + " for writing");
        os << content;
        if (!os.flush()) throw NumericError("write failed: " + tmp);
    }
    fs::rename(tmp, path);
}

namespace {

std::string hash_hex(uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON in ") + path + ": " + e.what());
    }
}

template <typename T>
T field(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <typename T>
T field_or(const json& j, const std::string& key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

ControlFamily parse_control(const json& j) {
    const std::string name = field<std::string>(j, "family", "control");
    auto dir = [&]() { return field<std::vector<double>>(j, "direction", "control"); };
    if (name == "zero") return ZeroControl{};
    if (name == "constant_density")
        return ConstantDensity{field<double>(j, "rate", "control"), dir()};
    if (name == "jump_at")
        return JumpAt{field<double>(j, "time", "control"), field<double>(j, "size", "control"),
                      dir()};
    if (name == "reflect_at") return ReflectAt{field<double>(j, "barrier", "control"), dir()};
    if (name == "threshold_push")
        return ThresholdPush{field<double>(j, "level", "control"),
                             field<double>(j, "size", "control"), dir()};
    throw ConfigError("control: unknown family '" + name + "'");
}

GridParams parse_grid(const json& j) {
    GridParams gp;
    gp.x_min = field<double>(j, "x_min", "grid");
    gp.x_max = field<double>(j, "x_max", "grid");
    gp.n_x = field<int>(j, "n_x", "grid");
    gp.n_t = field<int>(j, "n_t", "grid");
    gp.boundary_layer_frac = field_or(j, "boundary_layer_frac", 0.1);
    if (gp.x_max <= gp.x_min || gp.n_x < 8 || gp.n_t < 2)
        throw ConfigError("grid: need x_max > x_min, n_x >= 8, n_t >= 2");
    return gp;
}

PenaltySchedule parse_schedule(const json& j) {
    PenaltySchedule ps;
    if (j.contains("eps_obstacle")) ps.eps_obstacle = j.at("eps_obstacle").get<std::vector<double>>();
    if (j.contains("eps_gradient")) ps.eps_gradient = j.at("eps_gradient").get<std::vector<double>>();
    ps.max_outer = field_or(j, "max_outer", 200);
    ps.newton_tol = field_or(j, "newton_tol", 1e-10);
    ps.validate();
    return ps;
}

struct Ctx {
    json config;
    GameSpec spec;
    std::string out_dir;
    uint64_t hash = 0;
    uint64_t seed = 0;
    int threads = 1;
};

void write_verdict(const Ctx& ctx, const std::string& name, json body, bool pass) {
    body["command"] = name;
    body["config_hash"] = hash_hex(ctx.hash);
    body["seed"] = ctx.seed;
    body["pass"] = pass;
    atomic_write(ctx.out_dir + "/" + name + "_verdict.json", body.dump(2) + "\n");
}

int cmd_simulate(const Ctx& ctx) {
    const json& sim = ctx.config.at("simulate");
    const auto gammas = field<std::vector<double>>(sim, "gammas", "simulate");
    const long n_paths = field_or<long>(sim, "n_paths", 100);
    const int n_steps = field_or(sim, "n_steps", 1000);
    const auto x0 = field<std::vector<double>>(sim, "x0", "simulate");
    const double p = field_or(sim, "p", 1.0);
    const ControlFamily fam =
        sim.contains("control") ? parse_control(sim.at("control")) : ControlFamily{ZeroControl{}};
    if (gammas.empty() || n_paths < 1) throw ConfigError("simulate: need gammas and n_paths >= 1");

    const TimeGrid grid{ctx.spec.horizon, n_steps};
    std::vector<CoupledSample> samples;
    samples.reserve(n_paths);
    for (long i = 0; i < n_paths; ++i) {
        ControlPath control;
        if (std::holds_alternative<ReflectAt>(fam) || std::holds_alternative<ThresholdPush>(fam)) {
            const BrownianDriver drv = BrownianDriver::generate(
                ctx.seed, static_cast<uint64_t>(i), n_steps, grid.dt(), ctx.spec.d, ctx.spec.dprime);
            const CadlagPath ref =
                simulate_controlled(ctx.spec, ControlPath::zero(grid, ctx.spec.d), drv, 0.0, x0);
            control = make_control(fam, grid, ctx.spec.d, ref);
        } else {
            control = make_control(fam, grid, ctx.spec.d);
        }
        samples.push_back(
            simulate_coupled(ctx.spec, control, ctx.seed, gammas, x0, static_cast<uint64_t>(i)));
    }

    std::ostringstream csv;
    csv << "gamma,statistic,mean,stderr,n\n";
    json stats = json::array();
    for (double g : gammas) {
        const MeanStderr sup = moment_estimate(samples, g, p, PathStatistic::sup_distance);
        const MeanStderr term = moment_estimate(samples, g, p, PathStatistic::terminal_norm);
        csv << fmt_double(g) << ",sup_distance," << fmt_double(sup.mean) << ','
            << fmt_double(sup.stderr_) << ',' << sup.n << "\n";
        csv << fmt_double(g) << ",terminal_norm," << fmt_double(term.mean) << ','
            << fmt_double(term.stderr_) << ',' << term.n << "\n";
        stats.push_back({{"gamma", g},
                         {"sup_distance", {{"mean", sup.mean}, {"stderr", sup.stderr_}}},
                         {"terminal_norm", {{"mean", term.mean}, {"stderr", term.stderr_}}}});
    }
    atomic_write(ctx.out_dir + "/simulate_summary.csv", csv.str());

    std::ostringstream path_csv;
    samples.front().base.write_csv(path_csv);
    atomic_write(ctx.out_dir + "/simulate_path0.csv", path_csv.str());

    write_verdict(ctx, "simulate",
                  {{"n_paths", n_paths}, {"n_steps", n_steps}, {"p", p}, {"statistics", stats}},
                  true);
    return exit_pass;
}

int cmd_solve_vi(const Ctx& ctx) {
    const json& sv = ctx.config.at("solve_vi");
    const double gamma = field<double>(sv, "gamma", "solve_vi");
    const GridParams gp = parse_grid(sv.at("grid"));
    const PenaltySchedule ps =
        sv.contains("schedule") ? parse_schedule(sv.at("schedule")) : PenaltySchedule{};

    SolveDiagnostics diag;
    ValueGrid vg = solve_vi(ctx.spec, gamma, gp, ps, &diag);
    const ResidualSummary res = vi_residual(vg, ctx.spec, gamma);
    const GradientReport grad = gradient_bound_check(vg, ctx.spec, field_or(sv, "grad_tol", 0.02));

    json header = {{"config_hash", hash_hex(ctx.hash)}, {"seed", ctx.seed}};
    vg.save_bundle(ctx.out_dir, "value", header);

    bool pass = grad.pass;
    json body = {{"gamma", gamma},
                 {"residual", {{"max_interior", res.max_interior}, {"p99_interior", res.p99_interior}}},
                 {"gradient", {{"max_ratio", grad.max_ratio}, {"tol", grad.tol}, {"pass", grad.pass}}},
                 {"newton_iterations", diag.newton_iterations},
                 {"damping_events", diag.damping_events}};
    if (sv.contains("residual_tol")) {
        const double rt = sv.at("residual_tol").get<double>();
        body["residual_tol"] = rt;
        pass = pass && res.max_interior <= rt;
    }
    write_verdict(ctx, "solve_vi", body, pass);
    return pass ? exit_pass : exit_verdict;
}

int cmd_sweep_gamma(const Ctx& ctx) {
    const json& sw = ctx.config.at("sweep_gamma");
    GammaSweepConfig cfg;
    cfg.gammas = field<std::vector<double>>(sw, "gammas", "sweep_gamma");
    cfg.n_paths = field<long>(sw, "n_paths", "sweep_gamma");
    cfg.p = field_or(sw, "p", 1.0);
    cfg.seed = ctx.seed;
    cfg.n_steps = field_or(sw, "n_steps", 1000);
    cfg.x0 = field<std::vector<double>>(sw, "x0", "sweep_gamma");
    if (sw.contains("control")) cfg.control = parse_control(sw.at("control"));
    cfg.threads = ctx.threads;

    const SweepReport rep = gamma_sweep(ctx.spec, cfg);
    std::ostringstream csv;
    rep.write_csv(csv);
    atomic_write(ctx.out_dir + "/sweep_gamma.csv", csv.str());
    write_verdict(ctx, "sweep_gamma", rep.verdict_json(), rep.pass);
    return rep.pass ? exit_pass : exit_verdict;
}

int cmd_sweep_mollify(const Ctx& ctx) {
    const json& sw = ctx.config.at("sweep_mollify");
    MollifySweepConfig cfg;
    cfg.js = field<std::vector<int>>(sw, "js", "sweep_mollify");
    cfg.k = field_or(sw, "k", 4);
    cfg.m = field_or(sw, "m", 4);
    cfg.grad_tol = field_or(sw, "grad_tol", 1e-3);
    cfg.final_error_factor = field_or(sw, "final_error_factor", 0.6);

    const SweepReport rep = mollify_sweep(ctx.spec, cfg);
    std::ostringstream csv;
    rep.write_csv(csv);
    atomic_write(ctx.out_dir + "/sweep_mollify.csv", csv.str());
    write_verdict(ctx, "sweep_mollify", rep.verdict_json(), rep.pass);
    return rep.pass ? exit_pass : exit_verdict;
}

int cmd_study_rate(const Ctx& ctx) {
    const json& st = ctx.config.at("study_rate");
    RateStudyConfig cfg;
    cfg.gammas = field<std::vector<double>>(st, "gammas", "study_rate");
    cfg.grid = parse_grid(st.at("grid"));
    if (st.contains("schedule")) cfg.schedule = parse_schedule(st.at("schedule"));
    cfg.threads = ctx.threads;
    cfg.slope_min = field_or(st, "slope_min", 0.8);
    cfg.r2_min = field_or(st, "r2_min", 0.0);

    const SweepReport rep = value_rate_study(ctx.spec, cfg);
    std::ostringstream csv;
    rep.write_csv(csv);
    atomic_write(ctx.out_dir + "/study_rate.csv", csv.str());
    write_verdict(ctx, "study_rate", rep.verdict_json(), rep.pass);
    return rep.pass ? exit_pass : exit_verdict;
}

int cmd_study_optimality(const Ctx& ctx) {
    const json& st = ctx.config.at("study_optimality");
    const double gamma = field<double>(st, "gamma", "study_optimality");
    const GridParams gp = parse_grid(st.at("grid"));
    const PenaltySchedule ps =
        st.contains("schedule") ? parse_schedule(st.at("schedule")) : PenaltySchedule{};

    OptimalityConfig cfg;
    cfg.n_paths = field_or<long>(st, "n_paths", 1000);
    cfg.seed = ctx.seed;
    cfg.n_steps = field_or(st, "n_steps", 1000);
    cfg.x0 = field<std::vector<double>>(st, "x0", "study_optimality");
    cfg.tol = field_or(st, "tol", 1e-3);
    cfg.budget = field_or(st, "budget", 0.0);

    std::vector<ControlFamily> family;
    for (const json& cj : st.at("controls")) family.push_back(parse_control(cj));

    const ValueGrid vg = solve_vi(ctx.spec, gamma, gp, ps);
    GridField value(vg);
    cfg.reference_value = vg.interp(0.0, cfg.x0.at(0));

    const OptimalityReport rep = optimality_gap_study(ctx.spec, value, family, cfg);
    json body = rep.to_json();
    body["gamma"] = gamma;
    body["reference_value"] = cfg.reference_value;
    write_verdict(ctx, "study_optimality", body, rep.pass);
    return rep.pass ? exit_pass : exit_verdict;
}

int cmd_validate(const Ctx& ctx) {
    const json& va = ctx.config.contains("validate") ? ctx.config.at("validate") : json::object();
    const int n_points = field_or(va, "n_points", 512);
    const double box = field_or(va, "box", 2.0);
    if (box <= 0.0) throw ConfigError("validate.box: need a positive half-width");
    const auto pts = sample_box(ctx.spec.d, box, n_points, ctx.seed);

    const AssumptionReport rep = validate_assumptions(ctx.spec, pts);
    write_verdict(ctx, "validate", rep.to_json(), rep.conforming);
    return rep.conforming ? exit_pass : exit_verdict;
}

int cmd_report(const RunOptions& opts) {
    if (opts.report_inputs.empty())
        throw ConfigError("report: pass at least one verdict JSON as input");
    json entries = json::array();
    bool all_pass = true;
    for (const std::string& path : opts.report_inputs) {
        const json v = load_json(path);
        for (const char* key : {"command", "config_hash", "seed", "pass"})
            if (!v.contains(key))
                throw ConfigError("report: " + path + " is missing field '" + key + "'");
        const bool pass = v.at("pass").get<bool>();
        all_pass = all_pass && pass;
        entries.push_back({{"file", fs::path(path).filename().string()},
                           {"command", v.at("command")},
                           {"config_hash", v.at("config_hash")},
                           {"seed", v.at("seed")},
                           {"pass", pass}});
    }
    json rep = {{"command", "report"}, {"inputs", entries}, {"pass", all_pass}};
    rep["report_hash"] = hash_hex(config_hash(entries));
    atomic_write(opts.out_dir + "/report.json", rep.dump(2) + "\n");
    return all_pass ? exit_pass : exit_verdict;
}

}  // namespace

int run_command(const RunOptions& opts) {
    try {
        fs::create_directories(opts.out_dir);
        if (opts.command == "report") return cmd_report(opts);

        Ctx ctx;
        ctx.config = load_json(opts.config_path);
        if (!ctx.config.contains("spec")) throw ConfigError("config: missing 'spec' section");
        ctx.spec = GameSpec::from_json(ctx.config.at("spec"));
        ctx.spec.validate();
        ctx.out_dir = opts.out_dir;
        ctx.hash = config_hash(ctx.config);
        ctx.seed = opts.seed_override ? *opts.seed_override
                                      : field_or<uint64_t>(ctx.config, "seed", 1);
        ctx.threads = opts.threads;

        auto section = [&](const char* key) {
            if (!ctx.config.contains(key))
                throw ConfigError(std::string("config: missing '") + key + "' section");
        };
        if (opts.command == "simulate") {
            section("simulate");
            return cmd_simulate(ctx);
        }
        if (opts.command == "solve-vi") {
            section("solve_vi");
            return cmd_solve_vi(ctx);
        }
        if (opts.command == "sweep-gamma") {
            section("sweep_gamma");
            return cmd_sweep_gamma(ctx);
        }
        if (opts.command == "sweep-mollify") {
            section("sweep_mollify");
            return cmd_sweep_mollify(ctx);
        }
        if (opts.command == "study-rate") {
            section("study_rate");
            return cmd_study_rate(ctx);
        }
        if (opts.command == "study-optimality") {
            section("study_optimality");
            return cmd_study_optimality(ctx);
        }
        if (opts.command == "validate") return cmd_validate(ctx);
        throw ConfigError("unknown command '" + opts.command + "'");
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_bad_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_error;
    }
}

}  // namespace gamelab
