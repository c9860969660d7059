#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gamelab/experiment.hpp"
#include "gamelab/simd.hpp"

int main(int argc, char** argv) {
    CLI::App app{"gamelab: singular control vs stopping, simulation and VI solver"};
    app.require_subcommand(1);

    gamelab::RunOptions opts;
    opts.threads = 0;

    std::string config, out = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", config, "JSON config file");
        if (needs_config) c->required();
        sub->add_option("--out", out, "output directory for artifacts");
        sub->add_option("--seed", seed, "override the config seed")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--threads", threads, "worker threads (default: GAMELAB_THREADS or 1)");
    };

    const char* names[] = {"simulate", "solve-vi",   "sweep-gamma",      "sweep-mollify",
                           "study-rate", "study-optimality", "validate"};
    for (const char* n : names) add_common(app.add_subcommand(n), true);

    auto* rep = app.add_subcommand("report", "merge verdict JSONs into one report");
    add_common(rep, false);
    std::vector<std::string> inputs;
    rep->add_option("inputs", inputs, "verdict JSON files to merge");

    CLI11_PARSE(app, argc, argv);

    opts.command = app.get_subcommands().front()->get_name();
    opts.config_path = config;
    opts.out_dir = out;
    if (seed_set) opts.seed_override = seed;
    opts.report_inputs = inputs;

    if (threads > 0) {
        opts.threads = threads;
    } else if (const char* env = std::getenv("GAMELAB_THREADS")) {
        opts.threads = std::max(1, std::atoi(env));
    } else {
        opts.threads = 1;
    }

    return gamelab::run_command(opts);
}
