#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace gamelab {

// Exit codes shared by the CLI and the experiment layer.
enum ExitCode : int {
    exit_pass = 0,
    exit_error = 1,      // execution failure (I/O, numerics)
    exit_verdict = 2,    // ran fine, a check failed
    exit_bad_config = 3  // malformed config or violated pre-condition
};

struct RunOptions {
    std::string command;      // simulate | solve-vi | sweep-gamma | sweep-mollify |
                              // study-rate | study-optimality | validate | report
    std::string config_path;  // required except for report
    std::string out_dir = ".";
    std::optional<uint64_t> seed_override;
    int threads = 1;
    std::vector<std::string> report_inputs;  // verdict JSONs for report
};

// FNV-1a over the canonical (sorted-key, no-whitespace) serialization.
uint64_t config_hash(const nlohmann::json& config);

// Write-then-rename so a crash never leaves a truncated artifact.
void atomic_write(const std::string& path, const std::string& content);

// Dispatch one subcommand; returns the process exit code. Artifacts land in
// opts.out_dir; every verdict JSON embeds the config hash and the seed used.
int run_command(const RunOptions& opts);

}  // namespace gamelab
