#pragma once

#include <optional>
#include <string>
#include <vector>

#include "znl/config.hpp"
#include "znl/measures.hpp"

namespace znl::cli {

// Exit codes: 0 success, 1 config error, 2 numerical failure, 3 check failed.
enum ExitCode { kOk = 0, kConfigError = 1, kNumericalError = 2, kCheckFailed = 3 };

struct CliOptions {
    std::vector<std::string> sets;  // repeated --set dotted.key=value
    std::string out_dir;            // --out override
    std::optional<std::uint64_t> seed;
    int threads = 0;
};

const std::vector<std::string>& subcommand_names();

// Runs one subcommand against a raw (unvalidated) config object, writing its
// tables and the run manifest into the output directory.
int run_subcommand(const std::string& name, const Json& raw_config, const CliOptions& options);

// Writes the per-epsilon histograms, sweep summary, candidate table, and a
// deterministic flow overlay for a finished sweep.
void emit_plotdata(const measures::SweepReport& report, const dynamics::CandidateSet& candidates,
                   const std::vector<Vec>& flow_samples, const std::string& directory);

}  // namespace znl::cli
