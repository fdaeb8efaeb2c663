#pragma once

// Command-line orchestration: config parsing and the subcommand entry
// points. The actual argv wiring lives in tools/; everything here is
// testable without a process boundary.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ticklab::cli {

struct RunConfig {
    std::string config_path; // key-value run config (extends session config)
    std::vector<std::string> inputs; // tick CSV paths
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    // analysis selection; empty means everything
    std::vector<std::string> sections;
};

// Exit codes: 0 success, 2 missing input file, 1 anything else.
int cmd_analyze(const RunConfig& cfg);
int cmd_synth(const RunConfig& cfg);
int cmd_mps(const RunConfig& cfg, double cost_dollars, double step_value,
            const std::string& costs_csv, bool single_episode);
int cmd_fit_volume(const RunConfig& cfg, const std::string& obs_path, double C,
                   double L, bool cumulative);
int cmd_fit_ranks(const RunConfig& cfg, const std::string& ranks_path,
                  bool weighted, bool tied_intercept,
                  const std::string& exclude_csv);
int cmd_depstats(const RunConfig& cfg);

// Round to 9 significant digits; applied to every float written to JSON so
// reruns are byte-identical.
double json_num(double x);

} // namespace ticklab::cli
