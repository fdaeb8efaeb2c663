// ticklab: lattice tick data analysis, synthesis and fitting.

#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ticklab/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"lattice tick series analysis and synthesis"};
    app.require_subcommand(1);

    ticklab::cli::RunConfig cfg;
    std::uint64_t seed = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* sub, bool with_inputs) {
        sub->add_option("--config", cfg.config_path, "run config file")
            ->required();
        if (with_inputs)
            sub->add_option("--input", cfg.inputs, "tick CSV file(s)")
                ->required()
                ->expected(-1);
        sub->add_option("--out", cfg.out_dir, "output directory")->required();
    };

    auto* analyze = app.add_subcommand("analyze", "full analysis of tick CSVs");
    add_common(analyze, true);
    analyze->add_option("--section", cfg.sections,
                        "restrict to sections (moments, ranks, mps, depstats, "
                        "extremes, logreturns, value_area)");

    auto* synth = app.add_subcommand("synth", "generate synthetic sessions");
    add_common(synth, false);
    synth->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { seed_set = true; });

    auto* mps = app.add_subcommand("mps", "maximum-profit strategies");
    add_common(mps, true);
    double cost = 0.0, step_value = 12.50;
    std::string costs_csv;
    bool single_episode = false;
    mps->add_option("--cost", cost, "per-transaction cost, currency units");
    mps->add_option("--step-value", step_value, "value of one lattice step");
    mps->add_option("--costs", costs_csv, "comma-separated cost sweep");
    mps->add_flag("--single-episode", single_episode,
                  "restrict to one in-market episode");

    auto* fitv = app.add_subcommand("fit-volume", "fit the daily volume curve");
    double fit_C = 1.0, fit_L = 0.0;
    bool cumulative = false;
    std::string obs_path;
    fitv->add_option("--observations", obs_path,
                     "TSV of (day index, volume) rows")
        ->required();
    fitv->add_option("--out", cfg.out_dir, "output directory")->required();
    fitv->add_option("--start-exponent", fit_C, "fixed early-growth exponent C");
    fitv->add_option("--lifespan", fit_L, "contract lifespan in days")
        ->required();
    fitv->add_flag("--cumulative", cumulative,
                   "observations are cumulative totals");

    auto* fitr = app.add_subcommand("fit-ranks", "fit the rank frequency law");
    std::string ranks_path, exclude_csv;
    bool weighted = false, free_intercept = false;
    fitr->add_option("--ranks", ranks_path, "TSV of (rank, count) rows")
        ->required();
    fitr->add_option("--out", cfg.out_dir, "output directory")->required();
    fitr->add_flag("--weighted", weighted, "weight points by frequency");
    fitr->add_flag("--free-intercept", free_intercept,
                   "fit the intercept instead of tying it to the normalizer");
    fitr->add_option("--exclude", exclude_csv, "comma-separated ranks to skip");

    auto* dep = app.add_subcommand("depstats",
                                   "waiting-time/increment dependence report");
    add_common(dep, true);

    CLI11_PARSE(app, argc, argv);

    if (seed_set) cfg.seed = seed;

    if (analyze->parsed()) return ticklab::cli::cmd_analyze(cfg);
    if (synth->parsed()) return ticklab::cli::cmd_synth(cfg);
    if (mps->parsed())
        return ticklab::cli::cmd_mps(cfg, cost, step_value, costs_csv,
                                     single_episode);
    if (fitv->parsed())
        return ticklab::cli::cmd_fit_volume(cfg, obs_path, fit_C, fit_L,
                                            cumulative);
    if (fitr->parsed())
        return ticklab::cli::cmd_fit_ranks(cfg, ranks_path, weighted,
                                           !free_intercept, exclude_csv);
    if (dep->parsed()) return ticklab::cli::cmd_depstats(cfg);
    return 1;
}
