#include "ticklab/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ticklab/depstats.hpp"
#include "ticklab/extremes.hpp"
#include "ticklab/latticedist.hpp"
#include "ticklab/lifecurve.hpp"
#include "ticklab/moments.hpp"
#include "ticklab/mps.hpp"
#include "ticklab/synth.hpp"
#include "ticklab/tickstore.hpp"

namespace ticklab::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

double json_num(double x) {
    if (!std::isfinite(x)) return x;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return std::strtod(buf, nullptr);
}

namespace {

// run-file settings on top of the tickstore session config
struct RunFile {
    tickstore::SessionConfig session;
    double chi2_level = 0.005;
    std::size_t return_classes = 0; // 0 disables the log-return section
    double value_area_fraction = 0.15;
    double step_value = 12.50;
    double mps_cost = 0.0;
    std::vector<double> mps_costs;
    std::size_t dep_slice_width = 10;
    std::size_t dep_min_slice = 3;
    double dloglog_baseline = 0.0; // 0: use the a=0 slice variance

    synth::GeneratorSpec gen;
    bool has_gen = false;
    double gen_settle = 0.0, gen_limit = 0.0, gen_start_price = 0.0;
    long long synth_days = 0;
};

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

RunFile parse_run_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw tickstore::ParseError("cannot open config " + path);
    RunFile rf;
    std::string line;
    std::size_t lineno = 0;
    std::ostringstream session_part;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw tickstore::ParseError("config line " +
                                            std::to_string(lineno) +
                                            ": expected key = value");
            continue;
        }
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(val);
        const auto diag = [&](const std::string& msg) {
            return tickstore::ParseError("config line " + std::to_string(lineno) +
                                         ": " + msg);
        };

        if (key == "delta" || key == "range" || key == "limit") {
            session_part << key << " = " << val << '\n';
        } else if (key == "chi2_level") {
            rf.chi2_level = std::stod(val);
        } else if (key == "return_classes") {
            rf.return_classes = std::stoul(val);
        } else if (key == "value_area_fraction") {
            rf.value_area_fraction = std::stod(val);
        } else if (key == "step_value") {
            rf.step_value = std::stod(val);
        } else if (key == "mps_cost") {
            rf.mps_cost = std::stod(val);
        } else if (key == "mps_costs") {
            for (const auto& t : split_ws(val)) rf.mps_costs.push_back(std::stod(t));
        } else if (key == "dep_slice_width") {
            rf.dep_slice_width = std::stoul(val);
        } else if (key == "dep_min_slice") {
            rf.dep_min_slice = std::stoul(val);
        } else if (key == "dloglog_baseline") {
            rf.dloglog_baseline = std::stod(val);
        } else if (key == "synth_law") {
            const auto t = split_ws(val);
            if (t.size() != 3) throw diag("synth_law wants 'Q S p_up'");
            rf.gen.hz_Q = std::stod(t[0]);
            rf.gen.hz_S = std::stod(t[1]);
            rf.gen.p_up = std::stod(t[2]);
            rf.has_gen = true;
        } else if (key == "synth_kuma") {
            const auto t = split_ws(val);
            if (t.size() != 5) throw diag("synth_kuma wants 'a b z_min z_max F0'");
            rf.gen.waiting = {std::stod(t[0]), std::stod(t[1]), std::stod(t[2]),
                              std::stod(t[3]), std::stod(t[4])};
        } else if (key == "synth_curve") {
            const auto t = split_ws(val);
            if (t.size() != 5) throw diag("synth_curve wants 'A B C D L'");
            rf.gen.curve = {std::stod(t[0]), std::stod(t[1]), std::stod(t[2]),
                            std::stod(t[3]), std::stod(t[4])};
        } else if (key == "synth_band") {
            const auto t = split_ws(val);
            if (t.size() != 3)
                throw diag("synth_band wants 'settle limit start_price'");
            rf.gen_settle = std::stod(t[0]);
            rf.gen_limit = std::stod(t[1]);
            rf.gen_start_price = std::stod(t[2]);
        } else if (key == "synth_mean_size") {
            rf.gen.mean_tick_size = std::stod(val);
        } else if (key == "synth_days") {
            rf.synth_days = std::stoll(val);
        } else if (key == "synth_start_date") {
            rf.gen.start_date = val;
        } else if (key == "synth_seed") {
            rf.gen.seed = std::stoull(val);
        } else {
            throw diag("unknown key '" + key + "'");
        }
    }
    std::istringstream sp(session_part.str());
    rf.session = tickstore::parse_session_config(sp);
    rf.gen.lattice = rf.session.lattice;
    return rf;
}

int missing_input(const std::string& path) {
    std::cerr << "missing input file: " << path << "\n";
    return 2;
}

ordered_json moments_json(const moments::MomentSummary& m) {
    ordered_json j;
    j["n"] = m.n;
    j["mean"] = json_num(m.mean);
    j["min"] = json_num(m.min);
    j["max"] = json_num(m.max);
    j["n_min"] = m.n_min;
    j["n_max"] = m.n_max;
    if (m.mu2) j["variance"] = json_num(*m.mu2);
    if (m.stddev) j["stddev"] = json_num(*m.stddev);
    if (m.skewness) j["skewness"] = json_num(*m.skewness);
    if (m.excess_kurtosis) j["excess_kurtosis"] = json_num(*m.excess_kurtosis);
    return j;
}

ordered_json ols_json(const moments::OlsFit& f) {
    ordered_json j;
    j["slope"] = json_num(f.slope);
    j["slope_half_width"] = json_num(f.slope_half_width);
    if (f.intercept) {
        j["intercept"] = json_num(*f.intercept);
        j["intercept_half_width"] = json_num(*f.intercept_half_width);
    }
    j["r"] = json_num(f.r);
    j["n"] = f.n;
    j["dof"] = f.dof;
    j["confidence"] = json_num(f.confidence);
    return j;
}

ordered_json zeta_fit_json(const latticedist::ZetaLawFit& f) {
    ordered_json j;
    j["S"] = json_num(f.S);
    j["Q"] = json_num(f.Q);
    j["slope"] = json_num(f.slope);
    j["intercept"] = json_num(f.intercept);
    j["objective"] = json_num(f.objective);
    j["weighted"] = f.weighted;
    j["intercept_mode"] =
        f.mode == latticedist::InterceptMode::TiedNormalizer ? "tied" : "free";
    return j;
}

void write_text(const fs::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << body;
}

void write_json(const fs::path& p, const ordered_json& j) {
    write_text(p, j.dump(2) + "\n");
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::vector<tickstore::SessionRange> load_sessions(const RunConfig& cfg,
                                                   const RunFile& rf,
                                                   tickstore::ParseStats* stats) {
    std::vector<tickstore::SessionRange> all;
    tickstore::ParseStats total;
    for (const auto& input : cfg.inputs) {
        std::ifstream in(input);
        tickstore::ParseStats st;
        auto part = tickstore::parse_ticks(in, rf.session, &st);
        total.lines += st.lines;
        total.parsed += st.parsed;
        total.dropped_zero += st.dropped_zero;
        total.dropped_range += st.dropped_range;
        for (auto& s : part) all.push_back(std::move(s));
    }
    std::sort(all.begin(), all.end(),
              [](const auto& l, const auto& r) { return l.id() < r.id(); });
    if (stats) *stats = total;
    return all;
}

std::string gnuplot_stub() {
    return
        "# gnuplot script stub for the emitted TSV data\n"
        "set datafile separator '\\t'\n"
        "set terminal pngcairo size 1000,700\n"
        "set output 'ranks_bilog.png'\n"
        "plot 'ranks_bilog.tsv' using 1:2 with points title 'ln f vs ln(k+Q)', \\\n"
        "     'ranks_bilog.tsv' using 1:3 with lines title 'fit'\n"
        "set output 'epmf_union.png'\n"
        "plot 'epmf_union.tsv' using 1:2 with impulses title 'extreme EPMF'\n"
        "set output 'variance_slices.png'\n"
        "plot 'variance_slices.tsv' using 1:5 with points title 'var(b|a)'\n";
}

} // namespace

int cmd_analyze(const RunConfig& cfg) {
    try {
        if (!fs::exists(cfg.config_path)) return missing_input(cfg.config_path);
        for (const auto& p : cfg.inputs)
            if (!fs::exists(p)) return missing_input(p);
        if (cfg.inputs.empty()) {
            std::cerr << "analyze: no input files given\n";
            return 1;
        }
        const RunFile rf = parse_run_file(cfg.config_path);
        fs::create_directories(cfg.out_dir);
        const fs::path out(cfg.out_dir);

        auto want = [&](const std::string& section) {
            return cfg.sections.empty() ||
                   std::find(cfg.sections.begin(), cfg.sections.end(), section) !=
                       cfg.sections.end();
        };

        tickstore::ParseStats stats;
        const auto sessions = load_sessions(cfg, rf, &stats);
        if (sessions.empty()) {
            std::cerr << "analyze: no sessions found in inputs\n";
            return 1;
        }

        ordered_json rep;
        rep["schema_version"] = 1;
        rep["parse"] = {{"lines", stats.lines},
                        {"ticks", stats.parsed},
                        {"dropped_zero_size", stats.dropped_zero},
                        {"dropped_out_of_range", stats.dropped_range}};

        // per-session table plus pooled increment pools
        std::vector<long long> pooled_b;
        std::vector<double> pooled_a;
        std::vector<std::pair<long long, long long>> pooled_ab;
        std::vector<std::pair<std::string, std::vector<long long>>> b_by_session;
        std::vector<std::pair<std::vector<long long>, double>> mp_sessions;
        ordered_json sess_arr = ordered_json::array();
        std::ostringstream series_tsv;
        series_tsv << "session\tindex\ttimestamp\tprice\tsize\n";
        for (const auto& s : sessions) {
            const auto inc = tickstore::increments(s);
            ordered_json js;
            js["id"] = s.id();
            js["ticks"] = s.ticks.size();
            js["volume"] = s.volume();
            if (!s.ticks.empty()) {
                js["first"] = tickstore::format_timestamp(s.ticks.front().ts);
                js["last"] = tickstore::format_timestamp(s.ticks.back().ts);
            }
            if (!inc.b.empty()) {
                std::vector<double> bd(inc.b.begin(), inc.b.end());
                std::vector<double> ad(inc.a.begin(), inc.a.end());
                js["b_moments"] = moments_json(moments::sample_moments(bd));
                js["a_moments"] = moments_json(moments::sample_moments(ad));
                const auto ident = moments::price_mean_identities(
                    s.ticks.front().m, inc.b);
                js["mean_identities_exact"] = ident.exact;
            }
            // value area over the traded-volume histogram
            if (want("value_area") && !s.ticks.empty()) {
                std::map<long long, std::uint64_t> hist;
                for (const auto& t : s.ticks) hist[t.m] += t.size;
                std::vector<std::pair<long long, std::uint64_t>> hv(hist.begin(),
                                                                    hist.end());
                const auto va = moments::value_area(hv, rf.value_area_fraction);
                js["value_area"] = {{"left", va.left},
                                    {"right", va.right},
                                    {"mean_level", json_num(va.mean_level)}};
            }
            // rank window inside the limit band, when one is configured
            const auto lim = rf.session.limits.find(s.date);
            if (lim != rf.session.limits.end() && !s.ticks.empty()) {
                const auto band =
                    tickstore::make_band(rf.session.lattice, lim->second);
                const auto [kmin, kmax] =
                    tickstore::limit_ranks(band, s.ticks.back().m);
                js["limit_ranks"] = {{"k_min", kmin}, {"k_max", kmax}};
            }
            sess_arr.push_back(js);

            for (std::size_t i = 0; i < s.ticks.size(); ++i)
                series_tsv << s.id() << '\t' << i << '\t'
                           << tickstore::format_timestamp(s.ticks[i].ts) << '\t'
                           << rf.session.lattice.to_price(s.ticks[i].m) << '\t'
                           << s.ticks[i].size << '\n';

            pooled_b.insert(pooled_b.end(), inc.b.begin(), inc.b.end());
            for (std::size_t i = 0; i < inc.a.size(); ++i) {
                pooled_a.push_back(static_cast<double>(inc.a[i]));
                pooled_ab.emplace_back(inc.a[i], inc.b[i]);
            }
            b_by_session.emplace_back(s.id(), inc.b);
            std::vector<long long> prices;
            prices.reserve(s.ticks.size());
            for (const auto& t : s.ticks) prices.push_back(t.m);
            mp_sessions.emplace_back(std::move(prices),
                                     static_cast<double>(s.volume()));
        }
        rep["sessions"] = sess_arr;
        write_text(out / "series.tsv", series_tsv.str());

        if (want("moments") && !pooled_b.empty()) {
            std::vector<double> bd(pooled_b.begin(), pooled_b.end());
            rep["pooled"] = {{"b_moments", moments_json(moments::sample_moments(bd))},
                             {"a_moments",
                              moments_json(moments::sample_moments(pooled_a))}};
        }

        // log returns per session label, concatenating that label's prices
        if (want("logreturns") && rf.return_classes >= 2) {
            ordered_json lr = ordered_json::array();
            std::map<std::string, std::vector<long long>> by_label;
            for (const auto& s : sessions)
                for (const auto& t : s.ticks) by_label[s.label].push_back(t.m);
            for (const auto& [label, prices] : by_label) {
                if (prices.size() < rf.return_classes * 3) continue;
                std::vector<double> rets;
                for (std::size_t i = 1; i < prices.size(); ++i)
                    rets.push_back(std::log(static_cast<double>(prices[i])) -
                                   std::log(static_cast<double>(prices[i - 1])));
                const auto rm = moments::sample_moments(rets);
                if (!rm.stddev || !(*rm.stddev > 0)) continue;
                const double lo = rm.mean - 4.0 * *rm.stddev;
                const double hi = rm.mean + 4.0 * *rm.stddev;
                std::vector<double> edges;
                for (std::size_t j = 0; j <= rf.return_classes; ++j)
                    edges.push_back(lo + (hi - lo) * j / rf.return_classes);
                const auto lrr = moments::logreturn_classes(prices, edges,
                                                            rf.chi2_level);
                ordered_json j;
                j["label"] = label;
                j["returns"] = lrr.returns.size();
                j["outside_classes"] = lrr.outside;
                j["moments"] = moments_json(lrr.summary);
                j["chi2"] = json_num(lrr.chi2.chi2);
                j["chi2_dof"] = lrr.chi2.dof;
                j["chi2_critical"] = json_num(lrr.chi2.critical);
                j["gaussian_rejected"] = lrr.chi2.reject;
                lr.push_back(j);
            }
            rep["log_returns"] = lr;
        }

        // pooled |b| rank law
        if (want("ranks") && pooled_b.size() >= 3) {
            std::vector<long long> abs_b(pooled_b);
            for (auto& x : abs_b) x = std::llabs(x);
            const auto ranks = latticedist::RankFrequency::from_values(abs_b);
            if (ranks.counts.size() >= 3) {
                const auto unw = latticedist::fit_loglog(ranks, false);
                const auto wei = latticedist::fit_loglog(ranks, true);
                rep["rank_law"] = {{"unweighted", zeta_fit_json(unw)},
                                   {"weighted", zeta_fit_json(wei)}};
                std::ostringstream ranks_tsv, bilog;
                ranks_tsv << "rank\tcount\tfrequency\n";
                for (const auto& [rank, c] : ranks.counts)
                    ranks_tsv << rank << '\t' << c << '\t'
                              << json_num(ranks.frequency(rank)) << '\n';
                write_text(out / "ranks.tsv", ranks_tsv.str());
                bilog << "ln_rank_plus_Q\tln_frequency\tfit\n";
                for (const auto& [rank, c] : ranks.counts) {
                    const double x = std::log(static_cast<double>(rank) + wei.Q);
                    bilog << json_num(x) << '\t'
                          << json_num(std::log(ranks.frequency(rank))) << '\t'
                          << json_num(wei.intercept + wei.slope * x) << '\n';
                }
                write_text(out / "ranks_bilog.tsv", bilog.str());
            }
        }

        // maximum-profit strategies and the profit/volume regression
        if (want("mps")) {
            const auto cost =
                mps::CostModel::from_dollars(rf.mps_cost, rf.step_value);
            ordered_json mj = ordered_json::array();
            for (std::size_t i = 0; i < mp_sessions.size(); ++i) {
                const auto st = mps::mps0(mp_sessions[i].first, cost);
                ordered_json j;
                j["session"] = sessions[i].id();
                j["mp"] = json_num(static_cast<double>(st.mp_cents) / 100.0);
                j["transactions"] = st.transactions;
                mj.push_back(j);
            }
            rep["mps"] = {{"cost", json_num(rf.mps_cost)},
                          {"step_value", json_num(rf.step_value)},
                          {"sessions", mj}};
            if (mp_sessions.size() >= 3) {
                bool distinct = false;
                std::vector<double> mps_vals;
                for (const auto& j : mj) mps_vals.push_back(j["mp"]);
                for (double v : mps_vals)
                    if (v != mps_vals.front()) distinct = true;
                if (distinct) {
                    const auto table = mps::mp_volume_table(mp_sessions, cost);
                    rep["mp_volume"] = {
                        {"zero_intercept", ols_json(table.zero_intercept)},
                        {"free_intercept", ols_json(table.free_intercept)}};
                }
            }
        }

        // dependence of waiting times and increments
        if (want("depstats") && pooled_ab.size() >= 2) {
            const auto dep = depstats::dependence_statistics(pooled_ab);
            rep["dependence"] = {{"L", json_num(dep.L)},
                                 {"eps_L", json_num(dep.eps_L)},
                                 {"reject_L", dep.reject_L},
                                 {"I", json_num(dep.I)},
                                 {"eps_I", json_num(dep.eps_I)},
                                 {"reject_I", dep.reject_I},
                                 {"chi2", json_num(dep.chi2)},
                                 {"xi", json_num(dep.xi)},
                                 {"m_a", dep.m_a},
                                 {"m_b", dep.m_b},
                                 {"m_ab", dep.m_ab},
                                 {"n", dep.n},
                                 {"natural_log", dep.natural_log}};
            const auto slices = depstats::variance_slices(
                pooled_ab, rf.dep_slice_width, rf.dep_min_slice);
            std::ostringstream stsv;
            stsv << "a\tn\tmean\tmin\tmax\tvariance\tstddev\tskewness\texcess_"
                    "kurtosis\n";
            for (const auto& sl : slices.slices) {
                const auto& m = sl.b_moments;
                stsv << sl.a << '\t' << m.n << '\t' << json_num(m.mean) << '\t'
                     << json_num(m.min) << '\t' << json_num(m.max) << '\t'
                     << json_num(m.mu2.value_or(0)) << '\t'
                     << json_num(m.stddev.value_or(0)) << '\t'
                     << json_num(m.skewness.value_or(0)) << '\t'
                     << json_num(m.excess_kurtosis.value_or(0)) << '\n';
            }
            write_text(out / "variance_slices.tsv", stsv.str());
            std::ostringstream itsv;
            itsv << "a_first\ta_last\ta_center\tmean_var\tmin_var\tmax_var\tstd_"
                    "var\tskew_var\tkurt_var\n";
            for (const auto& iv : slices.intervals) {
                const auto& m = iv.variance_moments;
                itsv << iv.a_first << '\t' << iv.a_last << '\t'
                     << json_num(iv.a_center) << '\t' << json_num(m.mean) << '\t'
                     << json_num(m.min) << '\t' << json_num(m.max) << '\t'
                     << json_num(m.stddev.value_or(0)) << '\t'
                     << json_num(m.skewness.value_or(0)) << '\t'
                     << json_num(m.excess_kurtosis.value_or(0)) << '\n';
            }
            write_text(out / "variance_intervals.tsv", itsv.str());

            double baseline = rf.dloglog_baseline;
            if (!(baseline > 0.0))
                for (const auto& sl : slices.slices)
                    if (sl.a == 0 && sl.b_moments.mu2) baseline = *sl.b_moments.mu2;
            if (baseline > 0.0 && slices.intervals.size() >= 3) {
                try {
                    const auto dl = depstats::dloglog_fit(slices, baseline);
                    rep["dloglog"] = {{"baseline", json_num(dl.baseline)},
                                      {"excluded_points", dl.excluded_points},
                                      {"fit", ols_json(dl.fit)}};
                    std::ostringstream dtsv;
                    dtsv << "ln_a\tln_ln_ratio\n";
                    for (const auto& iv : slices.intervals) {
                        const double ratio = iv.variance_moments.mean / baseline;
                        if (ratio > 1.0 && iv.a_center > 0.0)
                            dtsv << json_num(std::log(iv.a_center)) << '\t'
                                 << json_num(std::log(std::log(ratio))) << '\n';
                    }
                    write_text(out / "dloglog.tsv", dtsv.str());
                } catch (const std::invalid_argument&) {
                    // too few usable intervals: section simply absent
                }
            }
        }

        // per-session extremes and the type-II tail law
        if (want("extremes") && !b_by_session.empty()) {
            const auto ext = extremes::session_extremes(b_by_session);
            ordered_json ej;
            ej["skipped_empty"] = ext.skipped_empty;
            ordered_json earr = ordered_json::array();
            std::ostringstream etsv;
            etsv << "session\tmin\tn_min\tmax\tn_max\n";
            for (const auto& se : ext.sessions) {
                earr.push_back({{"session", se.session_id},
                                {"min", se.min_b},
                                {"n_min", se.n_min},
                                {"max", se.max_b},
                                {"n_max", se.n_max}});
                etsv << se.session_id << '\t' << se.min_b << '\t' << se.n_min
                     << '\t' << se.max_b << '\t' << se.n_max << '\n';
            }
            ej["sessions"] = earr;
            write_text(out / "extremes.tsv", etsv.str());
            auto dump_epmf = [&](const char* name,
                                 const std::vector<std::pair<long long, double>>&
                                     pmf) {
                std::ostringstream ts, bl;
                ts << "rank\tfrequency\n";
                bl << "ln_abs_rank\tln_frequency\n";
                for (const auto& [rank, f] : pmf) {
                    ts << rank << '\t' << json_num(f) << '\n';
                    if (rank != 0)
                        bl << json_num(std::log(
                                  static_cast<double>(std::llabs(rank))))
                           << '\t' << json_num(std::log(f)) << '\n';
                }
                write_text(out / (std::string(name) + ".tsv"), ts.str());
                write_text(out / (std::string(name) + "_bilog.tsv"), bl.str());
            };
            dump_epmf("epmf_max", ext.epmf_max);
            dump_epmf("epmf_min", ext.epmf_min);
            dump_epmf("epmf_union", ext.epmf_union);
            auto fit_wing = [&](const latticedist::RankFrequency& ranks,
                                const char* name) {
                std::size_t positive = 0;
                for (const auto& [rank, c] : ranks.counts)
                    if (rank > 0) ++positive;
                if (positive < 5) return;
                const auto fit = extremes::fit_ftg2(ranks);
                ej[name] = {{"k", json_num(fit.params.k)},
                            {"b", json_num(fit.params.b)},
                            {"a", json_num(fit.params.a)},
                            {"log_likelihood", json_num(fit.log_likelihood)},
                            {"chi2", json_num(fit.chi2)},
                            {"converged", fit.converged},
                            {"dropped_zero_ranks", fit.dropped_zero_ranks}};
            };
            fit_wing(ext.abs_max_ranks, "tail_fit_max");
            fit_wing(ext.abs_min_ranks, "tail_fit_min");
            rep["extremes"] = ej;
        }

        write_json(out / "report.json", rep);
        write_text(out / "plots.gp", gnuplot_stub());
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "analyze: " << e.what() << "\n";
        return 1;
    }
}

int cmd_synth(const RunConfig& cfg) {
    try {
        if (!fs::exists(cfg.config_path)) return missing_input(cfg.config_path);
        RunFile rf = parse_run_file(cfg.config_path);
        if (!rf.has_gen) {
            std::cerr << "synth: config has no synth_* generator spec\n";
            return 1;
        }
        if (cfg.seed) rf.gen.seed = *cfg.seed;
        rf.gen.band = tickstore::make_band(rf.session.lattice,
                                           {rf.gen_settle, rf.gen_limit});
        rf.gen.start_m = rf.session.lattice.to_index(rf.gen_start_price);
        fs::create_directories(cfg.out_dir);
        const fs::path out(cfg.out_dir);

        const long long top =
            static_cast<long long>(std::ceil(rf.gen.curve.L)) - 1;
        long long days = rf.synth_days > 0 ? rf.synth_days : top;
        days = std::min(days, top);

        ordered_json manifest;
        manifest["schema_version"] = 1;
        manifest["seed"] = rf.gen.seed;
        manifest["law"] = {{"Q", json_num(rf.gen.hz_Q)},
                           {"S", json_num(rf.gen.hz_S)},
                           {"p_up", json_num(rf.gen.p_up)}};
        manifest["waiting"] = {{"a", json_num(rf.gen.waiting.a)},
                               {"b", json_num(rf.gen.waiting.b)},
                               {"z_min", json_num(rf.gen.waiting.z_min)},
                               {"z_max", json_num(rf.gen.waiting.z_max)},
                               {"F0", json_num(rf.gen.waiting.F0)}};
        manifest["curve"] = {{"A", json_num(rf.gen.curve.A)},
                             {"B", json_num(rf.gen.curve.B)},
                             {"C", json_num(rf.gen.curve.C)},
                             {"D", json_num(rf.gen.curve.D)},
                             {"L", json_num(rf.gen.curve.L)}};
        ordered_json sess_arr = ordered_json::array();

        // sessions at day indices spread evenly across the lifespan
        for (long long i = 0; i < days; ++i) {
            const long long tau =
                days == top ? i + 1
                            : 1 + i * (top - 1) / std::max<long long>(1, days - 1);
            const auto sess = synth::generate_session(rf.gen, tau);
            std::ostringstream body;
            tickstore::serialize_ticks(body, rf.gen.lattice, {&sess, 1});
            char name[40];
            std::snprintf(name, sizeof name, "session_%04lld.csv", tau);
            write_text(out / name, body.str());
            char sum[20];
            std::snprintf(sum, sizeof sum, "%016llx",
                          static_cast<unsigned long long>(fnv1a(body.str())));
            sess_arr.push_back({{"tau", tau},
                                {"file", name},
                                {"ticks", sess.ticks.size()},
                                {"volume", sess.volume()},
                                {"checksum", sum}});
        }
        manifest["sessions"] = sess_arr;

        const auto lifecycle = synth::generate_lifecycle(rf.gen);
        std::ostringstream ltsv;
        ltsv << "tau\tvolume\n";
        for (const auto& [tau, v] : lifecycle) ltsv << tau << '\t' << v << '\n';
        write_text(out / "lifecycle.tsv", ltsv.str());

        write_json(out / "manifest.json", manifest);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "synth: " << e.what() << "\n";
        return 1;
    }
}

int cmd_mps(const RunConfig& cfg, double cost_dollars, double step_value,
            const std::string& costs_csv, bool single_episode) {
    try {
        if (!fs::exists(cfg.config_path)) return missing_input(cfg.config_path);
        for (const auto& p : cfg.inputs)
            if (!fs::exists(p)) return missing_input(p);
        const RunFile rf = parse_run_file(cfg.config_path);
        fs::create_directories(cfg.out_dir);
        const fs::path out(cfg.out_dir);
        const auto sessions = load_sessions(cfg, rf, nullptr);
        if (sessions.empty()) {
            std::cerr << "mps: no sessions found\n";
            return 1;
        }

        std::vector<long long> costs;
        if (!costs_csv.empty()) {
            std::istringstream is(costs_csv);
            std::string tok;
            while (std::getline(is, tok, ','))
                costs.push_back(
                    mps::CostModel::from_dollars(std::stod(tok), step_value)
                        .cost_cents);
        } else {
            costs.push_back(
                mps::CostModel::from_dollars(cost_dollars, step_value).cost_cents);
        }
        const long long step_cents =
            mps::CostModel::from_dollars(0.0, step_value).step_value_cents;
        const auto mode = single_episode ? mps::EpisodeMode::Single
                                         : mps::EpisodeMode::Multi;

        ordered_json rep;
        rep["schema_version"] = 1;
        rep["step_value"] = json_num(step_value);
        rep["mode"] = single_episode ? "single" : "multi";
        ordered_json sess_arr = ordered_json::array();
        std::ostringstream seg_tsv;
        seg_tsv << "session\tcost\ttick\taction\n";
        for (const auto& s : sessions) {
            std::vector<long long> prices;
            for (const auto& t : s.ticks) prices.push_back(t.m);
            const auto rows = mps::cost_sweep(prices, costs, step_cents, mode);
            ordered_json ja = ordered_json::array();
            for (const auto& r : rows) {
                ja.push_back(
                    {{"cost", json_num(static_cast<double>(r.cost_cents) / 100.0)},
                     {"mp", json_num(static_cast<double>(r.mp_cents) / 100.0)},
                     {"transactions", r.transactions}});
            }
            for (std::size_t ci = 0; ci < costs.size(); ++ci) {
                const auto strat =
                    mps::mps0(prices, {costs[ci], step_cents}, mode);
                for (std::size_t i = 0; i < strat.actions.size(); ++i)
                    if (strat.actions[i] != 0)
                        seg_tsv << s.id() << '\t'
                                << static_cast<double>(costs[ci]) / 100.0 << '\t'
                                << i << '\t' << strat.actions[i] << '\n';
            }
            sess_arr.push_back({{"session", s.id()}, {"sweep", ja}});
        }
        rep["sessions"] = sess_arr;
        write_json(out / "mps.json", rep);
        write_text(out / "mps_actions.tsv", seg_tsv.str());
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "mps: " << e.what() << "\n";
        return 1;
    }
}

int cmd_fit_volume(const RunConfig& cfg, const std::string& obs_path, double C,
                   double L, bool cumulative) {
    try {
        if (!fs::exists(obs_path)) return missing_input(obs_path);
        fs::create_directories(cfg.out_dir);
        const fs::path out(cfg.out_dir);

        std::vector<std::pair<double, double>> obs;
        std::ifstream in(obs_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#' || !std::isdigit(line[0])) continue;
            std::istringstream is(line);
            double t, v;
            if (is >> t >> v) obs.emplace_back(t, v);
        }
        const auto mode = cumulative ? lifecurve::FitMode::Cumulative
                                     : lifecurve::FitMode::Differential;
        const auto fit = lifecurve::fit_chebyshev(obs, mode, C, L);

        ordered_json j;
        j["schema_version"] = 1;
        j["mode"] = cumulative ? "cumulative" : "differential";
        j["params"] = {{"A", json_num(fit.params.A)},
                       {"B", json_num(fit.params.B)},
                       {"C", json_num(fit.params.C)},
                       {"D", json_num(fit.params.D)},
                       {"L", json_num(fit.params.L)}};
        j["max_abs_residual"] = json_num(fit.max_abs_residual);
        j["converged"] = fit.converged;
        j["underdetermined"] = fit.underdetermined;
        const auto sh = lifecurve::shape(fit.params);
        j["tau_max"] = json_num(sh.tau_max);
        j["v_max"] = json_num(sh.v_max);
        write_json(out / "volume_fit.json", j);

        std::ostringstream tsv;
        tsv << "tau\tV\tVc\n";
        for (int i = 1; i < 200; ++i) {
            const double t = L * i / 200.0;
            tsv << json_num(t) << '\t' << json_num(lifecurve::v_eval(fit.params, t))
                << '\t' << json_num(lifecurve::vc_series(fit.params, t, 1e-8))
                << '\n';
        }
        write_text(out / "volume_fit_curve.tsv", tsv.str());
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "fit-volume: " << e.what() << "\n";
        return 1;
    }
}

int cmd_fit_ranks(const RunConfig& cfg, const std::string& ranks_path,
                  bool weighted, bool tied_intercept,
                  const std::string& exclude_csv) {
    try {
        if (!fs::exists(ranks_path)) return missing_input(ranks_path);
        fs::create_directories(cfg.out_dir);
        const fs::path out(cfg.out_dir);

        std::vector<std::pair<long long, std::uint64_t>> counts;
        std::ifstream in(ranks_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream is(line);
            long long rank;
            std::uint64_t c;
            if (is >> rank >> c) counts.emplace_back(rank, c);
        }
        const auto ranks = latticedist::RankFrequency::from_counts(counts);

        std::set<long long> exclude;
        if (!exclude_csv.empty()) {
            std::istringstream is(exclude_csv);
            std::string tok;
            while (std::getline(is, tok, ',')) exclude.insert(std::stoll(tok));
        }
        const auto mode = tied_intercept
                              ? latticedist::InterceptMode::TiedNormalizer
                              : latticedist::InterceptMode::Free;
        const auto fit = latticedist::fit_loglog(ranks, weighted, exclude, mode);

        ordered_json j;
        j["schema_version"] = 1;
        j["fit"] = zeta_fit_json(fit);
        write_json(out / "rank_fit.json", j);

        std::ostringstream tsv;
        tsv << "ln_rank_plus_Q\tln_frequency\tfit\n";
        for (const auto& [rank, c] : ranks.counts) {
            if (exclude.count(rank)) continue;
            const double x = std::log(static_cast<double>(rank) + fit.Q);
            tsv << json_num(x) << '\t' << json_num(std::log(ranks.frequency(rank)))
                << '\t' << json_num(fit.intercept + fit.slope * x) << '\n';
        }
        write_text(out / "rank_fit_overlay.tsv", tsv.str());
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "fit-ranks: " << e.what() << "\n";
        return 1;
    }
}

int cmd_depstats(const RunConfig& cfg) {
    RunConfig sub = cfg;
    sub.sections = {"depstats"};
    return cmd_analyze(sub);
}

} // namespace ticklab::cli
