#pragma once

// Command-line driver: simulate -> detect -> roc -> analyze -> report, plus
// the figure2 end-to-end replication.
//
// Exit codes: 0 ok, 1 check failed (figure2 FAIL) or analysis error,
// 2 missing input, 3 format error, 4 internal invariant breach.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dislo/analytics/descriptive.hpp"
#include "dislo/analytics/dfa.hpp"
#include "dislo/analytics/granger.hpp"
#include "dislo/analytics/histogram.hpp"
#include "dislo/analytics/ols.hpp"
#include "dislo/analytics/rank.hpp"
#include "dislo/dislocation.hpp"
#include "dislo/errors.hpp"
#include "dislo/feed_io.hpp"
#include "dislo/pipeline.hpp"
#include "dislo/roc.hpp"
#include "dislo/sim.hpp"

namespace dislo::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kMissingInput = 2, kFormat = 3, kInvariant = 4 };

struct RunConfig {
    std::vector<std::string> inputs;
    std::string out_dir = ".";
    double duration_us = 545.0;
    double magnitude_cents = 1.0;
    std::string meta_path;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::optional<std::uint64_t> session_end_ns;
    bool include_truncated = false;

    std::uint64_t duration_floor_ns() const { return static_cast<std::uint64_t>(std::llround(duration_us * 1000.0)); }
    std::int64_t magnitude_floor() const { return std::llround(magnitude_cents * Price::kUnitsPerCent); }
};

inline const char* kFormatsHelp = R"(File formats
  feed file     optional header "#dislo-feed,1,<YYYY-MM-DD>,<symbol count>", then one event per line:
                  Q,<ts_ns>,<symbol>,<SIP|D:EXCH>,<bid_1e-4usd>,<bid_shares>,<offer_1e-4usd>,<offer_shares>
                  T,<ts_ns>,<symbol>,SIP,<price_1e-4usd>,<shares>
                ts_ns = nanoseconds since midnight; an absent quote side is 0,0; ts non-decreasing.
  symbols.csv   ticker,market_cap,sector,category   (category: DOW SPEXDOW REXSP ETF OTHER)
  segments CSV  symbol,side,ordering,start_ns,end_ns,duration_ns,min_mag_1e-4usd,max_mag_1e-4usd,truncated
  roc CSV       symbol,ts_ns,price_1e-4usd,volume,is_differing,included,matched,roc_signed_1e-4usd,roc_signed_usd,reason
  purse CSV     date,key,trades,shares,traded_value_1e-4usd,diff_trades,diff_traded_value_1e-4usd,included_trades,
                included_shares,roc_total_1e-4usd,roc_sip_1e-4usd,roc_direct_1e-4usd,roc_per_share_sum_1e-4usd,
                traded_value_usd,roc_total_usd,roc_per_share_usd,roc_per_share_tw_usd
  sim config    key = value lines, '#' comments; see README.
Exit codes: 0 ok, 1 check failed, 2 missing input, 3 format error, 4 invariant breach.)";

namespace detail {

inline void require_file(const std::string& p) {
    if (!std::filesystem::is_regular_file(p)) throw InputError("missing input " + p);
}

inline std::filesystem::path out_path(const RunConfig& c, const std::string& name) {
    std::filesystem::create_directories(c.out_dir);
    return std::filesystem::path(c.out_dir) / name;
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InputError("cannot write " + p.string());
    out << s;
}

/// Feed files grouped by the session date in their headers ("undated" without one).
inline std::map<std::string, std::vector<std::string>> group_by_date(const std::vector<std::string>& paths) {
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& p : paths) {
        require_file(p);
        EventFileReader r(p);
        out[r.header() ? r.header()->session_date : std::string{"undated"}].push_back(p);
    }
    return out;
}

inline PipelineResult run_files(const std::vector<std::string>& paths, const RunConfig& c) {
    auto stream = MergedStream::from_files(paths);
    std::optional<Timestamp> end;
    if (c.session_end_ns) end = Timestamp{*c.session_end_ns};
    return run_pipeline(stream, c.threads, end);
}

inline std::string category_of(const std::string& key, const std::map<Ticker, SymbolMeta>& meta) {
    if (valid_ticker(key))
        if (auto it = meta.find(Ticker{key}); it != meta.end()) return std::string{to_string(it->second.category)};
    return std::string{to_string(Category::OTHER)};
}

inline std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string describe_row(const stats::Describe& d) {
    if (d.count == 0) return ",,,,,,";
    return num(d.mean) + "," + (std::isnan(d.std) ? std::string{} : num(d.std)) + "," + num(d.min) + "," + num(d.q25) + "," +
           num(d.q50) + "," + num(d.q75) + "," + num(d.max);
}

}  // namespace detail

// ---- subcommands -------------------------------------------------------------

inline int cmd_simulate(const std::string& config_path, const RunConfig& c, std::optional<unsigned> days,
                        std::ostream& out) {
    detail::require_file(config_path);
    auto cfg = sim::load_sim_config(config_path);
    if (c.seed) cfg.process.seed = *c.seed;
    if (days) cfg.process.days = *days;
    const auto result = sim::simulate(cfg.topology, cfg.process);
    std::filesystem::create_directories(c.out_dir);
    for (const auto& day : result.days) {
        const auto paths = sim::write_day(day, c.out_dir, static_cast<std::uint32_t>(cfg.process.symbols.size()));
        out << "day " << day.date << " events=" << day.event_count() << " truth_segments=" << day.truth.size()
            << '\n';
        for (const auto& p : paths) out << "  " << p << '\n';
    }
    write_symbol_meta(detail::out_path(c, "symbols.csv").string(), cfg.meta);
    return kOk;
}

inline int cmd_detect(const RunConfig& c, std::ostream& out) {
    const auto groups = detail::group_by_date(c.inputs);
    for (const auto& [date, paths] : groups) {
        const auto r = detail::run_files(paths, c);
        Conditioning dur = Conditioning::duration(c.duration_floor_ns());
        Conditioning both = Conditioning::duration_and_magnitude(c.duration_floor_ns(), c.magnitude_floor());
        dur.include_truncated = both.include_truncated = c.include_truncated;
        const auto d = condition(r.segments, dur);
        const auto dm = condition(r.segments, both);
        write_segments_csv(detail::out_path(c, "segments_" + date + ".csv").string(), r.segments);
        write_segments_csv(detail::out_path(c, "segments_" + date + ".duration.csv").string(), d);
        write_segments_csv(detail::out_path(c, "segments_" + date + ".duration_magnitude.csv").string(), dm);
        out << "date=" << date << " events=" << r.events << " segments=" << r.segments.size()
            << " duration_conditioned=" << d.size() << " duration_magnitude_conditioned=" << dm.size() << '\n';
    }
    return kOk;
}

inline int cmd_roc(const RunConfig& c, std::ostream& out) {
    const auto groups = detail::group_by_date(c.inputs);
    std::map<Ticker, SymbolMeta> meta;
    if (!c.meta_path.empty()) {
        detail::require_file(c.meta_path);
        meta = load_symbol_meta(c.meta_path);
    }
    for (const auto& [date, paths] : groups) {
        const auto r = detail::run_files(paths, c);
        write_roc_csv(detail::out_path(c, "roc_" + date + ".csv").string(), r.records);
        std::vector<PurseRow> rows;
        for (auto& [k, v] : aggregate_purse_by_symbol(r.records, date)) rows.push_back(v);
        write_purse_csv(detail::out_path(c, "purse_" + date + ".csv").string(), rows);
        if (!meta.empty())
            write_purse_csv(detail::out_path(c, "purse_category_" + date + ".csv").string(),
                            rollup_by_category(rows, meta));
        const auto rep = purse_report(rows);
        out << "date=" << date << " trades=" << rep.trades << " diff_trades=" << rep.diff_trades
            << " roc_total_usd=" << format_usd_cents(rep.roc, false) << '\n';
    }
    return kOk;
}

inline int cmd_report(const RunConfig& c, const std::string& category, const std::string& title,
                      const std::string& csv_out, std::ostream& out) {
    std::vector<PurseRow> rows;
    for (const auto& p : c.inputs) {
        detail::require_file(p);
        auto r = read_purse_csv(p);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    if (!category.empty()) {
        if (c.meta_path.empty()) throw InputError("--category needs --meta");
        detail::require_file(c.meta_path);
        const auto meta = load_symbol_meta(c.meta_path);
        std::erase_if(rows, [&](const PurseRow& r) { return detail::category_of(r.key, meta) != category; });
    }
    const auto rep = purse_report(rows);
    out << rep.render_text(title);
    if (!csv_out.empty()) detail::write_text(csv_out, rep.render_csv());
    return kOk;
}

struct AnalyzeOptions {
    std::vector<std::string> segment_files;
    std::vector<std::string> purse_files;
    std::size_t max_lag = 40;
    double alpha = 0.05;
    double bin_seconds = 300;
    std::size_t top_k = 30;
    std::size_t bottom_k = 30;
    std::uint64_t session_open_ns = kRegularOpenNs;
    std::uint64_t session_length_ns = kRegularSessionNs;
};

inline int cmd_analyze(const RunConfig& c, const AnalyzeOptions& o, std::ostream& out) {
    using namespace analytics;
    std::map<Ticker, SymbolMeta> meta;
    if (!c.meta_path.empty()) {
        detail::require_file(c.meta_path);
        meta = load_symbol_meta(c.meta_path);
    }
    std::ostringstream notes;
    const SessionClock clock{o.session_open_ns, o.session_length_ns};

    // Segments: summaries per category and conditioning level, histograms, circle plots.
    std::vector<DislocationSegment> segs;
    for (const auto& p : o.segment_files) {
        detail::require_file(p);
        auto s = read_segments_csv(p);
        segs.insert(segs.end(), s.begin(), s.end());
    }
    sort_segments(segs);
    if (!o.segment_files.empty()) {
        Conditioning dur = Conditioning::duration(c.duration_floor_ns());
        Conditioning both = Conditioning::duration_and_magnitude(c.duration_floor_ns(), c.magnitude_floor());
        dur.include_truncated = both.include_truncated = c.include_truncated;
        const std::vector<std::pair<std::string, Conditioning>> levels = {
            {"none", Conditioning::none()}, {"duration", dur}, {"duration_magnitude", both}};
        std::map<std::string, std::vector<DislocationSegment>> by_cat;
        for (const auto& s : segs) by_cat[detail::category_of(s.symbol.str(), meta)].push_back(s);
        by_cat["ALL"] = segs;
        std::string csv =
            "category,conditioning,count,field,mean,std,min,q25,q50,q75,max\n";
        for (const auto& [cat, v] : by_cat) {
            for (const auto& [lvl, cond] : levels) {
                const auto sum = summarize(condition(v, cond));
                const std::string head = cat + "," + lvl + "," + std::to_string(sum.count) + ",";
                csv += head + "min_magnitude_usd," + detail::describe_row(sum.min_magnitude) + "\n";
                csv += head + "max_magnitude_usd," + detail::describe_row(sum.max_magnitude) + "\n";
                csv += head + "duration_s," + detail::describe_row(sum.duration) + "\n";
            }
        }
        detail::write_text(detail::out_path(c, "segment_summary.csv"), csv);

        const auto bin_ns = static_cast<std::uint64_t>(std::llround(o.bin_seconds * 1e9));
        detail::write_text(detail::out_path(c, "hist_start_time.csv"),
                           histogram_csv(start_time_histogram(segs, bin_ns, clock)));
        detail::write_text(detail::out_path(c, "hist_duration.csv"), histogram_csv(duration_histogram(segs)));
        detail::write_text(detail::out_path(c, "hist_duration_actionable.csv"),
                           histogram_csv(duration_histogram(condition(segs, dur))));
        std::map<std::string, std::vector<DislocationSegment>> by_symbol;
        for (const auto& s : segs) by_symbol[s.symbol.str()].push_back(s);
        for (const auto& [sym, v] : by_symbol)
            detail::write_text(detail::out_path(c, "circleplot_" + sym + ".csv"),
                               circleplot_csv(circleplot_export(v, clock)));
        out << "segments=" << segs.size() << " symbols=" << by_symbol.size() << '\n';
    }

    // Purse rows: daily category series and everything built on them.
    std::vector<PurseRow> rows;
    for (const auto& p : o.purse_files) {
        detail::require_file(p);
        auto r = read_purse_csv(p);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    if (rows.empty()) {
        detail::write_text(detail::out_path(c, "analysis_notes.txt"), notes.str());
        return kOk;
    }
    std::set<std::string> dates;
    for (const auto& r : rows) dates.insert(r.date);
    const auto cat_rows = rollup_by_category(rows, meta);
    std::map<std::string, std::map<std::string, PurseRow>> grid;  // category -> date -> row
    for (const auto& r : cat_rows) grid[r.key][r.date] = r;

    std::vector<DailySeries> roc_series, rps_series;
    for (const auto& [cat, by_date] : grid) {
        DailySeries a{cat, {}}, b{cat, {}};
        for (const auto& d : dates) {
            auto it = by_date.find(d);
            const PurseRow row = it == by_date.end() ? PurseRow{} : it->second;
            a.points.emplace_back(d, static_cast<double>(row.roc_total) / Price::kUnitsPerDollar);
            b.points.emplace_back(d, row.roc_per_share());
        }
        roc_series.push_back(std::move(a));
        rps_series.push_back(std::move(b));
    }
    {
        std::string csv = "date,category,roc_total_usd,roc_per_share_usd\n";
        for (std::size_t k = 0; k < roc_series.size(); ++k)
            for (std::size_t i = 0; i < roc_series[k].size(); ++i)
                csv += roc_series[k].points[i].first + "," + roc_series[k].label + "," +
                       detail::num(roc_series[k].points[i].second) + "," + detail::num(rps_series[k].points[i].second) +
                       "\n";
        detail::write_text(detail::out_path(c, "daily_category.csv"), csv);
    }

    std::string moments = "series,category,n,skew,kurtosis\n";
    std::string dfa = "series,category,n,alpha\n";
    for (const auto& [name, set] : {std::pair{"roc", &roc_series}, std::pair{"roc_per_share", &rps_series}}) {
        for (const auto& s : *set) {
            const auto v = s.values();
            try {
                const auto m = skew_kurtosis(v);
                moments += std::string{name} + "," + s.label + "," + std::to_string(v.size()) + "," +
                           detail::num(m.skew) + "," + detail::num(m.kurtosis) + "\n";
            } catch (const AnalysisError& e) {
                notes << "moments " << name << " " << s.label << ": " << e.what() << '\n';
            }
            try {
                const double a = dfa_exponent(v);
                dfa += std::string{name} + "," + s.label + "," + std::to_string(v.size()) + "," + detail::num(a) + "\n";
            } catch (const AnalysisError& e) {
                notes << "dfa " << name << " " << s.label << ": " << e.what() << '\n';
            }
        }
    }
    detail::write_text(detail::out_path(c, "moments.csv"), moments);
    detail::write_text(detail::out_path(c, "dfa.csv"), dfa);

    {
        const auto m = pearson_matrix(roc_series);
        std::string csv = "category";
        for (const auto& l : m.labels) csv += "," + l;
        csv += "\n";
        for (std::size_t i = 0; i < m.labels.size(); ++i) {
            csv += m.labels[i];
            for (std::size_t j = 0; j < m.labels.size(); ++j)
                csv += "," + (m.r[i][j] ? detail::num(*m.r[i][j]) : std::string{"undefined"});
            csv += "\n";
        }
        detail::write_text(detail::out_path(c, "pearson.csv"), csv);
    }

    {
        std::string csv;
        for (std::size_t i = 0; i < roc_series.size(); ++i) {
            for (std::size_t j = 0; j < roc_series.size(); ++j) {
                if (i == j) continue;
                try {
                    const auto g = granger_tests(normalize_series(roc_series[i]), normalize_series(roc_series[j]),
                                                 o.max_lag, o.alpha);
                    auto block = granger_csv(g);
                    if (!csv.empty()) block = block.substr(block.find('\n') + 1);
                    csv += block;
                } catch (const AnalysisError& e) {
                    notes << "granger " << roc_series[i].label << "->" << roc_series[j].label << ": " << e.what()
                          << '\n';
                }
            }
        }
        detail::write_text(detail::out_path(c, "granger.csv"), csv);
    }

    // Per-symbol cross-section for the scaling regressions.
    {
        std::map<std::string, PurseRow> per_symbol;
        for (const auto& r : rows) {
            auto& acc = per_symbol[r.key];
            acc.key = r.key;
            acc += r;
        }
        std::vector<double> mc, diff, trades, roc;
        std::size_t missing_mc = 0;
        for (const auto& [key, r] : per_symbol) {
            std::optional<double> cap;
            if (valid_ticker(key))
                if (auto it = meta.find(Ticker{key}); it != meta.end()) cap = it->second.market_cap;
            if (!cap) {
                ++missing_mc;
                continue;
            }
            mc.push_back(*cap);
            diff.push_back(static_cast<double>(r.diff_trades));
            trades.push_back(static_cast<double>(r.trades));
            roc.push_back(static_cast<double>(r.roc_total) / Price::kUnitsPerDollar);
        }
        if (missing_mc) notes << "ols: " << missing_mc << " symbol(s) without market_cap skipped\n";
        std::string text;
        for (bool quad : {false, true}) {
            try {
                const auto f = ols_fit_log10({{"market_cap", mc}, {"diff_trades", diff}, {"trades", trades}}, roc, quad);
                text += std::string{quad ? "# quadratic\n" : "# linear\n"} + f.summary();
            } catch (const AnalysisError& e) {
                notes << "ols " << (quad ? "quadratic" : "linear") << ": " << e.what() << '\n';
            }
        }
        detail::write_text(detail::out_path(c, "ols.txt"), text);
    }

    for (auto metric : {RankMetric::ROC_TOTAL, RankMetric::ROC_PER_SHARE, RankMetric::ROC_PER_TRADED_VALUE})
        detail::write_text(detail::out_path(c, "rank_" + std::string{to_string(metric)} + ".csv"),
                           ranking_csv(rank_by(rows, metric, o.top_k, o.bottom_k, meta)));

    detail::write_text(detail::out_path(c, "analysis_notes.txt"), notes.str());
    out << "days=" << dates.size() << " categories=" << grid.size() << " symbols=" << [&] {
        std::set<std::string> k;
        for (const auto& r : rows) k.insert(r.key);
        return k.size();
    }() << '\n';
    if (!notes.str().empty()) out << notes.str();
    return kOk;
}

inline int cmd_figure2(const RunConfig& c, bool write_files, std::ostream& out) {
    const auto replay = sim::replay_figure2();
    std::vector<FeedEvent> events;
    std::vector<std::unique_ptr<EventSource>> sources;
    sources.push_back(std::make_unique<VectorEventSource>(replay.day.sip, "SIP"));
    for (const auto& [id, v] : replay.day.direct)
        sources.push_back(std::make_unique<VectorEventSource>(v, "D:" + id.str()));
    MergedStream stream(std::move(sources));
    const auto r = run_pipeline(stream, 1, replay.day.session_end);
    if (write_files) {
        sim::write_day(replay.day, c.out_dir, 1);
        write_segments_csv(detail::out_path(c, "segments_figure2.csv").string(), r.segments);
    }
    for (const auto& s : r.segments)
        out << "segment symbol=" << s.symbol.view() << " side=" << to_string(s.side)
            << " ordering=" << to_string(s.ordering) << " start_ns=" << s.start_ts.ns << " end_ns=" << s.end_ts.ns
            << " duration_ns=" << s.duration() << " min_mag_usd=" << format_price(Price{s.min_magnitude})
            << " max_mag_usd=" << format_price(Price{s.max_magnitude}) << '\n';
    const bool pass = r.segments.size() == 1 && r.segments.front() == replay.expected &&
                      replay.day.truth == r.segments;
    out << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? kOk : kFailed;
}

// ---- entry point ----------------------------------------------------------------

inline void print_error(std::ostream& err, int code, std::string_view kind, const std::string& msg) {
    std::string flat = msg;
    for (auto& ch : flat)
        if (ch == '\n') ch = ' ';
    err << "dislo: error code=" << code << " kind=" << kind << " message=" << flat << '\n';
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"SIP vs direct-feed dislocation detection and realized opportunity cost"};
    app.footer(kFormatsHelp);
    app.require_subcommand(1);
    RunConfig c;

    auto add_common = [&](CLI::App* s, bool inputs) {
        s->add_option("-o,--out", c.out_dir, "Output directory")->capture_default_str();
        if (inputs) s->add_option("inputs", c.inputs, "Input files")->required();
    };
    auto add_thresholds = [&](CLI::App* s) {
        s->add_option("--duration-us", c.duration_us, "Duration floor in microseconds (strict >)")
            ->capture_default_str();
        s->add_option("--magnitude-cents", c.magnitude_cents, "Min-magnitude floor in cents (strict >)")
            ->capture_default_str();
        s->add_flag("--include-truncated", c.include_truncated,
                    "Keep session-end truncated segments in conditioned outputs");
    };

    std::string config_path;
    std::optional<unsigned> days;
    auto* sim_cmd = app.add_subcommand("simulate", "Generate feed files, ground truth and symbols.csv");
    sim_cmd->add_option("-c,--config", config_path, "Simulator configuration file")->required();
    sim_cmd->add_option("--seed", c.seed, "Override the configured seed");
    sim_cmd->add_option("--days", days, "Override the configured number of session days");
    add_common(sim_cmd, false);

    auto* det_cmd = app.add_subcommand("detect", "Detect dislocation segments (raw and conditioned CSVs per date)");
    add_common(det_cmd, true);
    add_thresholds(det_cmd);
    det_cmd->add_option("--threads", c.threads, "Worker threads (output is identical for any count)")
        ->check(CLI::Range(1u, 1024u));
    det_cmd->add_option("--session-end", c.session_end_ns, "Close open segments here (ns since midnight)");

    auto* roc_cmd = app.add_subcommand("roc", "Classify trades and aggregate purse rows per date");
    add_common(roc_cmd, true);
    roc_cmd->add_option("--meta", c.meta_path, "symbols.csv for category rollups");
    roc_cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    roc_cmd->add_option("--session-end", c.session_end_ns, "Session end (ns since midnight)");

    AnalyzeOptions ao;
    auto* an_cmd = app.add_subcommand("analyze", "Summaries, histograms, DFA, Granger, correlations, OLS, rankings");
    add_common(an_cmd, false);
    add_thresholds(an_cmd);
    an_cmd->add_option("--segments", ao.segment_files, "Unconditioned segment CSVs");
    an_cmd->add_option("--purse", ao.purse_files, "Per-symbol purse CSVs");
    an_cmd->add_option("--meta", c.meta_path, "symbols.csv");
    an_cmd->add_option("--max-lag", ao.max_lag, "Granger maximum lag")->capture_default_str();
    an_cmd->add_option("--alpha", ao.alpha, "Family-wise significance level")->capture_default_str();
    an_cmd->add_option("--bin-seconds", ao.bin_seconds, "Start-time histogram bin width")->capture_default_str();
    an_cmd->add_option("--top", ao.top_k, "Ranking top k")->capture_default_str();
    an_cmd->add_option("--bottom", ao.bottom_k, "Ranking bottom k")->capture_default_str();
    an_cmd->add_option("--session-open-ns", ao.session_open_ns, "Session open")->capture_default_str();
    an_cmd->add_option("--session-length-ns", ao.session_length_ns, "Session length")->capture_default_str();

    std::string category, title, csv_out;
    auto* rep_cmd = app.add_subcommand("report", "Ten-line ROC summary over purse CSVs");
    rep_cmd->add_option("inputs", c.inputs, "Purse CSVs")->required();
    rep_cmd->add_option("--meta", c.meta_path, "symbols.csv");
    rep_cmd->add_option("--category", category, "Restrict to one category");
    rep_cmd->add_option("--title", title, "Title line");
    rep_cmd->add_option("--csv", csv_out, "Also write the report as CSV");

    bool write_files = false;
    auto* fig_cmd = app.add_subcommand("figure2", "Replay the two-exchange latency example and check it");
    add_common(fig_cmd, false);
    fig_cmd->add_flag("--write", write_files, "Also write the replayed feeds and segments to --out");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kOk;
        }
        print_error(err, 64, "usage", e.what());
        return 64;
    }

    try {
        if (*sim_cmd) return cmd_simulate(config_path, c, days, out);
        if (*det_cmd) return cmd_detect(c, out);
        if (*roc_cmd) return cmd_roc(c, out);
        if (*an_cmd) return cmd_analyze(c, ao, out);
        if (*rep_cmd) return cmd_report(c, category, title, csv_out, out);
        if (*fig_cmd) return cmd_figure2(c, write_files, out);
    } catch (const InputError& e) {
        print_error(err, kMissingInput, "missing_input", e.what());
        return kMissingInput;
    } catch (const FormatError& e) {
        print_error(err, kFormat, "format", e.what());
        return kFormat;
    } catch (const ParseError& e) {
        print_error(err, kFormat, "format", e.what());
        return kFormat;
    } catch (const InvariantError& e) {
        print_error(err, kInvariant, "invariant", e.what());
        return kInvariant;
    } catch (const AnalysisError& e) {
        print_error(err, kFailed, "analysis", e.what());
        return kFailed;
    } catch (const std::filesystem::filesystem_error& e) {
        print_error(err, kMissingInput, "missing_input", e.what());
        return kMissingInput;
    }
    return kFailed;
}

}  // namespace dislo::cli
