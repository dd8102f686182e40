// accesswatch: fits per-user access trends, forecasts future access, and
// flags users whose trend breaks out of their allowed band.
//
// Subcommands: simulate | ingest | fit | forecast | report
// Exit codes: 0 success, 2 usage/IO error, 3 fit failed for every user,
// 4 missing model.

#include "dlp/batch.hpp"
#include "dlp/errors.hpp"
#include "dlp/numfmt.hpp"
#include "dlp/report.hpp"
#include "dlp/store.hpp"
#include "dlp/syngen.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitFitFailed = 3;
constexpr int kExitNoModel = 4;

struct CommonFitFlags {
    std::string granularity;
    int changepoints = 0;
    double cp_range = 0.0;
    double lambda = 0.0;
    double alpha = 0.0;
    double varsigma = 0.0;
    std::string band_mode;
};

dlp::CivilDate parse_date_or_fail(const std::string& text, const char* what) {
    const auto date = dlp::parse_date(text);
    if (!date) {
        throw CLI::ValidationError(std::string(what) + ": expected YYYY-MM-DD, got '" + text + "'");
    }
    return *date;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw dlp::IOFailure("cannot open output file " + path);
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw dlp::IOFailure("short write to " + path);
    }
}

// flag > config.json > built-in default
template <typename T, typename U>
T pick(const CLI::Option* opt, T flag_value, const std::optional<U>& config_value,
       T built_in) {
    if (opt->count() > 0) {
        return flag_value;
    }
    if (config_value) {
        return static_cast<T>(*config_value);
    }
    return built_in;
}

dlp::Thresholds thresholds_from_config(const dlp::StoreConfig& cfg) {
    dlp::Thresholds t;
    if (cfg.alert) t.alert = *cfg.alert;
    if (cfg.restrict) t.restrict = *cfg.restrict;
    if (cfg.block) t.block = *cfg.block;
    t.validate();
    return t;
}

dlp::Granularity granularity_or_fail(const std::string& name) {
    const auto g = dlp::parse_granularity(name);
    if (!g) {
        throw dlp::InvalidConfig("unknown granularity '" + name + "'");
    }
    return *g;
}

dlp::BandMode band_mode_or_fail(const std::string& name) {
    const auto mode = dlp::parse_band_mode(name);
    if (!mode) {
        throw dlp::InvalidConfig("unknown band mode '" + name + "'");
    }
    return *mode;
}

// Rebuilds one user's training series from the stored records, on the
// exact period axis the model was fitted on.
std::optional<dlp::UserSeries> training_series(const dlp::Store& store,
                                               const dlp::StoredModel& stored) {
    const auto& model = stored.model;
    std::vector<dlp::AccessRecord> mine;
    for (auto& r : store.load_records()) {
        if (r.user_id == model.user_id) {
            mine.push_back(std::move(r));
        }
    }
    if (mine.empty()) {
        return std::nullopt;
    }
    // Training window = [origin, last day of period n_train-1].
    const auto next_period = dlp::period_start(model.origin, model.n_train, model.granularity);
    const auto end_day = std::chrono::sys_days{next_period} - std::chrono::days{1};
    auto series = dlp::aggregate(mine, model.granularity,
                                 dlp::DateRange{model.origin, dlp::CivilDate{end_day}});
    auto it = series.find(model.user_id);
    if (it == series.end()) {
        return std::nullopt;
    }
    return std::move(it->second);
}

int cmd_simulate(const std::string& out_path, int users, const std::string& from,
                 const std::string& to, const std::string& granularity, double cap,
                 const std::string& leaker, const std::string& leak_start, double leak_slope,
                 double noise, std::uint64_t seed) {
    dlp::ScenarioConfig cfg;
    cfg.n_users = users;
    cfg.start = parse_date_or_fail(from, "--from");
    cfg.end = parse_date_or_fail(to, "--to");
    cfg.granularity = granularity_or_fail(granularity);
    cfg.normal_cap = cap;
    cfg.leaker_id = leaker;
    if (!leaker.empty()) {
        cfg.leak_start = parse_date_or_fail(leak_start, "--leak-start");
    }
    cfg.leak_slope = leak_slope;
    cfg.noise_scale = noise;
    cfg.seed = seed;

    const auto records = dlp::generate(cfg);
    write_text_file(out_path, dlp::records_to_csv(records));
    std::cout << "records=" << records.size() << " users=" << dlp::scenario_user_ids(cfg).size()
              << " out=" << out_path << "\n";
    return kExitOk;
}

int cmd_ingest(const std::string& store_dir, const std::string& input_path,
               const std::string& format_name) {
    dlp::InputFormat format;
    if (format_name == "csv") {
        format = dlp::InputFormat::CSV;
    } else if (format_name == "jsonl") {
        format = dlp::InputFormat::JSONL;
    } else {
        throw dlp::InvalidConfig("unknown format '" + format_name + "'");
    }

    std::ifstream in(input_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open input file " << input_path << "\n";
        return kExitUsage;
    }

    dlp::Store store(store_dir);
    dlp::StoreLock lock(store.root());
    const auto parsed = dlp::parse_records(in, format);
    for (const auto& bad : parsed.rejected) {
        std::cerr << "warning: line " << bad.line << ": " << dlp::fault_name(bad.fault) << ": "
                  << bad.detail << "\n";
    }
    store.append_records(parsed.records);
    std::cout << "accepted=" << parsed.records.size() << " rejected=" << parsed.rejected.size()
              << "\n";
    return kExitOk;
}

int cmd_fit(const std::string& store_dir, const std::string& user, bool all,
            const CommonFitFlags& flags, const CLI::Option* opts[7], bool parallel) {
    dlp::Store store(store_dir);
    dlp::StoreLock lock(store.root());
    const auto config = dlp::load_store_config(store);

    const auto granularity = granularity_or_fail(
        pick(opts[0], flags.granularity, config.granularity, std::string("annual")));
    dlp::FitConfig fit_cfg;
    fit_cfg.n_changepoints = pick(opts[1], flags.changepoints, config.changepoints, 25);
    fit_cfg.cp_range = pick(opts[2], flags.cp_range, config.cp_range, 0.8);
    fit_cfg.lambda = pick(opts[3], flags.lambda, config.lambda, 0.01);
    dlp::BandConfig band_cfg;
    band_cfg.alpha = pick(opts[4], flags.alpha, config.alpha, 0.0);
    band_cfg.varsigma = pick(opts[5], flags.varsigma, config.varsigma, 2.0);
    band_cfg.mode = band_mode_or_fail(
        pick(opts[6], flags.band_mode, config.band_mode, std::string("literal")));
    fit_cfg.validate();
    band_cfg.validate();

    const auto records = store.load_records();
    if (records.empty()) {
        std::cerr << "error: store has no records to fit\n";
        return kExitFitFailed;
    }
    auto series = dlp::aggregate(records, granularity);
    if (!all) {
        if (series.find(user) == series.end()) {
            std::cerr << "error: no records for user '" << user << "'\n";
            return kExitFitFailed;
        }
        auto kept = std::move(series.at(user));
        series.clear();
        series.emplace(user, std::move(kept));
    }

    const auto outcomes = dlp::fit_models(series, fit_cfg, band_cfg,
                                          parallel ? dlp::Exec::Parallel : dlp::Exec::Serial);
    std::size_t fitted = 0;
    for (const auto& outcome : outcomes) {
        if (!outcome.ok) {
            std::cerr << "warning: " << outcome.user_id << ": " << outcome.error << "\n";
            continue;
        }
        store.save_model(outcome.stored);
        ++fitted;
        const auto& m = outcome.stored.model;
        std::cout << m.user_id << ' ' << dlp::format_double(m.k) << ' '
                  << dlp::format_double(m.m_offset) << ' '
                  << dlp::format_double(outcome.stored.mu) << ' '
                  << dlp::format_double(outcome.stored.sigma) << "\n";
    }
    return fitted == 0 ? kExitFitFailed : kExitOk;
}

int cmd_forecast(const std::string& store_dir, const std::string& user, bool all, int horizon,
                 const CLI::Option* horizon_opt, const std::string& out_path) {
    dlp::Store store(store_dir);
    const auto config = dlp::load_store_config(store);
    const int effective_horizon = pick(horizon_opt, horizon, config.horizon, 1);
    if (effective_horizon < 1) {
        throw dlp::InvalidConfig("horizon must be >= 1");
    }
    const auto thresholds = thresholds_from_config(config);

    std::vector<std::string> users;
    if (all) {
        users = store.list_models();
    } else {
        users.push_back(user);
    }

    std::vector<dlp::ReportRow> rows;
    for (const auto& id : users) {
        dlp::StoredModel stored;
        try {
            stored = store.load_model(id);
        } catch (const dlp::NotFound& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitNoModel;
        }
        const auto series = training_series(store, stored);
        if (!series) {
            std::cerr << "warning: no stored records for user '" << id << "', skipping\n";
            continue;
        }
        auto eval = dlp::evaluate_user(stored.model, *series, stored.mu, stored.sigma,
                                       stored.band, thresholds, effective_horizon);
        rows.insert(rows.end(), std::make_move_iterator(eval.rows.begin()),
                    std::make_move_iterator(eval.rows.end()));
    }

    write_text_file(out_path, dlp::report_to_csv(rows));
    std::cout << "users=" << users.size() << " rows=" << rows.size() << " out=" << out_path
              << "\n";
    return kExitOk;
}

int cmd_report(const std::string& store_dir, const std::string& out_path, int top, int horizon,
               const CLI::Option* horizon_opt) {
    dlp::Store store(store_dir);
    const auto config = dlp::load_store_config(store);
    const int effective_horizon = pick(horizon_opt, horizon, config.horizon, 1);
    const auto thresholds = thresholds_from_config(config);

    std::vector<dlp::AccessDecision> decisions;
    for (const auto& id : store.list_models()) {
        const auto stored = store.load_model(id);
        const auto series = training_series(store, stored);
        if (!series) {
            std::cerr << "warning: no stored records for user '" << id << "', skipping\n";
            continue;
        }
        auto eval = dlp::evaluate_user(stored.model, *series, stored.mu, stored.sigma,
                                       stored.band, thresholds, effective_horizon);
        decisions.insert(decisions.end(), std::make_move_iterator(eval.decisions.begin()),
                         std::make_move_iterator(eval.decisions.end()));
    }

    const auto ranking = dlp::rank_suspects(decisions, thresholds);
    write_text_file(out_path, dlp::ranking_to_csv(ranking));

    const int shown = std::min<int>(top, static_cast<int>(ranking.size()));
    for (int i = 0; i < shown; ++i) {
        std::cout << ranking[static_cast<std::size_t>(i)].user_id << ' '
                  << dlp::format_double(ranking[static_cast<std::size_t>(i)].max_severity) << ' '
                  << dlp::action_name(ranking[static_cast<std::size_t>(i)].action) << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Access-trend forecasting and data-leak alerting"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic access log");
    std::string sim_out;
    int sim_users = 10;
    std::string sim_from = "2014-01-01";
    std::string sim_to = "2018-12-31";
    std::string sim_gran = "annual";
    double sim_cap = 80.0;
    std::string sim_leaker;
    std::string sim_leak_start;
    double sim_slope = 15.0;
    double sim_noise = 0.0;
    std::uint64_t sim_seed = 1;
    simulate->add_option("--out", sim_out, "Output CSV path")->required();
    simulate->add_option("--users", sim_users, "Number of users");
    simulate->add_option("--from", sim_from, "Start date (YYYY-MM-DD)");
    simulate->add_option("--to", sim_to, "End date (YYYY-MM-DD)");
    simulate->add_option("--granularity", sim_gran, "daily|monthly|half_yearly|annual");
    simulate->add_option("--cap", sim_cap, "Normal per-period cap, minutes");
    simulate->add_option("--leaker", sim_leaker, "User id that ramps up");
    simulate->add_option("--leak-start", sim_leak_start, "First leaking period date");
    simulate->add_option("--leak-slope", sim_slope, "Minutes/period added while leaking");
    simulate->add_option("--noise", sim_noise, "Uniform noise amplitude, minutes");
    simulate->add_option("--seed", sim_seed, "PRNG seed");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Parse an access log and append it to a store");
    std::string ing_store;
    std::string ing_input;
    std::string ing_format = "csv";
    ingest->add_option("--store", ing_store, "Store directory")->required();
    ingest->add_option("--input", ing_input, "Input file")->required();
    ingest->add_option("--format", ing_format, "csv|jsonl");

    // fit
    auto* fit = app.add_subcommand("fit", "Fit trend models from stored records");
    std::string fit_store;
    std::string fit_user;
    bool fit_all = false;
    bool fit_parallel = false;
    CommonFitFlags flags;
    fit->add_option("--store", fit_store, "Store directory")->required();
    auto* fit_user_opt = fit->add_option("--user", fit_user, "Fit one user");
    fit->add_flag("--all", fit_all, "Fit every user in the store");
    const CLI::Option* fit_opts[7];
    fit_opts[0] = fit->add_option("--granularity", flags.granularity,
                                  "daily|monthly|half_yearly|annual");
    fit_opts[1] = fit->add_option("--changepoints", flags.changepoints,
                                  "Max candidate changepoints");
    fit_opts[2] = fit->add_option("--cp-range", flags.cp_range,
                                  "Changepoint span as a fraction of training");
    fit_opts[3] = fit->add_option("--lambda", flags.lambda, "Ridge strength on rate deltas");
    fit_opts[4] = fit->add_option("--alpha", flags.alpha, "Error-formula offset");
    fit_opts[5] = fit->add_option("--varsigma", flags.varsigma, "Band sensitivity multiplier");
    fit_opts[6] = fit->add_option("--band-mode", flags.band_mode, "literal|mu_plus");
    fit->add_flag("--parallel", fit_parallel, "Fit users over OpenMP threads");

    // forecast
    auto* forecast = app.add_subcommand("forecast", "Write per-period report rows with bands");
    std::string fc_store;
    std::string fc_user;
    bool fc_all = false;
    int fc_horizon = 1;
    std::string fc_out;
    forecast->add_option("--store", fc_store, "Store directory")->required();
    auto* fc_user_opt = forecast->add_option("--user", fc_user, "Report one user");
    forecast->add_flag("--all", fc_all, "Report every fitted user");
    auto* fc_horizon_opt = forecast->add_option("--horizon", fc_horizon, "Future periods");
    forecast->add_option("--out", fc_out, "Report CSV path")->required();

    // report
    auto* report = app.add_subcommand("report", "Rank users by breach severity");
    std::string rp_store;
    std::string rp_out;
    int rp_top = 10;
    int rp_horizon = 1;
    report->add_option("--store", rp_store, "Store directory")->required();
    report->add_option("--out", rp_out, "Ranking CSV path")->required();
    report->add_option("--top", rp_top, "How many users to print");
    auto* rp_horizon_opt = report->add_option("--horizon", rp_horizon, "Future periods");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e); // --help
        }
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (simulate->parsed()) {
            return cmd_simulate(sim_out, sim_users, sim_from, sim_to, sim_gran, sim_cap,
                                sim_leaker, sim_leak_start, sim_slope, sim_noise, sim_seed);
        }
        if (ingest->parsed()) {
            return cmd_ingest(ing_store, ing_input, ing_format);
        }
        if (fit->parsed()) {
            if (fit_all == (fit_user_opt->count() > 0)) {
                std::cerr << "error: pass exactly one of --user or --all\n";
                return kExitUsage;
            }
            return cmd_fit(fit_store, fit_user, fit_all, flags, fit_opts, fit_parallel);
        }
        if (forecast->parsed()) {
            if (fc_all == (fc_user_opt->count() > 0)) {
                std::cerr << "error: pass exactly one of --user or --all\n";
                return kExitUsage;
            }
            return cmd_forecast(fc_store, fc_user, fc_all, fc_horizon, fc_horizon_opt, fc_out);
        }
        if (report->parsed()) {
            return cmd_report(rp_store, rp_out, rp_top, rp_horizon, rp_horizon_opt);
        }
    } catch (const dlp::NotFound& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoModel;
    } catch (const dlp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
