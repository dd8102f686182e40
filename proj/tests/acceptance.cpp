// Acceptance suite: end-to-end checks of the leak-detection pipeline.
// Each criterion prints one PASS/FAIL line; the process exits non-zero
// if any criterion fails.

#include "dlp/batch.hpp"
#include "dlp/numfmt.hpp"
#include "dlp/report.hpp"
#include "dlp/store.hpp"
#include "dlp/syngen.hpp"

#include "oracle.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace dlp;

namespace {

int failures = 0;

void verdict(int number, bool pass, const std::string& name, const std::string& detail = "") {
    std::printf("%s  %d  %s%s%s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) {
        ++failures;
    }
}

struct TempDir {
    fs::path path;

    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path = fs::temp_directory_path() /
               ("awaccept." + std::to_string(rng()) + "." + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ACCESSWATCH_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.push_back("");
    }
    return fields;
}

double piecewise(double t, double k, double m, const std::vector<double>& cps,
                 const std::vector<double>& deltas) {
    double g = k * t + m;
    for (std::size_t j = 0; j < cps.size(); ++j) {
        if (t >= cps[j]) {
            g += deltas[j] * (t - cps[j]);
        }
    }
    return g;
}

UserSeries series_of(std::vector<double> values) {
    UserSeries s;
    s.user_id = "u";
    s.granularity = Granularity::ANNUAL;
    s.origin = *parse_date("2014-01-01");
    s.values = std::move(values);
    return s;
}

// Runs simulate -> ingest -> fit -> forecast -> report in `dir` and
// returns true when every CLI step exits 0.
bool run_pipeline(const fs::path& dir) {
    const auto csv = dir / "sim.csv";
    const auto store = dir / "store";
    const auto report_csv = dir / "report.csv";
    const auto rank_csv = dir / "rank.csv";
    if (run_cli("simulate --out " + csv.string() +
                " --users 10 --from 2014-01-01 --to 2018-12-31 --granularity annual"
                " --cap 80 --leaker user03 --leak-start 2018-01-01 --leak-slope 15"
                " --noise 0 --seed 20140101") != 0)
        return false;
    if (run_cli("ingest --store " + store.string() + " --input " + csv.string()) != 0)
        return false;
    if (run_cli("fit --store " + store.string() + " --all") != 0)
        return false;
    if (run_cli("forecast --store " + store.string() + " --all --horizon 1 --out " +
                report_csv.string()) != 0)
        return false;
    if (run_cli("report --store " + store.string() + " --out " + rank_csv.string()) != 0)
        return false;
    return true;
}

// ----------------------------------------------------------------------
// 1. Leak-scenario reproduction: 10 users, annual 2014-2018, one leaker
//    ramping 15 min/period from 2018; leaker is rank 1 with a 2019
//    breach and RESTRICT/BLOCK, everyone else ALLOW with severity 0.
void criterion_1(const fs::path& dir) {
    const auto started = std::chrono::steady_clock::now();
    if (!run_pipeline(dir)) {
        verdict(1, false, "leak-scenario reproduction", "pipeline step failed");
        return;
    }
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);

    std::string detail;
    bool pass = true;

    const auto rank_lines = lines_of(slurp(dir / "rank.csv"));
    if (rank_lines.size() != 11) {
        pass = false;
        detail = "expected 10 ranked users";
    } else {
        const auto top = split_csv(rank_lines[1]);
        if (top[0] != "user03" || !(std::stod(top[1]) > 0.0) ||
            (top[2] != "RESTRICT" && top[2] != "BLOCK")) {
            pass = false;
            detail = "leaker not rank 1 with RESTRICT/BLOCK: " + rank_lines[1];
        }
        for (std::size_t i = 2; i < rank_lines.size() && pass; ++i) {
            const auto row = split_csv(rank_lines[i]);
            if (std::stod(row[1]) != 0.0 || row[2] != "ALLOW") {
                pass = false;
                detail = "non-leaker flagged: " + rank_lines[i];
            }
        }
    }

    bool found_2019 = false;
    for (const auto& line : lines_of(slurp(dir / "report.csv"))) {
        const auto fields = split_csv(line);
        if (fields.size() >= 11 && fields[0] == "user03" && fields[2] == "2019-01-01") {
            found_2019 = true;
            if (fields[9] != "true") {
                pass = false;
                detail = "2019 row not a breach: " + line;
            }
            if (fields[10] != "RESTRICT" && fields[10] != "BLOCK") {
                pass = false;
                detail = "2019 action not RESTRICT/BLOCK: " + line;
            }
        }
    }
    if (!found_2019) {
        pass = false;
        detail = "no 2019 report row for the leaker";
    }
    if (elapsed.count() >= 5.0) {
        pass = false;
        detail = "pipeline took " + std::to_string(elapsed.count()) + "s";
    }
    verdict(1, pass, "leak-scenario reproduction (10 users, annual 2014-2018, slope 15)",
            detail);
}

// ----------------------------------------------------------------------
// 2. Noiseless piecewise-linear series with breakpoints among the
//    candidates are reproduced exactly (<= 1e-6) at lambda = 0.
void criterion_2() {
    std::mt19937_64 rng(1202);
    std::uniform_int_distribution<int> n_dist(8, 30);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);

    bool pass = true;
    std::string detail;
    for (int trial = 0; trial < 20 && pass; ++trial) {
        const int n = n_dist(rng);
        FitConfig cfg;
        cfg.n_changepoints = std::min(4, (n - 1) / 3);
        cfg.cp_range = 0.8;
        cfg.lambda = 0.0;
        const auto candidates = place_changepoints(n, cfg);

        std::vector<double> cps;
        std::vector<double> deltas;
        for (const double s : candidates) {
            if (rng() % 2 == 0) {
                cps.push_back(s);
                deltas.push_back(coef(rng));
            }
        }
        const double k = coef(rng);
        const double m = 10.0 * coef(rng);
        std::vector<double> values;
        for (int t = 0; t < n; ++t) {
            values.push_back(piecewise(t, k, m, cps, deltas));
        }

        const auto model = fit_trend(series_of(values), cfg);
        for (int t = 0; t < n; ++t) {
            const double err =
                std::abs(eval_trend(model, t) - values[static_cast<std::size_t>(t)]);
            if (err > 1e-6) {
                pass = false;
                detail = "trial " + std::to_string(trial) + ": |error| = " +
                         format_double(err) + " at t = " + std::to_string(t);
                break;
            }
        }
    }
    verdict(2, pass, "exact trend recovery at lambda=0 (20 randomized instances)", detail);
}

// ----------------------------------------------------------------------
// 3. Main fitter vs brute-force normal-equations oracle, systems up to
//    30 points x 10 changepoints, all coefficients within 1e-8 relative.
void criterion_3() {
    std::mt19937_64 rng(1303);
    std::uniform_real_distribution<double> y_dist(-100.0, 100.0);
    const double lambdas[] = {0.0, 0.01, 0.1, 1.0, 10.0};

    bool pass = true;
    std::string detail;
    int trial = 0;
    for (int n = 5; n <= 30 && pass; ++n) {
        FitConfig cfg;
        cfg.n_changepoints =
            std::min(10, static_cast<int>(cfg.cp_range * (n - 1) / 2.0));
        const auto cps = place_changepoints(n, cfg);

        std::vector<double> times;
        std::vector<double> values;
        for (int t = 0; t < n; ++t) {
            times.push_back(t);
            values.push_back(y_dist(rng));
        }
        const double lambda = lambdas[trial++ % 5];

        const auto coef = fit_hinge_ls(times, values, cps, lambda);
        const auto beta = oracle::fit_hinge(times, values, cps, lambda);
        std::vector<double> ours = {coef.k, coef.m_offset};
        ours.insert(ours.end(), coef.delta.begin(), coef.delta.end());
        for (std::size_t i = 0; i < ours.size(); ++i) {
            const double rel = std::abs(ours[i] - beta[i]) /
                               std::max({std::abs(ours[i]), std::abs(beta[i]), 1.0});
            if (rel > 1e-8) {
                pass = false;
                detail = "n=" + std::to_string(n) + " coefficient " + std::to_string(i) +
                         " rel err " + format_double(rel);
                break;
            }
        }
    }
    verdict(3, pass, "fitter matches brute-force oracle to 1e-8 (up to 30 pts x 10 cps)",
            detail);
}

// ----------------------------------------------------------------------
// 4. Continuity at every changepoint of fitted models.
void criterion_4() {
    std::mt19937_64 rng(1404);
    std::uniform_real_distribution<double> y_dist(-50.0, 50.0);

    bool pass = true;
    std::string detail;
    for (int trial = 0; trial < 30 && pass; ++trial) {
        const int n = 8 + trial;
        FitConfig cfg;
        cfg.n_changepoints = std::min(10, n - 2);
        cfg.lambda = trial % 2 == 0 ? 0.01 : 1.0;
        std::vector<double> values;
        for (int t = 0; t < n; ++t) {
            values.push_back(y_dist(rng));
        }
        const auto model = fit_trend(series_of(values), cfg);
        for (const double s : model.changepoints) {
            const double left = eval_trend(model, s - 1e-9);
            const double right = eval_trend(model, s + 1e-9);
            const double at = eval_trend(model, s);
            if (std::abs(left - right) > 1e-6 * (1.0 + std::abs(at))) {
                pass = false;
                detail = "jump " + format_double(std::abs(left - right)) + " at s = " +
                         format_double(s);
                break;
            }
        }
    }
    verdict(4, pass, "trend continuity at every fitted changepoint", detail);
}

// ----------------------------------------------------------------------
// 5. Error statistics match a two-pass oracle to 1e-12 relative; the
//    epsilon = [1,2,3] case gives mu = 2, sigma = sqrt(2/3).
void criterion_5() {
    bool pass = true;
    std::string detail;

    const auto fixed = error_stats({1.0, 2.0, 3.0}, {0.0, 0.0, 0.0}, 0.0);
    if (std::abs(fixed.mu - 2.0) > 1e-15 ||
        std::abs(fixed.sigma - std::sqrt(2.0 / 3.0)) > 1e-15) {
        pass = false;
        detail = "epsilon=[1,2,3] gave mu=" + format_double(fixed.mu) +
                 " sigma=" + format_double(fixed.sigma);
    }

    std::mt19937_64 rng(1505);
    std::uniform_int_distribution<int> len(1, 100);
    std::uniform_real_distribution<double> dist(-1000.0, 1000.0);
    for (int trial = 0; trial < 100 && pass; ++trial) {
        const int n = len(rng);
        std::vector<double> y(static_cast<std::size_t>(n));
        std::vector<double> yhat(static_cast<std::size_t>(n));
        for (auto& v : y) v = dist(rng);
        for (auto& v : yhat) v = dist(rng);
        const auto stats = error_stats(y, yhat, 0.0);
        const auto expected = oracle::mean_std(stats.abs_err);
        const double mu_rel =
            std::abs(stats.mu - expected.mu) / std::max(1.0, std::abs(expected.mu));
        const double sigma_rel =
            std::abs(stats.sigma - expected.sigma) / std::max(1.0, std::abs(expected.sigma));
        if (mu_rel > 1e-12 || sigma_rel > 1e-12) {
            pass = false;
            detail = "trial " + std::to_string(trial) + " rel errs " + format_double(mu_rel) +
                     ", " + format_double(sigma_rel);
        }
    }
    verdict(5, pass, "error stats match two-pass oracle to 1e-12 (100 vectors)", detail);
}

// ----------------------------------------------------------------------
// 6. Band properties: exact symmetry, exact literal width, and actions
//    monotone nonincreasing in varsigma over {0.5, 1, 2, 4}.
void criterion_6() {
    bool pass = true;
    std::string detail;

    std::mt19937_64 rng(1606);
    std::uniform_real_distribution<double> dist(0.0, 100.0);
    for (int trial = 0; trial < 50 && pass; ++trial) {
        std::vector<double> yhat(25);
        for (auto& v : yhat) v = dist(rng) - 50.0;
        const double mu = dist(rng) / 10.0;
        const double sigma = dist(rng) / 10.0;
        const double varsigma = 0.25 + dist(rng) / 25.0;
        const auto b = bounds(yhat, mu, sigma, varsigma);
        const double w = mu * varsigma * sigma;
        for (std::size_t i = 0; i < yhat.size(); ++i) {
            if (b.upper[i] != yhat[i] + w || b.lower[i] != yhat[i] - w) {
                pass = false;
                detail = "symmetry or width not exact at i = " + std::to_string(i);
                break;
            }
        }
    }

    if (pass) {
        // Leak scenario, evaluated at increasing varsigma: no user's
        // action may escalate as the band widens.
        ScenarioConfig scenario;
        scenario.n_users = 10;
        scenario.start = *parse_date("2014-01-01");
        scenario.end = *parse_date("2018-12-31");
        scenario.granularity = Granularity::ANNUAL;
        scenario.leaker_id = "user03";
        scenario.leak_start = *parse_date("2018-01-01");
        scenario.leak_slope = 15.0;
        scenario.noise_scale = 4.0;
        scenario.seed = 20140101;
        const auto series = aggregate(generate(scenario), Granularity::ANNUAL);

        const double grid[] = {0.5, 1.0, 2.0, 4.0};
        std::map<std::string, std::vector<int>> levels;
        for (const double varsigma : grid) {
            BandConfig band;
            band.varsigma = varsigma;
            const auto outcomes = fit_models(series, FitConfig{}, band);
            for (const auto& outcome : outcomes) {
                if (!outcome.ok) {
                    continue;
                }
                const auto eval = evaluate_user(
                    outcome.stored.model, series.at(outcome.user_id), outcome.stored.mu,
                    outcome.stored.sigma, band, Thresholds{}, 1);
                int level = 0;
                for (const auto& d : eval.decisions) {
                    level = std::max(level, static_cast<int>(d.action));
                }
                levels[outcome.user_id].push_back(level);
            }
        }
        for (const auto& [user, level_by_varsigma] : levels) {
            for (std::size_t i = 1; i < level_by_varsigma.size(); ++i) {
                if (level_by_varsigma[i] > level_by_varsigma[i - 1]) {
                    pass = false;
                    detail = "action escalated with wider band for " + user;
                }
            }
        }
    }
    verdict(6, pass, "band symmetry/width exact; actions monotone in varsigma", detail);
}

// ----------------------------------------------------------------------
// 7. Running the criterion-1 pipeline twice produces byte-identical
//    artifacts.
void criterion_7(const fs::path& first_run) {
    TempDir second;
    bool pass = run_pipeline(second.path);
    std::string detail;
    if (!pass) {
        detail = "second pipeline run failed";
    } else {
        if (slurp(first_run / "report.csv") != slurp(second.path / "report.csv")) {
            pass = false;
            detail = "report CSVs differ";
        }
        if (slurp(first_run / "rank.csv") != slurp(second.path / "rank.csv")) {
            pass = false;
            detail = "ranking CSVs differ";
        }
        const fs::path models_a = first_run / "store" / "models";
        const fs::path models_b = second.path / "store" / "models";
        std::size_t compared = 0;
        for (const auto& entry : fs::directory_iterator(models_a)) {
            if (entry.path().extension() != ".json") {
                continue;
            }
            ++compared;
            if (slurp(entry.path()) != slurp(models_b / entry.path().filename())) {
                pass = false;
                detail = "model JSON differs: " + entry.path().filename().string();
            }
        }
        if (compared != 10) {
            pass = false;
            detail = "expected 10 model files, saw " + std::to_string(compared);
        }
    }
    verdict(7, pass, "full pipeline is byte-identical across runs", detail);
}

// ----------------------------------------------------------------------
// 8. 1000 randomized models survive save -> load -> save byte-identically.
void criterion_8() {
    std::mt19937_64 rng(1808);
    std::uniform_real_distribution<double> coef(-1e6, 1e6);
    std::uniform_int_distribution<int> n_cps(0, 12);
    std::uniform_int_distribution<int> gran(0, 3);

    TempDir tmp;
    Store store(tmp.path / "store");
    bool pass = true;
    std::string detail;
    for (int trial = 0; trial < 1000 && pass; ++trial) {
        StoredModel stored;
        stored.model.user_id = "user " + std::to_string(trial) + "/x";
        stored.model.k = coef(rng);
        stored.model.m_offset = coef(rng);
        const int j = n_cps(rng);
        for (int i = 0; i < j; ++i) {
            stored.model.changepoints.push_back(i + coef(rng) / 1e7);
            stored.model.delta.push_back(coef(rng));
            stored.model.gamma.push_back(-stored.model.changepoints.back() *
                                         stored.model.delta.back());
        }
        stored.model.lambda = std::abs(coef(rng)) / 1e3;
        stored.model.n_train = 3 + trial % 40;
        stored.model.granularity = static_cast<Granularity>(gran(rng));
        stored.model.origin = *parse_date("2014-01-01");
        stored.mu = std::abs(coef(rng));
        stored.sigma = std::abs(coef(rng));
        stored.band.alpha = coef(rng);
        stored.band.varsigma = 0.01 + std::abs(coef(rng)) / 1e4;
        stored.band.mode = trial % 2 == 0 ? BandMode::Literal : BandMode::MuPlus;

        const auto path = store.save_model(stored);
        const std::string first = slurp(path);
        const auto loaded = store.load_model(stored.model.user_id);
        store.save_model(loaded);
        const std::string second = slurp(path);
        if (first != second || first.empty()) {
            pass = false;
            detail = "trial " + std::to_string(trial);
        }
    }
    verdict(8, pass, "1000 randomized models round-trip byte-identically", detail);
}

} // namespace

int main() {
    TempDir scenario_dir;
    criterion_1(scenario_dir.path);
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7(scenario_dir.path);
    criterion_8();

    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", failures);
    return 1;
}
