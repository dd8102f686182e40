// Compares the serial reference kernels against their OpenMP versions:
// batch model fitting, error statistics, bound evaluation, and scenario
// generation. Run with --quick for a fast smoke pass.

#include "dlp/batch.hpp"
#include "dlp/syngen.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

using namespace dlp;

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <typename Fn>
double time_best_of(int repeats, Fn&& fn) {
    fn(); // warm allocator and page cache so the first variant isn't penalized
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const double started = now_seconds();
        fn();
        const double elapsed = now_seconds() - started;
        if (elapsed < best) {
            best = elapsed;
        }
    }
    return best;
}

void print_row(const char* kernel, double serial_s, double parallel_s) {
    std::printf("%-22s %10.4fs %10.4fs %8.2fx\n", kernel, serial_s, parallel_s,
                parallel_s > 0.0 ? serial_s / parallel_s : 0.0);
}

} // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;

    const int n_users = quick ? 40 : 800;
    const int n_years = quick ? 3 : 6; // daily periods: years * 365
    const std::size_t vec_len = quick ? 200000 : 20000000;

    ScenarioConfig scenario;
    scenario.n_users = n_users;
    scenario.start = *parse_date("2010-01-01");
    scenario.end = *parse_date(std::to_string(2010 + n_years - 1) + "-12-28");
    scenario.granularity = Granularity::DAILY;
    scenario.noise_scale = 10.0;
    scenario.seed = 99;

    std::printf("threads=%d users=%d periods/user=%ld vector=%zu\n\n", hardware_threads(),
                n_users, period_index(scenario.start, scenario.end, Granularity::DAILY) + 1,
                vec_len);
    std::printf("%-22s %11s %11s %9s\n", "kernel", "serial", "openmp", "speedup");

    // Scenario generation.
    const double gen_serial = time_best_of(2, [&] { generate(scenario, Exec::Serial); });
    const double gen_parallel = time_best_of(2, [&] { generate(scenario, Exec::Parallel); });
    print_row("generate", gen_serial, gen_parallel);

    const auto records = generate(scenario, Exec::Parallel);
    const auto series = aggregate(records, Granularity::DAILY);

    // Batch trend fitting.
    FitConfig fit_cfg;
    fit_cfg.n_changepoints = 25;
    std::vector<FitOutcome> fitted;
    const double fit_serial = time_best_of(
        1, [&] { fitted = fit_models(series, fit_cfg, BandConfig{}, Exec::Serial); });
    const double fit_parallel = time_best_of(
        1, [&] { fitted = fit_models(series, fit_cfg, BandConfig{}, Exec::Parallel); });
    print_row("fit_models", fit_serial, fit_parallel);

    // Error statistics over one long vector.
    std::vector<double> y(vec_len);
    std::vector<double> yhat(vec_len);
    SplitMix64 rng(7);
    for (std::size_t i = 0; i < vec_len; ++i) {
        y[i] = rng.next_in(0.0, 100.0);
        yhat[i] = rng.next_in(0.0, 100.0);
    }
    ErrorStats stats;
    const double stats_serial =
        time_best_of(3, [&] { stats = error_stats(y, yhat, 0.0, Exec::Serial); });
    const double stats_parallel =
        time_best_of(3, [&] { stats = error_stats(y, yhat, 0.0, Exec::Parallel); });
    print_row("error_stats", stats_serial, stats_parallel);

    // Bound evaluation over the same vector.
    const double bounds_serial = time_best_of(
        3, [&] { bounds(yhat, stats.mu, stats.sigma, 2.0, BandMode::Literal, Exec::Serial); });
    const double bounds_parallel = time_best_of(
        3, [&] { bounds(yhat, stats.mu, stats.sigma, 2.0, BandMode::Literal, Exec::Parallel); });
    print_row("bounds", bounds_serial, bounds_parallel);

    // Sanity: parallel and serial fits agree on a sample user.
    for (const auto& outcome : fitted) {
        if (!outcome.ok) {
            std::printf("\nfit failed for %s: %s\n", outcome.user_id.c_str(),
                        outcome.error.c_str());
            return 1;
        }
    }
    std::printf("\nall kernels completed; %zu users fitted\n", fitted.size());
    return 0;
}
