#include "dlp/syngen.hpp"

#include "dlp/errors.hpp"
#include "dlp/numfmt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace dlp {

std::uint64_t SplitMix64::next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::next_in(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (const unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

void ScenarioConfig::validate() const {
    if (n_users < 1) {
        throw InvalidConfig("scenario: n_users must be >= 1");
    }
    if (std::chrono::sys_days{start} > std::chrono::sys_days{end}) {
        throw InvalidConfig("scenario: start after end");
    }
    if (!(normal_cap > 0.0)) {
        throw InvalidConfig("scenario: normal_cap must be > 0");
    }
    if (noise_scale < 0.0) {
        throw InvalidConfig("scenario: noise_scale must be >= 0");
    }
    if (!leaker_id.empty()) {
        if (!(leak_slope > 0.0)) {
            throw InvalidConfig("scenario: leak_slope must be > 0");
        }
        if (std::chrono::sys_days{leak_start} < std::chrono::sys_days{start}) {
            throw InvalidConfig("scenario: leak_start before scenario start");
        }
    }
}

std::vector<std::string> scenario_user_ids(const ScenarioConfig& cfg) {
    const int width = std::clamp(static_cast<int>(std::to_string(cfg.n_users).size()), 2, 9);
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(cfg.n_users) + 1);
    for (int i = 1; i <= cfg.n_users; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "user%0*d", width, i);
        ids.emplace_back(buf);
    }
    if (!cfg.leaker_id.empty() &&
        std::find(ids.begin(), ids.end(), cfg.leaker_id) == ids.end()) {
        ids.push_back(cfg.leaker_id);
    }
    return ids;
}

namespace {

std::vector<AccessRecord> generate_user(const ScenarioConfig& cfg, const std::string& user,
                                        long n_periods, long leak_period) {
    SplitMix64 rng(cfg.seed ^ fnv1a64(user));
    const double baseline = rng.next_in(0.3, 0.8) * cfg.normal_cap;
    const bool leaking = user == cfg.leaker_id;
    const CivilDate origin = period_start_of(cfg.start, cfg.granularity);

    std::vector<AccessRecord> records;
    records.reserve(static_cast<std::size_t>(n_periods));
    for (long p = 0; p < n_periods; ++p) {
        const double noise = rng.next_in(-cfg.noise_scale, cfg.noise_scale);
        double total = baseline + noise;
        if (leaking && p >= leak_period) {
            // First leak period already shows one slope step.
            total += cfg.leak_slope * static_cast<double>(p - leak_period + 1);
        }
        total = std::max(0.0, total);
        records.push_back({user, period_start(origin, p, cfg.granularity), total});
    }
    return records;
}

} // namespace

std::vector<AccessRecord> generate(const ScenarioConfig& cfg, Exec exec) {
    cfg.validate();
    const CivilDate origin = period_start_of(cfg.start, cfg.granularity);
    const long n_periods = period_index(origin, cfg.end, cfg.granularity) + 1;
    const long leak_period =
        cfg.leaker_id.empty() ? n_periods : period_index(origin, cfg.leak_start, cfg.granularity);
    const auto users = scenario_user_ids(cfg);

    std::vector<std::vector<AccessRecord>> per_user(users.size());
    const std::int64_t n_users = static_cast<std::int64_t>(users.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
#else
    (void)exec;
#endif
    for (std::int64_t i = 0; i < n_users; ++i) {
        per_user[static_cast<std::size_t>(i)] =
            generate_user(cfg, users[static_cast<std::size_t>(i)], n_periods, leak_period);
    }

    std::vector<AccessRecord> records;
    records.reserve(users.size() * static_cast<std::size_t>(n_periods));
    for (auto& chunk : per_user) {
        records.insert(records.end(), std::make_move_iterator(chunk.begin()),
                       std::make_move_iterator(chunk.end()));
    }
    return records;
}

std::string records_to_csv(const std::vector<AccessRecord>& records) {
    std::string out = "user_id,date,duration_min\n";
    for (const auto& r : records) {
        out += r.user_id;
        out += ',';
        out += format_date(r.date);
        out += ',';
        out += format_double(r.duration_min);
        out += '\n';
    }
    return out;
}

} // namespace dlp
