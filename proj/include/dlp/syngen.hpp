#pragma once

#include "dlp/exec.hpp"
#include "dlp/records.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dlp {

// splitmix64: tiny, seedable, reproducible across platforms.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next();
    double next_unit();                     // [0, 1)
    double next_in(double lo, double hi);   // [lo, hi)
};

std::uint64_t fnv1a64(std::string_view text);

// Synthetic access-log scenario: a population of steady users below a
// cap, optionally one user whose access ramps up from leak_start.
struct ScenarioConfig {
    int n_users = 10;
    CivilDate start{};
    CivilDate end{};
    Granularity granularity = Granularity::ANNUAL;
    double normal_cap = 80.0;  // minutes; normal totals stay below this
    std::string leaker_id;     // empty: nobody leaks
    CivilDate leak_start{};
    double leak_slope = 15.0;  // minutes/period added per period of leaking
    double noise_scale = 0.0;  // uniform on [-noise_scale, +noise_scale]
    std::uint64_t seed = 1;

    void validate() const;
};

// Deterministic for a fixed config: each user draws from its own
// splitmix64 stream seeded by (seed XOR fnv1a64(user_id)), so output is
// independent of generation order. One record per period, dated at the
// period start.
std::vector<AccessRecord> generate(const ScenarioConfig& cfg, Exec exec = Exec::Serial);

// The generated population's user ids: user01..userNN plus the leaker
// (appended when not already one of them).
std::vector<std::string> scenario_user_ids(const ScenarioConfig& cfg);

// Ingest-format CSV (header + one row per record).
std::string records_to_csv(const std::vector<AccessRecord>& records);

} // namespace dlp
