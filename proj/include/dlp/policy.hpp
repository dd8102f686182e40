#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dlp {

enum class Action { ALLOW, ALERT, RESTRICT, BLOCK };

std::string_view action_name(Action action);
std::optional<Action> parse_action(std::string_view text);

enum class PointKind { OBSERVED, FORECAST };

// One per-period verdict: how far the value sits above the allowed band
// and what enforcement that earns.
struct AccessDecision {
    std::string user_id;
    int period = 0;
    PointKind kind = PointKind::OBSERVED;
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double excess = 0.0;   // max(0, value - upper)
    double severity = 0.0; // excess / max(half-width, 1e-9)
    Action action = Action::ALLOW;
};

struct Thresholds {
    double alert = 0.0;
    double restrict = 1.0;
    double block = 3.0;

    void validate() const; // requires 0 <= alert <= restrict <= block
};

struct Classification {
    double excess = 0.0;
    bool breach = false;
};

// Upper-bound test. Values at or below the bound are allowed; values
// below `lower` are benign under-use, never a breach.
Classification classify_point(double value, double lower, double upper);

// Severity of an excess relative to the band half-width (unit-free).
double breach_severity(double excess, double half_width);

// ALLOW at severity 0, then ALERT / RESTRICT / BLOCK by threshold ladder.
Action decide_action(double severity, const Thresholds& thresholds);

struct SuspectRank {
    std::string user_id;
    double max_severity = 0.0;
    Action action = Action::ALLOW;
};

// One entry per distinct user, ordered by descending maximum severity,
// ties broken by ascending user_id. Clean users keep severity 0 at the
// tail.
std::vector<SuspectRank> rank_suspects(const std::vector<AccessDecision>& decisions,
                                       const Thresholds& thresholds);

} // namespace dlp
