#include "dlp/policy.hpp"

#include "dlp/errors.hpp"

#include <algorithm>
#include <map>

namespace dlp {

namespace {

constexpr double kHalfWidthFloor = 1e-9;

} // namespace

std::string_view action_name(Action action) {
    switch (action) {
    case Action::ALLOW: return "ALLOW";
    case Action::ALERT: return "ALERT";
    case Action::RESTRICT: return "RESTRICT";
    case Action::BLOCK: return "BLOCK";
    }
    return "ALLOW";
}

std::optional<Action> parse_action(std::string_view text) {
    if (text == "ALLOW") return Action::ALLOW;
    if (text == "ALERT") return Action::ALERT;
    if (text == "RESTRICT") return Action::RESTRICT;
    if (text == "BLOCK") return Action::BLOCK;
    return std::nullopt;
}

void Thresholds::validate() const {
    if (!(0.0 <= alert && alert <= restrict && restrict <= block)) {
        throw InvalidThresholds("thresholds must satisfy 0 <= alert <= restrict <= block");
    }
}

Classification classify_point(double value, double lower, double upper) {
    if (upper < lower) {
        throw InvalidBand("classify_point: upper < lower");
    }
    Classification c;
    c.excess = std::max(0.0, value - upper);
    c.breach = value > upper;
    return c;
}

double breach_severity(double excess, double half_width) {
    return excess / std::max(half_width, kHalfWidthFloor);
}

Action decide_action(double severity, const Thresholds& thresholds) {
    thresholds.validate();
    if (severity <= 0.0) {
        return Action::ALLOW;
    }
    if (severity >= thresholds.block) {
        return Action::BLOCK;
    }
    if (severity >= thresholds.restrict) {
        return Action::RESTRICT;
    }
    return Action::ALERT;
}

std::vector<SuspectRank> rank_suspects(const std::vector<AccessDecision>& decisions,
                                       const Thresholds& thresholds) {
    std::map<std::string, double> max_severity;
    for (const auto& d : decisions) {
        auto [it, inserted] = max_severity.try_emplace(d.user_id, d.severity);
        if (!inserted) {
            it->second = std::max(it->second, d.severity);
        }
    }
    std::vector<SuspectRank> ranking;
    ranking.reserve(max_severity.size());
    for (const auto& [user, severity] : max_severity) {
        ranking.push_back({user, severity, decide_action(severity, thresholds)});
    }
    std::stable_sort(ranking.begin(), ranking.end(),
                     [](const SuspectRank& a, const SuspectRank& b) {
                         if (a.max_severity != b.max_severity) {
                             return a.max_severity > b.max_severity;
                         }
                         return a.user_id < b.user_id;
                     });
    return ranking;
}

} // namespace dlp
