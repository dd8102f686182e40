#pragma once

#include "dlp/bands.hpp"
#include "dlp/forecast.hpp"
#include "dlp/policy.hpp"
#include "dlp/store.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dlp {

// One plottable record per user and period: actuals where known, the
// fitted/extrapolated trend, the allowed band, and the verdict.
struct ReportRow {
    std::string user_id;
    int period_index = 0;
    std::string period_label; // ISO date of the period start
    std::optional<double> y;
    double yhat = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    std::optional<double> epsilon;
    std::optional<double> xi;
    bool breach = false;
    Action action = Action::ALLOW;
};

struct UserEvaluation {
    std::vector<ReportRow> rows;
    std::vector<AccessDecision> decisions;
};

// Runs one user through banding and policy. Training periods compare the
// observed total against its own band. Horizon periods compare the
// extrapolated trend against the band at the end of training, carried
// forward as the user's standing access limit (a trend cannot breach a
// band recentred on itself).
UserEvaluation evaluate_user(const TrendModel& model, const UserSeries& series,
                             double mu, double sigma, const BandConfig& band,
                             const Thresholds& thresholds, int horizon);

extern const char* const kReportHeader; // user_id,period_index,...,action

std::string report_to_csv(const std::vector<ReportRow>& rows);
std::string ranking_to_csv(const std::vector<SuspectRank>& ranking);

} // namespace dlp
