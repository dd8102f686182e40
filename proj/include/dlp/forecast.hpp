#pragma once

#include "dlp/trend.hpp"

#include <string>
#include <vector>

namespace dlp {

struct ForecastSeries {
    std::string user_id;
    std::vector<double> times;
    std::vector<double> yhat;
    int horizon_start = 0; // index in `times` where extrapolation begins
};

// Fitted values over the training periods. The series must be the one the
// model was trained on (same length).
ForecastSeries predict_in_sample(const TrendModel& model, const UserSeries& series);

// Trend extrapolation for t = n_train .. n_train+horizon-1. All
// changepoints lie inside the training range, so this continues the final
// cumulative slope; no new changepoints are introduced.
ForecastSeries forecast_future(const TrendModel& model, int horizon);

} // namespace dlp
