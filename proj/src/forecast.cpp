#include "dlp/forecast.hpp"

#include "dlp/errors.hpp"

namespace dlp {

ForecastSeries predict_in_sample(const TrendModel& model, const UserSeries& series) {
    if (static_cast<int>(series.size()) != model.n_train) {
        throw LengthMismatch("predict_in_sample: series length " +
                             std::to_string(series.size()) + " != n_train " +
                             std::to_string(model.n_train));
    }
    ForecastSeries out;
    out.user_id = model.user_id;
    out.times = series.times();
    out.yhat.reserve(series.size());
    for (const double t : out.times) {
        out.yhat.push_back(eval_trend(model, t));
    }
    out.horizon_start = model.n_train;
    return out;
}

ForecastSeries forecast_future(const TrendModel& model, int horizon) {
    if (horizon < 1) {
        throw InvalidConfig("forecast_future: horizon must be >= 1");
    }
    ForecastSeries out;
    out.user_id = model.user_id;
    out.times.reserve(static_cast<std::size_t>(horizon));
    out.yhat.reserve(static_cast<std::size_t>(horizon));
    for (int h = 0; h < horizon; ++h) {
        const double t = static_cast<double>(model.n_train + h);
        out.times.push_back(t);
        out.yhat.push_back(eval_trend(model, t));
    }
    out.horizon_start = model.n_train;
    return out;
}

} // namespace dlp
