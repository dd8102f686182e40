#include "dlp/report.hpp"

#include "dlp/numfmt.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace dlp {

const char* const kReportHeader =
    "user_id,period_index,period_label,y,yhat,lower,upper,epsilon,xi,breach,action";

namespace {

// Overhangs at rounding scale are fit roundoff, not access anomalies:
// a noiseless constant series must come out of the pipeline with
// severity exactly 0.
Classification classify_with_slack(double value, double lower, double upper) {
    auto verdict = classify_point(value, lower, upper);
    const double slack = 1e-9 * std::max({1.0, std::abs(value), std::abs(upper)});
    if (verdict.excess <= slack) {
        verdict.excess = 0.0;
        verdict.breach = false;
    }
    return verdict;
}

} // namespace

UserEvaluation evaluate_user(const TrendModel& model, const UserSeries& series,
                             double mu, double sigma, const BandConfig& band,
                             const Thresholds& thresholds, int horizon) {
    band.validate();
    thresholds.validate();

    auto in_sample = predict_in_sample(model, series);
    const double w = band_half_width(mu, sigma, band.varsigma, band.mode);
    const auto banded = band_forecast(model.user_id, std::move(in_sample.times), series.values,
                                      std::move(in_sample.yhat), mu, sigma, band);

    UserEvaluation out;
    const std::size_t n = series.size();
    out.rows.reserve(n + static_cast<std::size_t>(std::max(0, horizon)));

    for (std::size_t i = 0; i < n; ++i) {
        const double y = series.values[i];
        const auto verdict = classify_with_slack(y, banded.lower[i], banded.upper[i]);
        const double severity = breach_severity(verdict.excess, w);
        const Action action = decide_action(severity, thresholds);

        const double eps = residual(y, banded.yhat[i], band.alpha);
        ReportRow row;
        row.user_id = model.user_id;
        row.period_index = static_cast<int>(i);
        row.period_label =
            format_date(period_start(model.origin, static_cast<long>(i), model.granularity));
        row.y = y;
        row.yhat = banded.yhat[i];
        row.lower = banded.lower[i];
        row.upper = banded.upper[i];
        row.epsilon = eps;
        row.xi = pct_error(eps, y, band.alpha);
        row.breach = verdict.breach;
        row.action = action;
        out.rows.push_back(row);

        out.decisions.push_back({model.user_id, static_cast<int>(i), PointKind::OBSERVED, y,
                                 banded.lower[i], banded.upper[i], verdict.excess,
                                 severity, action});
    }

    if (horizon >= 1) {
        const auto future = forecast_future(model, horizon);
        // The band at the end of training is the user's standing access
        // limit; extrapolated periods are judged against it. A band
        // recentred on the forecast itself could never flag anything.
        const double edge = eval_trend(model, static_cast<double>(model.n_train - 1));
        const double limit_lower = edge - w;
        const double limit_upper = edge + w;

        for (int h = 0; h < horizon; ++h) {
            const int period = model.n_train + h;
            const double value = future.yhat[static_cast<std::size_t>(h)];
            const auto verdict = classify_with_slack(value, limit_lower, limit_upper);
            const double severity = breach_severity(verdict.excess, w);
            const Action action = decide_action(severity, thresholds);

            ReportRow row;
            row.user_id = model.user_id;
            row.period_index = period;
            row.period_label =
                format_date(period_start(model.origin, period, model.granularity));
            row.yhat = value;
            row.lower = limit_lower;
            row.upper = limit_upper;
            row.breach = verdict.breach;
            row.action = action;
            out.rows.push_back(row);

            out.decisions.push_back({model.user_id, period, PointKind::FORECAST, value,
                                     limit_lower, limit_upper, verdict.excess, severity,
                                     action});
        }
    }
    return out;
}

std::string report_to_csv(const std::vector<ReportRow>& rows) {
    std::string out = kReportHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += r.user_id;
        out += ',';
        out += std::to_string(r.period_index);
        out += ',';
        out += r.period_label;
        out += ',';
        out += format_optional(r.y);
        out += ',';
        out += format_double(r.yhat);
        out += ',';
        out += format_double(r.lower);
        out += ',';
        out += format_double(r.upper);
        out += ',';
        out += format_optional(r.epsilon);
        out += ',';
        out += format_optional(r.xi);
        out += ',';
        out += r.breach ? "true" : "false";
        out += ',';
        out += action_name(r.action);
        out += '\n';
    }
    return out;
}

std::string ranking_to_csv(const std::vector<SuspectRank>& ranking) {
    std::string out = "user_id,max_severity,action\n";
    for (const auto& r : ranking) {
        out += r.user_id;
        out += ',';
        out += format_double(r.max_severity);
        out += ',';
        out += action_name(r.action);
        out += '\n';
    }
    return out;
}

} // namespace dlp
