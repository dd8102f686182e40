#include "dlp/numfmt.hpp"
#include "dlp/report.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace dlp;

namespace {

UserSeries make_series(std::vector<double> values) {
    UserSeries s;
    s.user_id = "u";
    s.granularity = Granularity::ANNUAL;
    s.origin = *parse_date("2014-01-01");
    s.values = std::move(values);
    return s;
}

} // namespace

TEST_CASE("evaluate_user emits training rows plus horizon rows") {
    const auto series = make_series({10, 10, 10, 10, 10});
    FitConfig cfg;
    const auto model = fit_trend(series, cfg);
    const auto predicted = predict_in_sample(model, series);
    const auto stats = error_stats(series.values, predicted.yhat, 0.0);

    const auto eval =
        evaluate_user(model, series, stats.mu, stats.sigma, BandConfig{}, Thresholds{}, 2);
    REQUIRE(eval.rows.size() == 7);
    REQUIRE(eval.decisions.size() == 7);

    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(eval.rows[i].y.has_value());
        CHECK(eval.rows[i].epsilon.has_value());
        CHECK(eval.decisions[i].kind == PointKind::OBSERVED);
    }
    for (std::size_t i = 5; i < 7; ++i) {
        CHECK_FALSE(eval.rows[i].y.has_value());
        CHECK_FALSE(eval.rows[i].epsilon.has_value());
        CHECK(eval.decisions[i].kind == PointKind::FORECAST);
    }
    CHECK(eval.rows[0].period_label == "2014-01-01");
    CHECK(eval.rows[5].period_label == "2019-01-01");
    CHECK(eval.rows[6].period_label == "2020-01-01");

    // A flat history forecasts flat: nothing breaches, all severities 0.
    for (const auto& d : eval.decisions) {
        CHECK(d.severity == 0.0);
        CHECK(d.action == Action::ALLOW);
    }
}

TEST_CASE("horizon rows are judged against the end-of-training band") {
    // Ramp in the last training period; the extrapolated trend keeps
    // climbing while the standing limit stays at the training edge.
    const auto series = make_series({50, 50, 50, 50, 65});
    FitConfig cfg;
    const auto model = fit_trend(series, cfg);
    const auto predicted = predict_in_sample(model, series);
    const auto stats = error_stats(series.values, predicted.yhat, 0.0);

    const auto eval =
        evaluate_user(model, series, stats.mu, stats.sigma, BandConfig{}, Thresholds{}, 1);
    REQUIRE(eval.rows.size() == 6);
    const auto& horizon = eval.rows[5];

    const double w = band_half_width(stats.mu, stats.sigma, 2.0, BandMode::Literal);
    const double edge = eval_trend(model, 4.0);
    CHECK(horizon.upper == doctest::Approx(edge + w));
    CHECK(horizon.lower == doctest::Approx(edge - w));
    CHECK(horizon.yhat > horizon.upper); // the ramp keeps going
    CHECK(horizon.breach);
    CHECK(eval.decisions[5].severity > 0.0);
}

TEST_CASE("in-sample rows use each period's own band") {
    const auto series = make_series({10, 12, 9, 14, 11, 13});
    FitConfig cfg;
    cfg.n_changepoints = 0; // leave visible residuals
    const auto model = fit_trend(series, cfg);
    const auto predicted = predict_in_sample(model, series);
    const auto stats = error_stats(series.values, predicted.yhat, 0.0);
    const auto bnds = bounds(predicted.yhat, stats.mu, stats.sigma, 2.0);

    const auto eval =
        evaluate_user(model, series, stats.mu, stats.sigma, BandConfig{}, Thresholds{}, 1);
    for (std::size_t i = 0; i < series.size(); ++i) {
        CHECK(eval.rows[i].lower == bnds.lower[i]);
        CHECK(eval.rows[i].upper == bnds.upper[i]);
        CHECK(eval.rows[i].yhat == predicted.yhat[i]);
        CHECK(*eval.rows[i].epsilon ==
              doctest::Approx(series.values[i] - predicted.yhat[i]));
    }
}

TEST_CASE("report CSV has the fixed header and column shape") {
    const auto series = make_series({10, 10, 10, 10, 10});
    FitConfig cfg;
    const auto model = fit_trend(series, cfg);
    const auto predicted = predict_in_sample(model, series);
    const auto stats = error_stats(series.values, predicted.yhat, 0.0);
    const auto eval =
        evaluate_user(model, series, stats.mu, stats.sigma, BandConfig{}, Thresholds{}, 1);

    const auto csv = report_to_csv(eval.rows);
    std::istringstream lines(csv);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "user_id,period_index,period_label,y,yhat,lower,upper,epsilon,xi,breach,action");

    std::size_t rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 10);
        CHECK(line.back() != '\r'); // LF endings only
    }
    CHECK(rows == 6);

    // Horizon row: empty y/epsilon/xi columns.
    const auto last = csv.rfind("u,5,2019-01-01,");
    REQUIRE(last != std::string::npos);
    const std::string tail = csv.substr(last);
    CHECK(tail.find(",,") != std::string::npos);
}

TEST_CASE("ranking CSV shape") {
    std::vector<SuspectRank> ranking = {{"mallory", 4.5, Action::BLOCK},
                                        {"alice", 0.0, Action::ALLOW}};
    CHECK(ranking_to_csv(ranking) == "user_id,max_severity,action\n"
                                     "mallory,4.5,BLOCK\n"
                                     "alice,0,ALLOW\n");
}

TEST_CASE("format_double is shortest round-trip") {
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(12.5) == "12.5");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
    const double value = 0.1 + 0.2;
    CHECK(std::stod(format_double(value)) == value);
}
