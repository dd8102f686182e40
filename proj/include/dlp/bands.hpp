#pragma once

#include "dlp/exec.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dlp {

enum class BandMode {
    Literal, // half-width = mu * varsigma * sigma
    MuPlus,  // half-width = mu + varsigma * sigma
};

std::optional<BandMode> parse_band_mode(std::string_view text);
std::string_view band_mode_name(BandMode mode);

struct BandConfig {
    double alpha = 0.0;    // offset applied inside the error formulas
    double varsigma = 2.0; // sensitivity multiplier, > 0
    BandMode mode = BandMode::Literal;

    void validate() const;
};

// Residual between an actual and a predicted value:
//   (y + alpha) - (yhat - alpha) = y - yhat + 2*alpha.
double residual(double y, double yhat, double alpha);

// Percentage error 100 * epsilon / (y + alpha); absent when the
// denominator vanishes.
std::optional<double> pct_error(double epsilon, double y, double alpha);

// Residuals, absolute errors and their mean / population standard
// deviation over one user's actual-vs-predicted vectors.
struct ErrorStats {
    double alpha = 0.0;
    std::vector<double> epsilon;
    std::vector<std::optional<double>> xi; // percent; absent where undefined
    std::vector<double> abs_err;
    double mu = 0.0;
    double sigma = 0.0;
};

ErrorStats error_stats(const std::vector<double>& y, const std::vector<double>& yhat,
                       double alpha, Exec exec = Exec::Serial);

// Symmetric band half-width around yhat.
double band_half_width(double mu, double sigma, double varsigma, BandMode mode);

struct Bounds {
    std::vector<double> lower;
    std::vector<double> upper;
};

// L_i = yhat_i - w, U_i = yhat_i + w with one shared half-width.
Bounds bounds(const std::vector<double>& yhat, double mu, double sigma, double varsigma,
              BandMode mode = BandMode::Literal, Exec exec = Exec::Serial);

struct BandedForecast {
    std::string user_id;
    std::vector<double> times;
    std::optional<std::vector<double>> y; // actuals, when known
    std::vector<double> yhat;
    std::vector<double> lower;
    std::vector<double> upper;
    double varsigma = 2.0;
};

// Wraps one user's predictions in their band. `y` may be absent (pure
// forecast) but must match yhat in length when present.
BandedForecast band_forecast(std::string user_id, std::vector<double> times,
                             std::optional<std::vector<double>> y, std::vector<double> yhat,
                             double mu, double sigma, const BandConfig& cfg);

} // namespace dlp
