#pragma once

#include "dlp/records.hpp"

#include <string>
#include <vector>

namespace dlp {

struct FitConfig {
    int n_changepoints = 25;  // capped at n_train - 2 when placing
    double cp_range = 0.8;    // fraction of training span eligible, (0, 1]
    double lambda = 0.01;     // ridge strength on the rate deltas, >= 0

    void validate() const;
};

// Piecewise-linear trend with rate changes at fixed changepoints.
// The trend value is
//   g(t) = (k + sum_{t>=s_j} delta_j) * t + (m_offset + sum_{t>=s_j} gamma_j)
// with gamma_j = -s_j * delta_j so the line stays continuous across
// every changepoint. Equivalently g(t) = k*t + m_offset +
// sum_j delta_j * max(0, t - s_j).
struct TrendModel {
    std::string user_id;
    double k = 0.0;        // base growth rate, minutes/period
    double m_offset = 0.0; // base offset, minutes
    std::vector<double> changepoints; // strictly increasing period indices
    std::vector<double> delta;        // rate adjustment at each changepoint
    std::vector<double> gamma;        // offset adjustment, -s_j * delta_j
    double lambda = 0.0;   // ridge strength used at fit time
    int n_train = 0;       // training length
    Granularity granularity = Granularity::ANNUAL;
    CivilDate origin{};

    // Cumulative slope past the last changepoint (what extrapolation uses).
    double final_slope() const;
};

// Uniformly spaced candidate changepoints over (0, cp_range*(n_train-1)],
// at most min(cfg.n_changepoints, n_train-2) of them. Deterministic.
std::vector<double> place_changepoints(int n_train, const FitConfig& cfg);

// Regressor row [t, 1, max(0, t-s_1), ..., max(0, t-s_J)].
std::vector<double> design_row(double t, const std::vector<double>& changepoints);

// Coefficients of the penalized least-squares fit on the hinge basis.
struct FitCoefficients {
    double k = 0.0;
    double m_offset = 0.0;
    std::vector<double> delta;
};

// Minimizes sum_i (y_i - g(t_i))^2 + lambda * sum_j delta_j^2 by solving
// the normal equations with an LDL^T factorization. k and m_offset are
// not penalized. Throws SingularSystem when lambda == 0 and the design
// is rank-deficient.
FitCoefficients fit_hinge_ls(const std::vector<double>& times,
                             const std::vector<double>& values,
                             const std::vector<double>& changepoints,
                             double lambda);

// Fits the trend of one user's series. Requires n >= 3.
TrendModel fit_trend(const UserSeries& series, const FitConfig& cfg);

double eval_trend(const TrendModel& model, double t);

} // namespace dlp
