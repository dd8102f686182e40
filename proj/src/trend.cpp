#include "dlp/trend.hpp"

#include "dlp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>

namespace dlp {

void FitConfig::validate() const {
    if (n_changepoints < 0) {
        throw InvalidConfig("n_changepoints must be >= 0");
    }
    if (!(cp_range > 0.0) || cp_range > 1.0) {
        throw InvalidConfig("cp_range must be in (0, 1]");
    }
    if (lambda < 0.0 || !std::isfinite(lambda)) {
        throw InvalidConfig("lambda must be >= 0");
    }
}

double TrendModel::final_slope() const {
    return k + std::accumulate(delta.begin(), delta.end(), 0.0);
}

std::vector<double> place_changepoints(int n_train, const FitConfig& cfg) {
    cfg.validate();
    const int count = std::min(cfg.n_changepoints, std::max(0, n_train - 2));
    std::vector<double> points;
    points.reserve(static_cast<std::size_t>(std::max(0, count)));
    const double span = cfg.cp_range * static_cast<double>(n_train - 1);
    for (int j = 1; j <= count; ++j) {
        points.push_back(span * static_cast<double>(j) / static_cast<double>(count));
    }
    return points;
}

std::vector<double> design_row(double t, const std::vector<double>& changepoints) {
    std::vector<double> row;
    row.reserve(changepoints.size() + 2);
    row.push_back(t);
    row.push_back(1.0);
    for (const double s : changepoints) {
        row.push_back(std::max(0.0, t - s));
    }
    return row;
}

namespace {

// In-place LDL^T factorization of a dense symmetric matrix stored row
// major. Returns false on a vanishing pivot (rank-deficient system).
bool ldlt_solve(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        max_diag = std::max(max_diag, std::abs(a[i * n + i]));
    }
    const double pivot_floor = std::max(max_diag, 1.0) * 1e-12;

    std::vector<double> d(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double dj = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) {
            dj -= a[j * n + k] * a[j * n + k] * d[k];
        }
        if (std::abs(dj) < pivot_floor) {
            return false;
        }
        d[j] = dj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double lij = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) {
                lij -= a[i * n + k] * a[j * n + k] * d[k];
            }
            a[i * n + j] = lij / dj;
        }
    }
    // Forward solve L z = b, scale by D, back solve L^T x = z.
    for (std::size_t i = 0; i < n; ++i) {
        double zi = b[i];
        for (std::size_t k = 0; k < i; ++k) {
            zi -= a[i * n + k] * b[k];
        }
        b[i] = zi;
    }
    for (std::size_t i = 0; i < n; ++i) {
        b[i] /= d[i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double xi = b[i];
        for (std::size_t k = i + 1; k < n; ++k) {
            xi -= a[k * n + i] * b[k];
        }
        b[i] = xi;
    }
    return true;
}

} // namespace

FitCoefficients fit_hinge_ls(const std::vector<double>& times,
                             const std::vector<double>& values,
                             const std::vector<double>& changepoints, double lambda) {
    if (times.size() != values.size()) {
        throw LengthMismatch("fit_hinge_ls: times/values length mismatch");
    }
    const std::size_t n = times.size();
    const std::size_t p = changepoints.size() + 2;

    // Normal equations G = X^T X + lambda * D, rhs = X^T y, where D
    // penalizes only the delta block.
    std::vector<double> gram(p * p, 0.0);
    std::vector<double> rhs(p, 0.0);
    std::vector<double> row(p);
    for (std::size_t i = 0; i < n; ++i) {
        row[0] = times[i];
        row[1] = 1.0;
        for (std::size_t j = 0; j < changepoints.size(); ++j) {
            row[j + 2] = std::max(0.0, times[i] - changepoints[j]);
        }
        for (std::size_t r = 0; r < p; ++r) {
            for (std::size_t c = r; c < p; ++c) {
                gram[r * p + c] += row[r] * row[c];
            }
            rhs[r] += row[r] * values[i];
        }
    }
    for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t c = 0; c < r; ++c) {
            gram[r * p + c] = gram[c * p + r];
        }
    }
    for (std::size_t j = 2; j < p; ++j) {
        gram[j * p + j] += lambda;
    }

    if (!ldlt_solve(gram, rhs, p)) {
        throw SingularSystem("fit_hinge_ls: design matrix is rank-deficient");
    }

    FitCoefficients coef;
    coef.k = rhs[0];
    coef.m_offset = rhs[1];
    coef.delta.assign(rhs.begin() + 2, rhs.end());
    return coef;
}

TrendModel fit_trend(const UserSeries& series, const FitConfig& cfg) {
    cfg.validate();
    const std::size_t n = series.size();
    if (n < 3) {
        throw InsufficientData("fit_trend: need at least 3 periods, user " + series.user_id);
    }

    TrendModel model;
    model.user_id = series.user_id;
    model.changepoints = place_changepoints(static_cast<int>(n), cfg);
    model.lambda = cfg.lambda;
    model.n_train = static_cast<int>(n);
    model.granularity = series.granularity;
    model.origin = series.origin;

    const auto coef = fit_hinge_ls(series.times(), series.values, model.changepoints, cfg.lambda);
    model.k = coef.k;
    model.m_offset = coef.m_offset;
    model.delta = coef.delta;
    model.gamma.resize(model.delta.size());
    for (std::size_t j = 0; j < model.delta.size(); ++j) {
        model.gamma[j] = -model.changepoints[j] * model.delta[j];
    }
    return model;
}

double eval_trend(const TrendModel& model, double t) {
    double rate = model.k;
    double offset = model.m_offset;
    for (std::size_t j = 0; j < model.changepoints.size(); ++j) {
        if (t >= model.changepoints[j]) {
            rate += model.delta[j];
            offset += model.gamma[j];
        }
    }
    return rate * t + offset;
}

} // namespace dlp
