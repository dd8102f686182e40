#include "dlp/bands.hpp"

#include "dlp/errors.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dlp {

namespace {

constexpr double kDenominatorFloor = 1e-12;

// Splits [0, n) into contiguous chunks, one per thread, and reduces the
// per-chunk partials in chunk order. The combine order is fixed by the
// thread count, not by scheduling, so repeated runs agree bitwise.
template <typename Fn>
double chunked_sum(std::size_t n, Exec exec, Fn&& partial_sum) {
#ifdef _OPENMP
    if (exec == Exec::Parallel && n > 0) {
        const int threads = std::min<std::size_t>(omp_get_max_threads(), n);
        std::vector<double> partials(static_cast<std::size_t>(threads), 0.0);
        const std::size_t chunk = (n + threads - 1) / threads;
#pragma omp parallel for schedule(static, 1) num_threads(threads)
        for (int c = 0; c < threads; ++c) {
            const std::size_t lo = static_cast<std::size_t>(c) * chunk;
            const std::size_t hi = std::min(n, lo + chunk);
            double acc = 0.0;
            for (std::size_t i = lo; i < hi; ++i) {
                acc += partial_sum(i);
            }
            partials[static_cast<std::size_t>(c)] = acc;
        }
        double total = 0.0;
        for (const double part : partials) {
            total += part;
        }
        return total;
    }
#else
    (void)exec;
#endif
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += partial_sum(i);
    }
    return total;
}

} // namespace

std::optional<BandMode> parse_band_mode(std::string_view text) {
    if (text == "literal") return BandMode::Literal;
    if (text == "mu_plus") return BandMode::MuPlus;
    return std::nullopt;
}

std::string_view band_mode_name(BandMode mode) {
    return mode == BandMode::Literal ? "literal" : "mu_plus";
}

void BandConfig::validate() const {
    if (!(varsigma > 0.0) || !std::isfinite(varsigma)) {
        throw InvalidConfig("varsigma must be > 0");
    }
    if (!std::isfinite(alpha)) {
        throw InvalidConfig("alpha must be finite");
    }
}

double residual(double y, double yhat, double alpha) {
    return (y + alpha) - (yhat - alpha);
}

std::optional<double> pct_error(double epsilon, double y, double alpha) {
    const double denom = y + alpha;
    if (std::abs(denom) <= kDenominatorFloor) {
        return std::nullopt;
    }
    return 100.0 * epsilon / denom;
}

ErrorStats error_stats(const std::vector<double>& y, const std::vector<double>& yhat,
                       double alpha, Exec exec) {
    if (y.size() != yhat.size()) {
        throw LengthMismatch("error_stats: y/yhat length mismatch");
    }
    if (y.empty()) {
        throw EmptyInput("error_stats: empty input");
    }
    const std::size_t n = y.size();

    ErrorStats stats;
    stats.alpha = alpha;
    stats.epsilon.resize(n);
    stats.xi.resize(n);
    stats.abs_err.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        stats.epsilon[i] = residual(y[i], yhat[i], alpha);
        stats.xi[i] = pct_error(stats.epsilon[i], y[i], alpha);
        stats.abs_err[i] = std::abs(stats.epsilon[i]);
    }

    const double count = static_cast<double>(n);
    const auto& ae = stats.abs_err;
    stats.mu = chunked_sum(n, exec, [&](std::size_t i) { return ae[i]; }) / count;
    const double mu = stats.mu;
    const double ss = chunked_sum(
        n, exec, [&](std::size_t i) { return (ae[i] - mu) * (ae[i] - mu); });
    stats.sigma = std::sqrt(ss / count);
    return stats;
}

double band_half_width(double mu, double sigma, double varsigma, BandMode mode) {
    return mode == BandMode::Literal ? mu * varsigma * sigma : mu + varsigma * sigma;
}

BandedForecast band_forecast(std::string user_id, std::vector<double> times,
                             std::optional<std::vector<double>> y, std::vector<double> yhat,
                             double mu, double sigma, const BandConfig& cfg) {
    cfg.validate();
    if (times.size() != yhat.size() || (y && y->size() != yhat.size())) {
        throw LengthMismatch("band_forecast: times/y/yhat length mismatch");
    }
    BandedForecast banded;
    banded.user_id = std::move(user_id);
    banded.times = std::move(times);
    banded.y = std::move(y);
    banded.yhat = std::move(yhat);
    auto b = bounds(banded.yhat, mu, sigma, cfg.varsigma, cfg.mode);
    banded.lower = std::move(b.lower);
    banded.upper = std::move(b.upper);
    banded.varsigma = cfg.varsigma;
    return banded;
}

Bounds bounds(const std::vector<double>& yhat, double mu, double sigma, double varsigma,
              BandMode mode, Exec exec) {
    if (!(varsigma > 0.0)) {
        throw InvalidConfig("bounds: varsigma must be > 0");
    }
    const double w = band_half_width(mu, sigma, varsigma, mode);
    Bounds out;
    out.lower.resize(yhat.size());
    out.upper.resize(yhat.size());
    const std::int64_t n = static_cast<std::int64_t>(yhat.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel && n > 4096)
#else
    (void)exec;
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        out.lower[static_cast<std::size_t>(i)] = yhat[static_cast<std::size_t>(i)] - w;
        out.upper[static_cast<std::size_t>(i)] = yhat[static_cast<std::size_t>(i)] + w;
    }
    return out;
}

} // namespace dlp
