#include "dlp/batch.hpp"

#include "dlp/errors.hpp"
#include "dlp/forecast.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dlp {

int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

std::vector<FitOutcome> fit_models(const std::map<std::string, UserSeries>& series_by_user,
                                   const FitConfig& fit_cfg, const BandConfig& band_cfg,
                                   Exec exec) {
    fit_cfg.validate();
    band_cfg.validate();

    std::vector<const UserSeries*> series;
    series.reserve(series_by_user.size());
    for (const auto& [user, s] : series_by_user) {
        series.push_back(&s);
    }

    std::vector<FitOutcome> outcomes(series.size());
    const std::int64_t n = static_cast<std::int64_t>(series.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
#else
    (void)exec;
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        const UserSeries& s = *series[static_cast<std::size_t>(i)];
        FitOutcome& out = outcomes[static_cast<std::size_t>(i)];
        out.user_id = s.user_id;
        try {
            StoredModel stored;
            stored.model = fit_trend(s, fit_cfg);
            stored.band = band_cfg;
            const auto predicted = predict_in_sample(stored.model, s);
            const auto stats = error_stats(s.values, predicted.yhat, band_cfg.alpha);
            stored.mu = stats.mu;
            stored.sigma = stats.sigma;
            out.stored = std::move(stored);
            out.ok = true;
        } catch (const Error& e) {
            out.error = e.what();
        }
    }
    return outcomes;
}

} // namespace dlp
