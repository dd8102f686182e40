#pragma once

#include "dlp/bands.hpp"
#include "dlp/exec.hpp"
#include "dlp/records.hpp"
#include "dlp/store.hpp"
#include "dlp/trend.hpp"

#include <map>
#include <string>
#include <vector>

namespace dlp {

// Result of fitting one user inside a batch: either a stored-model
// payload or the reason the fit was skipped.
struct FitOutcome {
    std::string user_id;
    bool ok = false;
    StoredModel stored;
    std::string error;
};

// Fits every series in the map. Users are independent, so the parallel
// path distributes them over OpenMP threads; per-user arithmetic is
// identical either way. Outcomes come back in map (user id) order.
std::vector<FitOutcome> fit_models(const std::map<std::string, UserSeries>& series_by_user,
                                   const FitConfig& fit_cfg, const BandConfig& band_cfg,
                                   Exec exec = Exec::Serial);

int hardware_threads();

} // namespace dlp
