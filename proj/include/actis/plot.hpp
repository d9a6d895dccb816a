#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "actis/eval.hpp"
#include "actis/experiment.hpp"

namespace actis {

// Learning curves: per-learner mean line with a +-SE band, axes spanning
// step 0..T-1 and G-mean 0..1, a vertical rule at the drift step when set,
// and a legend. Throws std::invalid_argument on no aggregates and
// std::runtime_error on an unwritable path.
void render_curves(
    const std::vector<std::pair<std::string, AggregateCurve>>& aggregates,
    std::optional<std::int64_t> drift_step,
    const std::filesystem::path& out_path);

// Final G-mean vs budget with error bars, one series per learner. The x axis
// is logarithmic when every budget is positive.
void render_sweep(const std::vector<SweepRow>& rows,
                  const std::filesystem::path& out_path);

}  // namespace actis
