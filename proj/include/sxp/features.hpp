#pragma once

// Feature assembly: each debounced report is paired with the nearest
// location sample in time, giving a (weekday, hour, grid cell) instance.

#include <optional>
#include <string>
#include <vector>

#include "sxp/geo.hpp"
#include "sxp/matrix.hpp"
#include "sxp/types.hpp"

namespace sxp {

// Column layout: [moment_dow, moment_hour, one cell indicator per observed
// GridCell]; exactly one indicator is active per row.
struct FeatureSet {
    Matrix x;
    std::vector<ValenceClass> labels;
    std::vector<std::string> feature_names;  // "moment_dow", "moment_hour", "mgrs_..."
    std::vector<GridCell> cells;             // observed cells, canonical order
    std::size_t dropped_no_location = 0;     // reports with no sample in the window
};

struct FeatureOptions {
    std::int64_t join_window_ms = 30 * 60 * 1000;
    bool include_synthetic = true;  // reconstructed samples join like real ones
};

// Throws std::runtime_error("no joinable instances") when nothing joins.
FeatureSet build_features(const std::vector<ValenceReport>& reports,
                          const std::vector<SensorSample>& samples_reconstructed,
                          const FeatureOptions& opts = {});

// Row vector in a model's feature table; unknown cells leave every
// indicator at zero.
std::vector<double> featurize(const std::vector<std::string>& feature_names,
                              const MomentContext& moment,
                              const std::optional<GridCell>& cell);

}  // namespace sxp
