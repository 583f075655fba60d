#pragma once

// Prediction-map documents: the model's most influential grid cells with
// per-class probabilities for one (weekday, hour) context, exported as
// GeoJSON and as a self-contained HTML viewer.

#include <string>
#include <vector>

#include "sxp/gbdt.hpp"
#include "sxp/geo.hpp"

namespace sxp {

struct CellPrediction {
    GridCell cell;
    int rank = 0;            // 1 = most influential
    double influence = 0.0;  // mean |attribution| of the cell feature
    std::vector<double> probabilities;  // aligned with class_list
};

struct PredictionMapDoc {
    int weekday = 0;
    int hour = 0;
    std::vector<ValenceClass> class_list;
    std::vector<CellPrediction> cells;  // at most top_n
    std::string warning;  // set when the model has no location features
};

// feature_mean_abs is the SHAP ranking magnitude per model feature.
PredictionMapDoc export_map(const GbdtModel& model,
                            const std::vector<double>& feature_mean_abs, int weekday,
                            int hour, int top_n = 7);

std::string map_to_geojson(const PredictionMapDoc& doc);
std::string map_to_html(const PredictionMapDoc& doc);

}  // namespace sxp
