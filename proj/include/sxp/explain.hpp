#pragma once

// Exact Shapley attributions for the tree ensembles (polynomial
// path-weighting over each tree, cover-weighted background) and the
// population-level feature ranking built on them.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "sxp/gbdt.hpp"
#include "sxp/matrix.hpp"

namespace sxp {

struct Attribution {
    // per class: base (expected margin) plus one contribution per feature;
    // base + sum(phi) equals the predicted margin exactly
    std::vector<double> base;
    std::vector<std::vector<double>> phi;  // [class][feature]
};

Attribution shap_attribution(const GbdtModel& model, std::span<const double> instance);

// Mean |contribution| per feature over a set of instances, summed across
// classes; the ranking magnitude of the spec.
std::vector<double> mean_abs_attribution(const GbdtModel& model, const Matrix& instances);

struct EntityAttribution {
    std::string entity_id;
    std::vector<std::string> feature_names;
    std::vector<double> mean_abs;  // aligned with feature_names
};

struct FeatureRanking {
    struct EntityTop {
        std::string entity_id;
        std::string top_feature;
        std::string family;  // "moment_dow", "moment_hour" or "mgrs_*"
        double mean_abs = 0.0;
        bool tie = false;  // broken by fixed feature order
    };
    std::vector<EntityTop> entities;
    std::map<std::string, double> family_share_pct;  // sums to 100 over families
};

// Feature family for share aggregation: location features collapse into
// the "mgrs_*" family.
std::string feature_family(const std::string& feature_name);

FeatureRanking rank_features(const std::vector<EntityAttribution>& entities);

}  // namespace sxp
