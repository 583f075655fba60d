#include "sxp/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>

namespace sxp {

FeatureSet build_features(const std::vector<ValenceReport>& reports,
                          const std::vector<SensorSample>& samples_reconstructed,
                          const FeatureOptions& opts) {
    std::vector<const SensorSample*> locs;
    for (const auto& s : samples_reconstructed) {
        if (s.kind != SampleKind::Location) continue;
        if (s.synthetic && !opts.include_synthetic) continue;
        locs.push_back(&s);
    }
    std::sort(locs.begin(), locs.end(),
              [](const SensorSample* a, const SensorSample* b) { return a->at < b->at; });

    struct Joined {
        MomentContext moment;
        GridCell cell;
        ValenceClass label;
    };
    std::vector<Joined> rows;
    std::map<GridCell, std::size_t> cell_ids;
    FeatureSet out;

    for (const auto& r : reports) {
        // nearest-in-time location sample
        const SensorSample* best = nullptr;
        if (!locs.empty()) {
            auto it = std::lower_bound(
                locs.begin(), locs.end(), r.at,
                [](const SensorSample* s, Instant t) { return s->at < t; });
            for (auto cand : {it == locs.end() ? locs.end() : it,
                              it == locs.begin() ? locs.end() : std::prev(it)}) {
                if (cand == locs.end()) continue;
                if (best == nullptr ||
                    std::llabs((*cand)->at - r.at) < std::llabs(best->at - r.at))
                    best = *cand;
            }
        }
        if (best == nullptr || std::llabs(best->at - r.at) > opts.join_window_ms) {
            ++out.dropped_no_location;
            continue;
        }
        Joined row;
        row.moment = moment_of(r.at, r.tz);
        row.cell = latlon_to_cell(best->lat, best->lon);
        row.label = r.valence;
        cell_ids.emplace(row.cell, 0);
        rows.push_back(row);
    }
    if (rows.empty()) throw std::runtime_error("no joinable instances");

    std::size_t next = 0;
    for (auto& [cell, id] : cell_ids) {  // std::map: canonical cell order
        id = next++;
        out.cells.push_back(cell);
    }
    out.feature_names = {"moment_dow", "moment_hour"};
    for (const auto& c : out.cells) out.feature_names.push_back("mgrs_" + c.str());

    out.x = Matrix(rows.size(), 2 + out.cells.size());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.x.at(i, 0) = rows[i].moment.weekday;
        out.x.at(i, 1) = rows[i].moment.hour;
        out.x.at(i, 2 + cell_ids[rows[i].cell]) = 1.0;
        out.labels.push_back(rows[i].label);
    }
    return out;
}

std::vector<double> featurize(const std::vector<std::string>& feature_names,
                              const MomentContext& moment,
                              const std::optional<GridCell>& cell) {
    std::vector<double> x(feature_names.size(), 0.0);
    const std::string cell_feature = cell ? "mgrs_" + cell->str() : std::string();
    for (std::size_t i = 0; i < feature_names.size(); ++i) {
        if (feature_names[i] == "moment_dow") x[i] = moment.weekday;
        else if (feature_names[i] == "moment_hour") x[i] = moment.hour;
        else if (!cell_feature.empty() && feature_names[i] == cell_feature) x[i] = 1.0;
    }
    return x;
}

}  // namespace sxp
