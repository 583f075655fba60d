#pragma once

// Per-entity orchestration of the adaptive learning flow: debounce,
// economy reconstruction, feature build, eligibility gate, cluster
// parameter search, fold selection, Bayesian tuning, final refit, model
// persistence and attribution ranking. Population runs isolate entity
// failures and aggregate the F1 histogram and feature-family shares.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sxp/balance.hpp"
#include "sxp/bayesopt.hpp"
#include "sxp/config.hpp"
#include "sxp/explain.hpp"
#include "sxp/gbdt.hpp"
#include "sxp/hdbscan.hpp"
#include "sxp/ingest.hpp"
#include "sxp/metrics.hpp"

namespace sxp {

struct RunReport {
    std::string entity_id;
    std::uint64_t seed = 0;
    bool eligible = false;
    std::string error;  // nonempty if a stage failed; later stages skipped

    // stage bookkeeping
    std::size_t reports_raw = 0;
    std::size_t reports_debounced = 0;
    std::size_t samples_raw = 0;
    std::size_t samples_retained = 0;
    std::size_t samples_reconstructed = 0;
    std::size_t instances = 0;
    std::size_t dropped_no_location = 0;

    ImbalancePlan plan;

    // cluster search (reporting only; cells stay the learning features)
    std::optional<ClusterParams> cluster_params;
    int clusters_found = 0;
    double cluster_validity = 0.0;
    bool cluster_all_noise = false;
    std::size_t cluster_points = 0;

    int fold_k = 0;
    std::vector<std::int32_t> fold_sizes;

    std::optional<Hyperparams> best_hp;
    double best_cv_f1 = 0.0;
    std::vector<Trial> trials;
    std::optional<EvalReport> eval;

    std::vector<std::string> feature_names;
    std::vector<double> feature_mean_abs;  // SHAP ranking magnitudes
    std::string top_feature;

    std::string model_path;  // empty when not persisted
    double timing_ms = 0.0;

    nlohmann::ordered_json to_json(const PipelineConfig& config,
                                   bool include_timing = true) const;
};

struct PopulationSummary {
    std::vector<RunReport> reports;  // sorted by entity id
    std::size_t eligible = 0;
    std::size_t ineligible = 0;
    std::size_t failed = 0;
    std::array<int, 5> f1_histogram{0, 0, 0, 0, 0};  // kF1BinLabels bins
    std::map<std::string, double> family_share_pct;

    nlohmann::ordered_json to_json(const PipelineConfig& config,
                                   bool include_timing = true) const;
};

// Trained model plus its report; model is present iff eligible and no
// stage failed.
struct EntityRun {
    RunReport report;
    std::optional<GbdtModel> model;
};

EntityRun run_entity(std::vector<ValenceReport> reports, std::vector<SensorSample> samples,
                     const PipelineConfig& config, std::uint64_t seed,
                     const std::string& out_dir = "");

// Seed an entity's run deterministically from the population seed.
std::uint64_t entity_seed(const std::string& entity_id, std::uint64_t base_seed);

PopulationSummary run_population(const IngestResult& dataset, const PipelineConfig& config,
                                 std::uint64_t seed, const std::string& out_dir = "");

// Filesystem-safe model/report stem for an entity id.
std::string entity_file_stem(const std::string& entity_id);

}  // namespace sxp
