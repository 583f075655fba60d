#include "sxp/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <thread>

#include "sxp/economy.hpp"
#include "sxp/features.hpp"
#include "sxp/folds.hpp"
#include "sxp/rng.hpp"

namespace sxp {

namespace {

using nlohmann::ordered_json;

ordered_json hyperparams_json(const Hyperparams& hp) {
    ordered_json j;
    j["n_rounds"] = hp.n_rounds;
    j["max_depth"] = hp.max_depth;
    j["learning_rate"] = hp.learning_rate;
    j["min_child_weight"] = hp.min_child_weight;
    j["l2_lambda"] = hp.l2_lambda;
    j["subsample"] = hp.subsample;
    return j;
}

Hyperparams hyperparams_from_point(const ParamPoint& p) {
    Hyperparams hp;
    hp.n_rounds = static_cast<int>(p[0]);
    hp.max_depth = static_cast<int>(p[1]);
    hp.learning_rate = p[2];
    hp.min_child_weight = p[3];
    hp.l2_lambda = p[4];
    hp.subsample = p[5];
    return hp;
}

ordered_json eval_json(const EvalReport& e) {
    ordered_json j;
    ordered_json classes = ordered_json::array();
    for (auto c : e.class_list) classes.push_back(to_string(c));
    j["classes"] = classes;
    j["f1_macro"] = e.f1_macro;
    j["f1_per_class"] = e.f1_per_class;
    j["fold_scores"] = e.fold_scores;
    j["confusion"] = e.confusion;
    return j;
}

}  // namespace

std::uint64_t entity_seed(const std::string& entity_id, std::uint64_t base_seed) {
    std::uint64_t mix = base_seed;
    splitmix64(mix);
    return fnv1a64(entity_id) ^ mix;
}

std::string entity_file_stem(const std::string& entity_id) {
    std::string stem;
    for (char c : entity_id)
        stem += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    if (stem.empty()) stem = "entity";
    return stem + "_" + std::to_string(fnv1a64(entity_id) % 100000);
}

EntityRun run_entity(std::vector<ValenceReport> reports, std::vector<SensorSample> samples,
                     const PipelineConfig& config, std::uint64_t seed,
                     const std::string& out_dir) {
    const auto t_start = std::chrono::steady_clock::now();
    EntityRun run;
    RunReport& rep = run.report;
    rep.seed = seed;
    if (!reports.empty()) rep.entity_id = reports.front().entity_id;
    else if (!samples.empty()) rep.entity_id = samples.front().entity_id;

    auto finish = [&]() {
        rep.timing_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t_start)
                            .count();
        return std::move(run);
    };

    try {
        std::stable_sort(reports.begin(), reports.end(),
                         [](const auto& a, const auto& b) { return a.at < b.at; });
        std::stable_sort(samples.begin(), samples.end(),
                         [](const auto& a, const auto& b) { return a.at < b.at; });
        rep.reports_raw = reports.size();
        rep.samples_raw = samples.size();

        const auto debounced = debounce_reports(
            reports, static_cast<std::int64_t>(config.debounce_window_s * 1000.0));
        rep.reports_debounced = debounced.size();

        const auto retained = economy_filter(samples, config.rhythm);
        rep.samples_retained = retained.size();
        Instant horizon = 0;
        if (!retained.empty()) horizon = retained.back().at;
        if (!debounced.empty()) horizon = std::max(horizon, debounced.back().at);
        const auto reconstructed =
            retained.empty() ? retained : reconstruct(retained, config.rhythm, horizon);
        rep.samples_reconstructed = reconstructed.size();

        FeatureOptions fopts;
        fopts.join_window_ms = static_cast<std::int64_t>(config.join_window_min * 60000.0);
        fopts.include_synthetic = config.include_synthetic;
        FeatureSet features = build_features(debounced, reconstructed, fopts);
        rep.instances = features.x.rows;
        rep.dropped_no_location = features.dropped_no_location;
        rep.feature_names = features.feature_names;

        rep.plan = verify_classes(ClassCounts::from_labels(features.labels), config.balance);
        if (rep.plan.mode == LearningMode::Ineligible) {
            rep.eligible = false;
            return finish();
        }
        rep.eligible = true;

        // two-class mode keeps only the qualifying classes
        if (rep.plan.mode == LearningMode::TwoClass) {
            std::vector<std::size_t> keep;
            for (std::size_t i = 0; i < features.labels.size(); ++i)
                if (std::find(rep.plan.present_classes.begin(), rep.plan.present_classes.end(),
                              features.labels[i]) != rep.plan.present_classes.end())
                    keep.push_back(i);
            features.x = features.x.select_rows(keep);
            std::vector<ValenceClass> labels;
            for (auto i : keep) labels.push_back(features.labels[i]);
            features.labels = std::move(labels);
            rep.instances = features.x.rows;
        }

        // location clustering (reported, not fed into the feature set)
        std::vector<GeoPoint> points;
        for (const auto& s : retained)
            if (s.kind == SampleKind::Location) points.push_back({s.lat, s.lon});
        rep.cluster_points = points.size();
        if (points.size() >= 2) {
            const auto search = search_cluster_params(points);
            rep.cluster_params = search.params;
            rep.clusters_found = search.clustering.num_clusters;
            rep.cluster_validity = search.clustering.validity;
            rep.cluster_all_noise = search.all_noise;
        }

        const FoldPlan plan = select_k(features.labels, config.k_max, seed);
        rep.fold_k = plan.k;
        rep.fold_sizes = plan.fold_sizes();

        const auto space = config.search_space();
        const Objective objective = [&](const ParamPoint& p) -> double {
            const Hyperparams hp = hyperparams_from_point(p);
            try {
                return cross_validate(features.x, features.labels, hp, plan, seed,
                                      features.feature_names, config.weighted_f1)
                    .f1_macro;
            } catch (const std::exception&) {
                return std::numeric_limits<double>::quiet_NaN();
            }
        };
        const BayesOptResult tuned = bayes_opt(objective, space, config.tuning_budget, seed);
        rep.trials = tuned.trials;
        if (!tuned.any_succeeded) throw std::runtime_error("every tuning trial failed");
        const Hyperparams best = hyperparams_from_point(tuned.best);
        rep.best_hp = best;
        rep.best_cv_f1 = tuned.best_objective;

        rep.eval = cross_validate(features.x, features.labels, best, plan, seed,
                                  features.feature_names, config.weighted_f1);

        GbdtModel model = train_gbdt(features.x, features.labels, best, seed,
                                     features.feature_names);
        model.fold_plan.k = plan.k;
        model.fold_plan.fold_sizes = plan.fold_sizes();

        rep.feature_mean_abs = mean_abs_attribution(model, features.x);
        EntityAttribution attr{rep.entity_id, features.feature_names, rep.feature_mean_abs};
        const FeatureRanking ranking = rank_features({attr});
        if (!ranking.entities.empty()) rep.top_feature = ranking.entities.front().top_feature;

        if (!out_dir.empty()) {
            std::filesystem::create_directories(out_dir);
            rep.model_path = out_dir + "/" + entity_file_stem(rep.entity_id) + ".model";
            persist_model(model, rep.model_path);
        }
        run.model = std::move(model);
    } catch (const std::exception& e) {
        rep.error = e.what();
    }
    return finish();
}

ordered_json RunReport::to_json(const PipelineConfig& config, bool include_timing) const {
    ordered_json j;
    j["entity"] = entity_id;
    j["seed"] = seed;
    j["eligible"] = eligible;
    if (!error.empty()) j["error"] = error;
    j["counts"]["reports_raw"] = reports_raw;
    j["counts"]["reports_debounced"] = reports_debounced;
    j["counts"]["samples_raw"] = samples_raw;
    j["counts"]["samples_retained"] = samples_retained;
    j["counts"]["samples_reconstructed"] = samples_reconstructed;
    j["counts"]["instances"] = instances;
    j["counts"]["dropped_no_location"] = dropped_no_location;

    ordered_json plan_j;
    plan_j["class_counts"] = {{"negative", plan.counts.counts[0]},
                              {"neutral", plan.counts.counts[1]},
                              {"positive", plan.counts.counts[2]}};
    plan_j["degree"] = plan.degree;
    plan_j["mode"] = to_string(plan.mode);
    plan_j["reason"] = plan.reason;
    ordered_json present = ordered_json::array();
    for (auto c : plan.present_classes) present.push_back(to_string(c));
    plan_j["present_classes"] = present;
    j["imbalance_plan"] = plan_j;

    if (cluster_params) {
        j["clusters"]["min_samples"] = cluster_params->min_samples;
        j["clusters"]["min_cluster_size"] = cluster_params->min_cluster_size;
        j["clusters"]["found"] = clusters_found;
        j["clusters"]["validity"] = cluster_validity;
        j["clusters"]["all_noise"] = cluster_all_noise;
        j["clusters"]["points"] = cluster_points;
    }

    if (fold_k > 0) {
        j["folds"]["k"] = fold_k;
        j["folds"]["sizes"] = fold_sizes;
    }
    if (best_hp) {
        j["best_hyperparams"] = hyperparams_json(*best_hp);
        j["best_cv_f1"] = best_cv_f1;
    }
    if (!trials.empty()) {
        ordered_json trials_j = ordered_json::array();
        for (const auto& t : trials) {
            ordered_json tj;
            tj["index"] = t.index;
            tj["hyperparams"] = hyperparams_json(hyperparams_from_point(t.point));
            if (t.failed) tj["failed"] = true;
            else tj["objective"] = t.objective;
            trials_j.push_back(std::move(tj));
        }
        j["trials"] = trials_j;
    }
    if (eval) j["eval"] = eval_json(*eval);
    if (!feature_names.empty() && !feature_mean_abs.empty()) {
        ordered_json ranking = ordered_json::array();
        for (std::size_t i = 0; i < feature_names.size(); ++i) {
            ordered_json r;
            r["feature"] = feature_names[i];
            r["mean_abs_contribution"] = feature_mean_abs[i];
            ranking.push_back(std::move(r));
        }
        j["feature_influence"] = ranking;
        j["top_feature"] = top_feature;
    }
    if (!model_path.empty()) j["model_path"] = model_path;
    if (include_timing) j["timing_ms"] = timing_ms;
    j["config"] = config.to_json();
    return j;
}

PopulationSummary run_population(const IngestResult& dataset, const PipelineConfig& config,
                                 std::uint64_t seed, const std::string& out_dir) {
    std::map<std::string, std::pair<std::vector<ValenceReport>, std::vector<SensorSample>>>
        by_entity;
    for (const auto& r : dataset.reports) by_entity[r.entity_id].first.push_back(r);
    for (const auto& s : dataset.samples) by_entity[s.entity_id].second.push_back(s);

    std::vector<std::string> ids;
    for (const auto& [id, _] : by_entity) ids.push_back(id);

    PopulationSummary summary;
    summary.reports.resize(ids.size());

    int workers = config.workers > 0 ? config.workers
                                     : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = std::min<int>(workers, std::max<std::size_t>(ids.size(), 1));

    std::atomic<std::size_t> cursor{0};
    std::vector<EntityAttribution> attributions(ids.size());
    auto worker = [&] {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= ids.size()) break;
            auto& [reports, samples] = by_entity[ids[i]];
            EntityRun run =
                run_entity(reports, samples, config, entity_seed(ids[i], seed), out_dir);
            if (run.model && !run.report.feature_mean_abs.empty()) {
                attributions[i] = {ids[i], run.report.feature_names,
                                   run.report.feature_mean_abs};
            }
            summary.reports[i] = std::move(run.report);
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::vector<EntityAttribution> ranked;
    for (auto& a : attributions)
        if (!a.entity_id.empty()) ranked.push_back(std::move(a));
    if (!ranked.empty())
        summary.family_share_pct = rank_features(ranked).family_share_pct;

    for (const auto& rep : summary.reports) {
        if (!rep.error.empty()) {
            ++summary.failed;
        } else if (!rep.eligible) {
            ++summary.ineligible;
        } else {
            ++summary.eligible;
            if (rep.eval) ++summary.f1_histogram[f1_bin_index(rep.eval->f1_macro)];
        }
    }
    return summary;
}

ordered_json PopulationSummary::to_json(const PipelineConfig& config,
                                        bool include_timing) const {
    ordered_json j;
    j["entities"] = reports.size();
    j["eligible"] = eligible;
    j["ineligible"] = ineligible;
    j["failed"] = failed;
    ordered_json hist;
    for (std::size_t b = 0; b < kF1BinLabels.size(); ++b)
        hist[kF1BinLabels[b]] = f1_histogram[b];
    j["f1_histogram"] = hist;
    j["feature_family_share_pct"] = family_share_pct;
    ordered_json rows = ordered_json::array();
    for (const auto& rep : reports) {
        ordered_json row;
        row["entity"] = rep.entity_id;
        row["eligible"] = rep.eligible;
        if (!rep.error.empty()) row["error"] = rep.error;
        if (rep.eval) row["f1_macro"] = rep.eval->f1_macro;
        if (!rep.top_feature.empty()) row["top_feature"] = rep.top_feature;
        rows.push_back(std::move(row));
    }
    j["per_entity"] = rows;
    j["config"] = config.to_json();
    (void)include_timing;
    return j;
}

}  // namespace sxp
