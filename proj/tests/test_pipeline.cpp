#include <doctest.h>

#include <filesystem>

#include "oracles.hpp"
#include "sxp/pipeline.hpp"

using namespace sxp;

namespace {

PipelineConfig fast_config() {
    PipelineConfig cfg;
    cfg.tuning_budget = 6;
    cfg.n_rounds_min = 10;
    cfg.n_rounds_max = 60;
    cfg.k_max = 4;
    cfg.workers = 2;
    return cfg;
}

}  // namespace

TEST_CASE("run_entity: weekday-driven synthetic entity learns well") {
    synth::EntityOptions opts;
    opts.n_reports = 400;
    opts.driver = synth::Driver::Weekday;
    const auto entity = synth::make_entity("e_weekday", 101, opts);
    const auto run = run_entity(entity.reports, entity.samples, fast_config(), 7);
    REQUIRE(run.report.error.empty());
    REQUIRE(run.report.eligible);
    REQUIRE(run.report.eval.has_value());
    CHECK(run.report.eval->f1_macro >= 0.9);
    CHECK(run.report.top_feature == "moment_dow");
    REQUIRE(run.model.has_value());
    CHECK(run.report.fold_k >= 2);
    CHECK(!run.report.trials.empty());
}

TEST_CASE("run_entity: single-class entity is gated ineligible with no model") {
    synth::EntityOptions opts;
    opts.n_reports = 60;
    opts.label_noise = 0.0;
    const auto entity = synth::make_entity("e_flat", 55, opts);
    auto reports = entity.reports;
    for (auto& r : reports) r.valence = ValenceClass::Positive;  // collapse to one class
    const auto run = run_entity(reports, entity.samples, fast_config(), 7);
    CHECK(run.report.error.empty());
    CHECK(!run.report.eligible);
    CHECK(run.report.plan.mode == LearningMode::Ineligible);
    CHECK(!run.report.plan.reason.empty());
    CHECK(!run.model.has_value());
}

TEST_CASE("run_entity: deterministic for a fixed seed (timing excluded)") {
    synth::EntityOptions opts;
    opts.n_reports = 150;
    const auto entity = synth::make_entity("e_det", 77, opts);
    const auto cfg = fast_config();
    const auto a = run_entity(entity.reports, entity.samples, cfg, 42);
    const auto b = run_entity(entity.reports, entity.samples, cfg, 42);
    CHECK(a.report.to_json(cfg, false).dump() == b.report.to_json(cfg, false).dump());
    REQUIRE(a.model.has_value());
    REQUIRE(b.model.has_value());
    CHECK(serialize_model(*a.model) == serialize_model(*b.model));
    // a different seed changes the outcome somewhere
    const auto c = run_entity(entity.reports, entity.samples, cfg, 43);
    CHECK(a.report.to_json(cfg, false).dump() != c.report.to_json(cfg, false).dump());
}

TEST_CASE("run_entity: two-class entities train on the two present classes") {
    synth::EntityOptions opts;
    opts.n_reports = 200;
    opts.label_noise = 0.0;
    const auto entity = synth::make_entity("e_two", 13, opts);
    auto reports = entity.reports;
    for (auto& r : reports)  // erase one class
        if (r.valence == ValenceClass::Negative) r.valence = ValenceClass::Neutral;
    const auto run = run_entity(reports, entity.samples, fast_config(), 7);
    REQUIRE(run.report.error.empty());
    CHECK(run.report.plan.mode == LearningMode::TwoClass);
    REQUIRE(run.model.has_value());
    CHECK(run.model->num_classes() == 2);
}

TEST_CASE("run_entity: persists the model when an output directory is given") {
    synth::EntityOptions opts;
    opts.n_reports = 150;
    const auto entity = synth::make_entity("e_persist", 3, opts);
    const std::string dir = "/tmp/sxp_test_run_entity";
    std::filesystem::remove_all(dir);
    const auto run = run_entity(entity.reports, entity.samples, fast_config(), 7, dir);
    REQUIRE(run.report.error.empty());
    REQUIRE(!run.report.model_path.empty());
    const GbdtModel loaded = load_model(run.report.model_path);
    CHECK(loaded.feature_names == run.model->feature_names);
    std::filesystem::remove_all(dir);
}

TEST_CASE("run_population: mixed population isolates failures and reconciles counts") {
    IngestResult data;
    for (int i = 0; i < 3; ++i) {
        synth::EntityOptions opts;
        opts.n_reports = 120;
        const auto e = synth::make_entity("pop" + std::to_string(i), 200 + i, opts);
        data.reports.insert(data.reports.end(), e.reports.begin(), e.reports.end());
        data.samples.insert(data.samples.end(), e.samples.begin(), e.samples.end());
    }
    // one entity with a single class: ineligible
    {
        synth::EntityOptions opts;
        opts.n_reports = 40;
        auto e = synth::make_entity("pop_flat", 300, opts);
        for (auto& r : e.reports) r.valence = ValenceClass::Neutral;
        data.reports.insert(data.reports.end(), e.reports.begin(), e.reports.end());
        data.samples.insert(data.samples.end(), e.samples.begin(), e.samples.end());
    }
    // one entity with reports but no samples: stage error isolated
    {
        synth::EntityOptions opts;
        opts.n_reports = 30;
        auto e = synth::make_entity("pop_nosamples", 400, opts);
        data.reports.insert(data.reports.end(), e.reports.begin(), e.reports.end());
    }
    const auto cfg = fast_config();
    const auto summary = run_population(data, cfg, 5);
    CHECK(summary.reports.size() == 5);
    CHECK(summary.eligible + summary.ineligible + summary.failed == summary.reports.size());
    CHECK(summary.eligible == 3);
    CHECK(summary.ineligible == 1);
    CHECK(summary.failed == 1);
    // histogram covers exactly the eligible entities
    int hist_total = 0;
    for (int b : summary.f1_histogram) hist_total += b;
    CHECK(hist_total == 3);
    // report rows sorted by entity id
    for (std::size_t i = 1; i < summary.reports.size(); ++i)
        CHECK(summary.reports[i - 1].entity_id < summary.reports[i].entity_id);
}

TEST_CASE("run_population: empty dataset gives an empty summary") {
    const auto cfg = fast_config();
    const auto summary = run_population({}, cfg, 1);
    CHECK(summary.reports.empty());
    CHECK(summary.eligible == 0);
    const auto j = summary.to_json(cfg);
    CHECK(j["entities"] == 0);
}

TEST_CASE("report json carries the config echo and the stage bookkeeping") {
    synth::EntityOptions opts;
    opts.n_reports = 120;
    const auto entity = synth::make_entity("e_json", 9, opts);
    const auto cfg = fast_config();
    const auto run = run_entity(entity.reports, entity.samples, cfg, 11);
    const auto j = run.report.to_json(cfg);
    CHECK(j.contains("config"));
    CHECK(j["config"]["learn"]["tuning_budget"] == cfg.tuning_budget);
    CHECK(j["counts"]["reports_raw"] == entity.reports.size());
    CHECK(j.contains("imbalance_plan"));
    CHECK(j.contains("trials"));
    CHECK(j.contains("timing_ms"));
    CHECK(!run.report.to_json(cfg, false).contains("timing_ms"));
    CHECK(j.contains("best_hyperparams"));
    CHECK(j.contains("folds"));
    CHECK(j.contains("clusters"));
}

TEST_CASE("cluster search results land in the report without becoming features") {
    synth::EntityOptions opts;
    opts.n_reports = 150;
    opts.n_places = 3;
    const auto entity = synth::make_entity("e_cluster", 31, opts);
    const auto run = run_entity(entity.reports, entity.samples, fast_config(), 7);
    REQUIRE(run.report.error.empty());
    REQUIRE(run.report.cluster_params.has_value());
    CHECK(run.report.cluster_points > 0);
    // features stay exactly (dow, hour, cells)
    REQUIRE(run.model.has_value());
    CHECK(run.model->feature_names[0] == "moment_dow");
    CHECK(run.model->feature_names[1] == "moment_hour");
    for (std::size_t i = 2; i < run.model->feature_names.size(); ++i)
        CHECK(run.model->feature_names[i].rfind("mgrs_", 0) == 0);
}
