// Command-line surface: ingestion, reconstruction, text scoring, training,
// evaluation, prediction, explanation, group comparison, empathy replay,
// prediction maps and the journal demo.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sxp/config.hpp"
#include "sxp/economy.hpp"
#include "sxp/empathy.hpp"
#include "sxp/explain.hpp"
#include "sxp/features.hpp"
#include "sxp/folds.hpp"
#include "sxp/gbdt.hpp"
#include "sxp/ingest.hpp"
#include "sxp/mapexport.hpp"
#include "sxp/metrics.hpp"
#include "sxp/pipeline.hpp"
#include "sxp/sentiment.hpp"
#include "sxp/stats.hpp"
#include "sxp/store.hpp"

namespace {

using nlohmann::ordered_json;

sxp::PipelineConfig load_config(const std::string& flag_path) {
    if (!flag_path.empty()) return sxp::PipelineConfig::load(flag_path);
    if (const char* env = std::getenv("SXP_CONFIG"); env != nullptr && *env != '\0')
        return sxp::PipelineConfig::load(env);
    return {};
}

int parse_weekday(const std::string& s) {
    static const std::map<std::string, int> names = {
        {"monday", 0}, {"tuesday", 1}, {"wednesday", 2}, {"thursday", 3},
        {"friday", 4}, {"saturday", 5}, {"sunday", 6}};
    std::string lower;
    for (char c : s) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (auto it = names.find(lower); it != names.end()) return it->second;
    try {
        const int v = std::stoi(lower);
        if (v >= 0 && v <= 6) return v;
    } catch (const std::exception&) {
    }
    throw std::runtime_error("bad weekday: " + s + " (use monday..sunday or 0..6)");
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string read_all(std::istream& in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Shared transform: debounce + economy + reconstruct + feature join,
// exactly as training does it.
sxp::FeatureSet featureize_log(const sxp::IngestResult& data,
                               const sxp::PipelineConfig& cfg,
                               const std::string& only_entity = "") {
    std::map<std::string,
             std::pair<std::vector<sxp::ValenceReport>, std::vector<sxp::SensorSample>>>
        by_entity;
    for (const auto& r : data.reports)
        if (only_entity.empty() || r.entity_id == only_entity)
            by_entity[r.entity_id].first.push_back(r);
    for (const auto& s : data.samples)
        if (only_entity.empty() || s.entity_id == only_entity)
            by_entity[s.entity_id].second.push_back(s);

    sxp::FeatureSet merged;
    bool first = true;
    for (auto& [id, rs] : by_entity) {
        auto& [reports, samples] = rs;
        std::stable_sort(reports.begin(), reports.end(),
                         [](const auto& a, const auto& b) { return a.at < b.at; });
        std::stable_sort(samples.begin(), samples.end(),
                         [](const auto& a, const auto& b) { return a.at < b.at; });
        const auto debounced = sxp::debounce_reports(
            reports, static_cast<std::int64_t>(cfg.debounce_window_s * 1000.0));
        const auto retained = sxp::economy_filter(samples, cfg.rhythm);
        sxp::Instant horizon = 0;
        if (!retained.empty()) horizon = retained.back().at;
        if (!debounced.empty()) horizon = std::max(horizon, debounced.back().at);
        const auto rebuilt =
            retained.empty() ? retained : sxp::reconstruct(retained, cfg.rhythm, horizon);
        sxp::FeatureOptions fopts;
        fopts.join_window_ms = static_cast<std::int64_t>(cfg.join_window_min * 60000.0);
        fopts.include_synthetic = cfg.include_synthetic;
        sxp::FeatureSet fs = sxp::build_features(debounced, rebuilt, fopts);
        if (first) {
            merged = std::move(fs);
            first = false;
        } else {
            throw std::runtime_error(
                "event log spans multiple entities; pass --entity to pick one");
        }
    }
    if (first) throw std::runtime_error("no joinable instances");
    return merged;
}

// Rows of a model-aligned feature matrix for a labeled event log.
std::pair<sxp::Matrix, std::vector<sxp::ValenceClass>> featureize_for_model(
    const sxp::GbdtModel& model, const sxp::FeatureSet& fs) {
    sxp::Matrix x(fs.x.rows, model.feature_names.size());
    for (std::size_t i = 0; i < fs.x.rows; ++i) {
        sxp::MomentContext moment;
        moment.weekday = static_cast<int>(fs.x.at(i, 0));
        moment.hour = static_cast<int>(fs.x.at(i, 1));
        std::optional<sxp::GridCell> cell;
        for (std::size_t j = 2; j < fs.feature_names.size(); ++j) {
            if (fs.x.at(i, j) != 0.0) {
                cell = sxp::GridCell::parse(fs.feature_names[j].substr(5));
                break;
            }
        }
        const auto row = sxp::featurize(model.feature_names, moment, cell);
        std::copy(row.begin(), row.end(), x.row(i).begin());
    }
    return {std::move(x), fs.labels};
}

int cmd_ingest(const std::string& input, const std::string& out_path) {
    const auto data = sxp::ingest_events_file(input);
    ordered_json j;
    j["lines_read"] = data.lines_read;
    j["reports"] = data.reports.size();
    j["samples"] = data.samples.size();
    j["profiles"] = data.profiles.size();
    j["malformed"] = data.diagnostics.size();
    std::cout << j.dump(2) << "\n";
    for (const auto& d : data.diagnostics)
        std::cerr << input << ":" << d.line_no << ": " << d.message << "\n";
    if (!out_path.empty()) {
        std::ostringstream out;
        for (const auto& r : data.reports) out << sxp::report_to_json_line(r) << "\n";
        for (const auto& s : data.samples) out << sxp::sample_to_json_line(s) << "\n";
        for (const auto& p : data.profiles) out << sxp::profile_to_json_line(p) << "\n";
        write_file(out_path, out.str());
    }
    return 0;
}

int cmd_reconstruct(const std::string& input, const std::string& out_path,
                    const sxp::PipelineConfig& cfg) {
    const auto data = sxp::ingest_events_file(input);
    for (const auto& line : data.provenance_lines) {
        const auto j = nlohmann::json::parse(line);
        sxp::ReconstructionProvenance prov;
        prov.sustain_interval_s = j.value("sustain_interval_s", 0.0);
        prov.min_move_m = j.value("min_move_m", 0.0);
        sxp::check_rhythm_matches(prov, cfg.rhythm);
    }
    std::map<std::string, std::vector<sxp::SensorSample>> by_entity;
    for (const auto& s : data.samples) by_entity[s.entity_id].push_back(s);

    std::ostringstream out;
    ordered_json prov;
    prov["type"] = "provenance";
    prov["sustain_interval_s"] = cfg.rhythm.sustain_interval_s;
    prov["min_move_m"] = cfg.rhythm.min_move_m;
    out << prov.dump() << "\n";
    std::size_t retained_total = 0, rebuilt_total = 0;
    for (auto& [id, samples] : by_entity) {
        std::stable_sort(samples.begin(), samples.end(),
                         [](const auto& a, const auto& b) { return a.at < b.at; });
        const auto retained = sxp::economy_filter(samples, cfg.rhythm);
        const auto rebuilt = retained.empty()
                                 ? retained
                                 : sxp::reconstruct(retained, cfg.rhythm, retained.back().at);
        retained_total += retained.size();
        rebuilt_total += rebuilt.size();
        for (const auto& s : rebuilt) out << sxp::sample_to_json_line(s) << "\n";
    }
    write_file(out_path, out.str());
    ordered_json j;
    j["samples_in"] = data.samples.size();
    j["samples_retained"] = retained_total;
    j["samples_out"] = rebuilt_total;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_score_text(const std::vector<std::string>& lexicon_paths, double alpha,
                   double theta) {
    std::vector<sxp::Lexicon> lexicons;
    for (const auto& spec : lexicon_paths) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("--lexicon expects tag=path, got: " + spec);
        lexicons.push_back(sxp::Lexicon::load(spec.substr(eq + 1), spec.substr(0, eq)));
    }
    if (lexicons.empty()) {
        lexicons.push_back(sxp::builtin_english_lexicon());
        lexicons.push_back(sxp::builtin_portuguese_lexicon());
    }
    const std::string text = read_all(std::cin);
    sxp::StopwordLanguageDetector detector;
    sxp::IdentityTranslator translator;
    sxp::ScoreOptions opts;
    opts.alpha = alpha;
    opts.theta = theta;
    const auto res = sxp::score_text(text, lexicons, &detector, &translator, opts);
    ordered_json j;
    j["score"] = res.score;
    j["class"] = sxp::to_string(res.valence);
    j["path"] = sxp::to_string(res.path);
    if (res.language_used) j["language"] = *res.language_used;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_train(const std::string& input, const std::string& out_dir,
              const sxp::PipelineConfig& cfg, std::uint64_t seed) {
    const auto data = sxp::ingest_events_file(input);
    if (data.reports.empty() && data.samples.empty())
        std::cerr << "warning: dataset is empty\n";
    const auto summary = sxp::run_population(data, cfg, seed, out_dir);
    std::filesystem::create_directories(out_dir);
    for (const auto& rep : summary.reports) {
        write_file(out_dir + "/" + sxp::entity_file_stem(rep.entity_id) + ".report.json",
                   rep.to_json(cfg).dump(2) + "\n");
    }
    write_file(out_dir + "/population.json", summary.to_json(cfg).dump(2) + "\n");
    std::cout << summary.to_json(cfg).dump(2) << "\n";
    return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& input,
                 const sxp::PipelineConfig& cfg, const std::string& entity) {
    const auto model = sxp::load_model(model_path);
    const auto data = sxp::ingest_events_file(input);
    const auto fs = featureize_log(data, cfg, entity);
    const auto [x, labels] = featureize_for_model(model, fs);
    const auto report = sxp::evaluate_model(model, x, labels, cfg.weighted_f1);
    ordered_json j;
    ordered_json classes = ordered_json::array();
    for (auto c : report.class_list) classes.push_back(sxp::to_string(c));
    j["classes"] = classes;
    j["f1_macro"] = report.f1_macro;
    j["f1_per_class"] = report.f1_per_class;
    j["confusion"] = report.confusion;
    j["f1_bin"] = sxp::kF1BinLabels[sxp::f1_bin_index(report.f1_macro)];
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& weekday, int hour,
                const std::string& cell_str) {
    const auto model = sxp::load_model(model_path);
    sxp::MomentContext moment;
    moment.weekday = parse_weekday(weekday);
    if (hour < 0 || hour > 23) throw std::runtime_error("hour must be 0..23");
    moment.hour = hour;
    std::optional<sxp::GridCell> cell;
    if (!cell_str.empty()) {
        cell = sxp::GridCell::parse(cell_str);
        if (!cell) throw std::runtime_error("bad MGRS cell: " + cell_str);
    }
    const auto x = sxp::featurize(model.feature_names, moment, cell);
    const auto p = model.predict_proba(x);
    ordered_json j;
    for (std::size_t i = 0; i < p.size(); ++i)
        j[sxp::to_string(model.class_list[i])] = p[i];
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_explain(const std::string& model_path, const std::string& input,
                const sxp::PipelineConfig& cfg, const std::string& entity,
                const std::string& csv_path, std::size_t max_instances) {
    const auto model = sxp::load_model(model_path);
    const auto data = sxp::ingest_events_file(input);
    const auto fs = featureize_log(data, cfg, entity);
    const auto [x, labels] = featureize_for_model(model, fs);

    const auto mean_abs = sxp::mean_abs_attribution(model, x);
    sxp::EntityAttribution ea{entity.empty() ? fs.feature_names.front() : entity,
                              model.feature_names, mean_abs};
    ea.entity_id = entity.empty() ? "entity" : entity;
    const auto ranking = sxp::rank_features({ea});

    ordered_json j;
    j["instances"] = x.rows;
    j["top_feature"] = ranking.entities.front().top_feature;
    ordered_json influence = ordered_json::array();
    for (std::size_t i = 0; i < model.feature_names.size(); ++i)
        influence.push_back({{"feature", model.feature_names[i]},
                             {"mean_abs_contribution", mean_abs[i]}});
    j["feature_influence"] = influence;
    ordered_json inst = ordered_json::array();
    for (std::size_t i = 0; i < std::min(x.rows, max_instances); ++i) {
        const auto a = sxp::shap_attribution(model, x.row(i));
        ordered_json ij;
        ij["base"] = a.base;
        ij["phi"] = a.phi;
        ij["margin_check"] = model.predict_margin(x.row(i));
        inst.push_back(std::move(ij));
    }
    j["attributions"] = inst;
    std::cout << j.dump(2) << "\n";

    if (!csv_path.empty()) {
        std::ostringstream csv;
        csv << "feature,mean_abs_contribution\n";
        for (std::size_t i = 0; i < model.feature_names.size(); ++i)
            csv << model.feature_names[i] << "," << mean_abs[i] << "\n";
        write_file(csv_path, csv.str());
    }
    return 0;
}

int cmd_compare(const std::string& input, int age_split, const std::string& coding,
                double alpha, bool csv) {
    const auto data = sxp::ingest_events_file(input);
    std::map<std::string, sxp::ClassCounts> per_entity;
    for (const auto& r : data.reports) ++per_entity[r.entity_id][r.valence];
    sxp::GroupSpec spec;
    if (age_split >= 0) spec.age_split = age_split;
    const auto coding_v = coding == "reports" ? sxp::MeasurementCoding::SignedReports
                                              : sxp::MeasurementCoding::ClassProportions;
    const auto cmp = sxp::compare_groups(per_entity, data.profiles, spec, coding_v, alpha);

    if (csv) {
        std::cout << "comparison,n_a,n_b,u,p_value,method,h0_rejected\n";
        for (const auto& row : cmp.rows) {
            if (row.skipped) {
                std::cout << row.label << ",,,,skipped: " << row.skip_reason << ",,\n";
                continue;
            }
            std::cout << row.label << "," << row.n_a << "," << row.n_b << ","
                      << row.result.u_statistic << "," << row.result.p_value << ","
                      << (row.result.method == sxp::TestMethod::Exact ? "exact" : "normal")
                      << "," << (row.result.h0_rejected ? "rejected" : "not_rejected")
                      << "\n";
        }
        return 0;
    }
    ordered_json j;
    j["age_split"] = cmp.age_split;
    j["excluded_missing_demographics"] = cmp.excluded_entities;
    ordered_json rows = ordered_json::array();
    for (const auto& row : cmp.rows) {
        ordered_json r;
        r["comparison"] = row.label;
        if (row.skipped) {
            r["skipped"] = row.skip_reason;
        } else {
            r["n_a"] = row.n_a;
            r["n_b"] = row.n_b;
            r["u"] = row.result.u_statistic;
            r["p_value"] = row.result.p_value;
            r["method"] = row.result.method == sxp::TestMethod::Exact ? "exact" : "normal";
            r["h0_rejected"] = row.result.h0_rejected;
        }
        rows.push_back(std::move(r));
    }
    j["tests"] = rows;
    ordered_json sums = ordered_json::array();
    for (const auto& s : cmp.summaries) {
        ordered_json sj;
        sj["group"] = s.label;
        sj["entities"] = s.entities;
        sj["reports"] = s.reports;
        sj["negative_pct"] = s.class_pct[0];
        sj["neutral_pct"] = s.class_pct[1];
        sj["positive_pct"] = s.class_pct[2];
        sums.push_back(std::move(sj));
    }
    j["report_percentages"] = sums;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_empathy(const std::string& input, double half_life_s, double boost,
                double pause_multiplier) {
    const auto data = sxp::ingest_events_file(input);
    std::map<std::string, std::vector<sxp::ValenceReport>> by_entity;
    for (const auto& r : data.reports) by_entity[r.entity_id].push_back(r);
    std::cout << "entity,at,score\n";
    for (auto& [id, reports] : by_entity) {
        std::stable_sort(reports.begin(), reports.end(),
                         [](const auto& a, const auto& b) { return a.at < b.at; });
        sxp::EmpathyState state;
        state.half_life_s = half_life_s;
        state.report_boost = boost;
        state.pause_multiplier = pause_multiplier;
        state.last_update = reports.empty() ? 0 : reports.front().at;
        for (const auto& r : reports) {
            state = sxp::on_report(state, r.at);
            std::cout << id << "," << sxp::format_rfc3339(r.at) << "," << state.score
                      << "\n";
        }
    }
    return 0;
}

int cmd_map(const std::string& model_path, const std::string& input,
            const sxp::PipelineConfig& cfg, const std::string& entity,
            const std::string& weekday, int hour, int top_n, const std::string& out_path,
            const std::string& html_path) {
    const auto model = sxp::load_model(model_path);
    const auto data = sxp::ingest_events_file(input);
    const auto fs = featureize_log(data, cfg, entity);
    const auto [x, labels] = featureize_for_model(model, fs);
    const auto mean_abs = sxp::mean_abs_attribution(model, x);
    const auto doc =
        sxp::export_map(model, mean_abs, parse_weekday(weekday), hour, top_n);
    if (!doc.warning.empty()) std::cerr << "warning: " << doc.warning << "\n";
    const std::string geojson = sxp::map_to_geojson(doc);
    if (out_path.empty()) {
        std::cout << geojson << "\n";
    } else {
        write_file(out_path, geojson);
    }
    if (!html_path.empty()) write_file(html_path, sxp::map_to_html(doc));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contextual emotional-valence learning and prediction toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path,
                   "Pipeline config file (or set SXP_CONFIG)")
        ->envname("SXP_CONFIG");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Parse and validate an event log");
    std::string in_path, out_path;
    ingest->add_option("--input", in_path, "Event log (NDJSON)")->required();
    ingest->add_option("--out", out_path, "Write normalized records here");

    // reconstruct
    auto* reconstruct =
        app.add_subcommand("reconstruct", "Economy-filter and reconstruct sample streams");
    std::string rec_in, rec_out;
    reconstruct->add_option("--input", rec_in, "Event log (NDJSON)")->required();
    reconstruct->add_option("--out", rec_out, "Reconstructed sample log")->required();

    // score-text
    auto* score = app.add_subcommand("score-text", "Score stdin text valence");
    std::vector<std::string> lexicon_specs;
    double alpha = 15.0, theta = 0.05;
    score->add_option("--lexicon", lexicon_specs, "Extra lexicon as tag=path");
    score->add_option("--alpha", alpha, "Normalization constant");
    score->add_option("--theta", theta, "Class threshold");

    // train
    auto* train = app.add_subcommand("train", "Run the learning pipeline per entity");
    std::string train_in, train_out;
    std::uint64_t seed = 0;
    train->add_option("--input", train_in, "Event log (NDJSON)")->required();
    train->add_option("--out", train_out, "Output directory")->required();
    train->add_option("--seed", seed, "Deterministic seed");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Evaluate a model on a labeled log");
    std::string eval_model, eval_in, eval_entity;
    evaluate->add_option("--model", eval_model, "Model file")->required();
    evaluate->add_option("--input", eval_in, "Event log (NDJSON)")->required();
    evaluate->add_option("--entity", eval_entity, "Entity id (for multi-entity logs)");

    // predict
    auto* predict = app.add_subcommand("predict", "Predict class probabilities");
    std::string pred_model, pred_weekday = "monday", pred_cell;
    int pred_hour = 12;
    predict->add_option("--model", pred_model, "Model file")->required();
    predict->add_option("--weekday", pred_weekday, "monday..sunday or 0..6")->required();
    predict->add_option("--hour", pred_hour, "0..23")->required();
    predict->add_option("--cell", pred_cell, "MGRS cell id, e.g. 31UDQ4811");

    // explain
    auto* explain = app.add_subcommand("explain", "Shapley attributions and ranking");
    std::string exp_model, exp_in, exp_entity, exp_csv;
    std::size_t exp_max = 20;
    explain->add_option("--model", exp_model, "Model file")->required();
    explain->add_option("--input", exp_in, "Event log (NDJSON)")->required();
    explain->add_option("--entity", exp_entity, "Entity id (for multi-entity logs)");
    explain->add_option("--out-csv", exp_csv, "Feature-influence CSV path");
    explain->add_option("--max-instances", exp_max, "Instance attributions to emit");

    // compare
    auto* compare = app.add_subcommand("compare", "Age/gender group comparisons");
    std::string cmp_in, cmp_coding = "proportions";
    int cmp_age_split = -1;
    double cmp_alpha = 0.05;
    bool cmp_csv = false;
    compare->add_option("--input", cmp_in, "Event log (NDJSON)")->required();
    compare->add_option("--age-split", cmp_age_split, "Override the median age split");
    compare->add_option("--coding", cmp_coding, "proportions|reports")
        ->check(CLI::IsMember({"proportions", "reports"}));
    compare->add_option("--alpha", cmp_alpha, "Significance level");
    compare->add_flag("--csv", cmp_csv, "Emit CSV instead of JSON");

    // empathy
    auto* empathy = app.add_subcommand("empathy", "Replay reports into a score trajectory");
    std::string emp_in;
    double emp_half_life = 86400.0, emp_boost = 0.05, emp_pause = 2.0;
    empathy->add_option("--input", emp_in, "Event log (NDJSON)")->required();
    empathy->add_option("--half-life-s", emp_half_life, "Decay half-life in seconds");
    empathy->add_option("--boost", emp_boost, "Per-report boost");
    empathy->add_option("--pause-multiplier", emp_pause, "Half-life factor while paused");

    // map
    auto* map_cmd = app.add_subcommand("map", "Export a prediction map (GeoJSON/HTML)");
    std::string map_model, map_in, map_entity, map_weekday = "sunday", map_out, map_html;
    int map_hour = 8, map_top = 7;
    map_cmd->add_option("--model", map_model, "Model file")->required();
    map_cmd->add_option("--input", map_in, "Event log (NDJSON)")->required();
    map_cmd->add_option("--entity", map_entity, "Entity id (for multi-entity logs)");
    map_cmd->add_option("--weekday", map_weekday, "monday..sunday or 0..6")->required();
    map_cmd->add_option("--hour", map_hour, "0..23")->required();
    map_cmd->add_option("--top", map_top, "Cells to include");
    map_cmd->add_option("--out", map_out, "GeoJSON output path (default stdout)");
    map_cmd->add_option("--html", map_html, "Also write an HTML viewer");

    // journal
    auto* journal = app.add_subcommand("journal", "Append-only journal demo");
    journal->require_subcommand(1);
    std::string j_file, j_payload, j_peer;
    double j_retention_days = 28.0;
    auto* j_append = journal->add_subcommand("append", "Append a payload");
    j_append->add_option("--file", j_file, "Journal file")->required();
    j_append->add_option("--payload", j_payload, "Payload text")->required();
    auto* j_sync = journal->add_subcommand("sync", "Sync to a peer directory");
    j_sync->add_option("--file", j_file, "Journal file")->required();
    j_sync->add_option("--peer", j_peer, "Peer drop directory")->required();
    auto* j_compact = journal->add_subcommand("compact", "Drop old synced entries");
    j_compact->add_option("--file", j_file, "Journal file")->required();
    j_compact->add_option("--retention-days", j_retention_days, "Retention window");
    auto* j_list = journal->add_subcommand("list", "List entries");
    j_list->add_option("--file", j_file, "Journal file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help/--version
        app.exit(e);
        return 2;
    }

    try {
        const auto now = []() -> sxp::Instant {
            return static_cast<sxp::Instant>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                                 std::chrono::system_clock::now().time_since_epoch())
                                                 .count());
        };
        if (*ingest) return cmd_ingest(in_path, out_path);
        if (*reconstruct) return cmd_reconstruct(rec_in, rec_out, load_config(config_path));
        if (*score) return cmd_score_text(lexicon_specs, alpha, theta);
        if (*train) return cmd_train(train_in, train_out, load_config(config_path), seed);
        if (*evaluate)
            return cmd_evaluate(eval_model, eval_in, load_config(config_path), eval_entity);
        if (*predict) return cmd_predict(pred_model, pred_weekday, pred_hour, pred_cell);
        if (*explain)
            return cmd_explain(exp_model, exp_in, load_config(config_path), exp_entity,
                               exp_csv, exp_max);
        if (*compare) return cmd_compare(cmp_in, cmp_age_split, cmp_coding, cmp_alpha, cmp_csv);
        if (*empathy) return cmd_empathy(emp_in, emp_half_life, emp_boost, emp_pause);
        if (*map_cmd)
            return cmd_map(map_model, map_in, load_config(config_path), map_entity,
                           map_weekday, map_hour, map_top, map_out, map_html);
        if (*journal) {
            auto j = sxp::Journal::open(j_file);
            if (*j_append) {
                const auto seq = j.append(j_payload, now());
                std::cout << "{\"seq\": " << seq << "}\n";
            } else if (*j_sync) {
                std::filesystem::create_directories(j_peer);
                sxp::FileDropAcknowledger peer(j_peer);
                const auto rep = j.sync_cycle(peer, now());
                ordered_json out;
                out["sent"] = rep.sent;
                out["acked"] = rep.acked;
                out["peer_ok"] = rep.peer_ok;
                out["retry_boost"] = rep.retry_boost;
                std::cout << out.dump(2) << "\n";
            } else if (*j_compact) {
                const auto removed = j.compact(
                    static_cast<std::int64_t>(j_retention_days * 86400000.0), now());
                std::cout << "{\"removed\": " << removed << "}\n";
            } else if (*j_list) {
                for (const auto& e : j.entries()) {
                    ordered_json out;
                    out["seq"] = e.seq;
                    out["appended_at"] = sxp::format_rfc3339(e.appended_at);
                    out["synced"] = e.synced;
                    if (e.synced_at) out["synced_at"] = sxp::format_rfc3339(*e.synced_at);
                    out["payload"] = e.payload;
                    std::cout << out.dump() << "\n";
                }
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
