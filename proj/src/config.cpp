#include "sxp/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sxp {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("bad boolean value: " + v);
}

}  // namespace

PipelineConfig PipelineConfig::parse(const std::string& text) {
    PipelineConfig cfg;

    std::map<std::string, std::function<void(const std::string&)>> setters = {
        {"model.debounce_window_s", [&](const std::string& v) { cfg.debounce_window_s = std::stod(v); }},
        {"economy.active_s", [&](const std::string& v) { cfg.rhythm.active_s = std::stod(v); }},
        {"economy.inactive_s", [&](const std::string& v) { cfg.rhythm.inactive_s = std::stod(v); }},
        {"economy.min_fetch_gap_ms", [&](const std::string& v) { cfg.rhythm.min_fetch_gap_ms = std::stod(v); }},
        {"economy.sustain_interval_s", [&](const std::string& v) { cfg.rhythm.sustain_interval_s = std::stod(v); }},
        {"economy.min_move_m", [&](const std::string& v) { cfg.rhythm.min_move_m = std::stod(v); }},
        {"sentiment.alpha", [&](const std::string& v) { cfg.sentiment_alpha = std::stod(v); }},
        {"sentiment.theta", [&](const std::string& v) { cfg.sentiment_theta = std::stod(v); }},
        {"balance.min_reports_per_class", [&](const std::string& v) { cfg.balance.min_reports_per_class = std::stoll(v); }},
        {"balance.max_degree", [&](const std::string& v) { cfg.balance.max_degree = std::stod(v); }},
        {"learn.k_max", [&](const std::string& v) { cfg.k_max = std::stoi(v); }},
        {"learn.join_window_min", [&](const std::string& v) { cfg.join_window_min = std::stod(v); }},
        {"learn.tuning_budget", [&](const std::string& v) { cfg.tuning_budget = std::stoi(v); }},
        {"learn.include_synthetic", [&](const std::string& v) { cfg.include_synthetic = parse_bool(v); }},
        {"learn.weighted_f1", [&](const std::string& v) { cfg.weighted_f1 = parse_bool(v); }},
        {"learn.n_rounds_min", [&](const std::string& v) { cfg.n_rounds_min = std::stoi(v); }},
        {"learn.n_rounds_max", [&](const std::string& v) { cfg.n_rounds_max = std::stoi(v); }},
        {"learn.depth_min", [&](const std::string& v) { cfg.depth_min = std::stoi(v); }},
        {"learn.depth_max", [&](const std::string& v) { cfg.depth_max = std::stoi(v); }},
        {"learn.learning_rate_min", [&](const std::string& v) { cfg.learning_rate_min = std::stod(v); }},
        {"learn.learning_rate_max", [&](const std::string& v) { cfg.learning_rate_max = std::stod(v); }},
        {"learn.min_child_weight_min", [&](const std::string& v) { cfg.min_child_weight_min = std::stod(v); }},
        {"learn.min_child_weight_max", [&](const std::string& v) { cfg.min_child_weight_max = std::stod(v); }},
        {"learn.l2_lambda_min", [&](const std::string& v) { cfg.l2_lambda_min = std::stod(v); }},
        {"learn.l2_lambda_max", [&](const std::string& v) { cfg.l2_lambda_max = std::stod(v); }},
        {"learn.subsample_min", [&](const std::string& v) { cfg.subsample_min = std::stod(v); }},
        {"learn.subsample_max", [&](const std::string& v) { cfg.subsample_max = std::stod(v); }},
        {"empathy.half_life_s", [&](const std::string& v) { cfg.empathy_half_life_s = std::stod(v); }},
        {"empathy.report_boost", [&](const std::string& v) { cfg.empathy_report_boost = std::stod(v); }},
        {"empathy.pause_multiplier", [&](const std::string& v) { cfg.empathy_pause_multiplier = std::stod(v); }},
        {"store.retention_days", [&](const std::string& v) { cfg.retention_days = std::stod(v); }},
        {"pipeline.workers", [&](const std::string& v) { cfg.workers = std::stoi(v); }},
    };

    std::istringstream in(text);
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end())
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": unknown key `" + key + "`");
        try {
            it->second(value);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": " +
                                        e.what());
        }
    }
    return cfg;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse(text);
}

std::vector<ParamRange> PipelineConfig::search_space() const {
    return {
        {"n_rounds", static_cast<double>(n_rounds_min), static_cast<double>(n_rounds_max),
         false, true},
        {"max_depth", static_cast<double>(depth_min), static_cast<double>(depth_max), false,
         true},
        {"learning_rate", learning_rate_min, learning_rate_max, true, false},
        {"min_child_weight", min_child_weight_min, min_child_weight_max, false, false},
        {"l2_lambda", l2_lambda_min, l2_lambda_max, false, false},
        {"subsample", subsample_min, subsample_max, false, false},
    };
}

nlohmann::ordered_json PipelineConfig::to_json() const {
    nlohmann::ordered_json j;
    j["model"]["debounce_window_s"] = debounce_window_s;
    j["economy"]["active_s"] = rhythm.active_s;
    j["economy"]["inactive_s"] = rhythm.inactive_s;
    j["economy"]["duty_cycle"] = rhythm.duty_cycle();
    j["economy"]["min_fetch_gap_ms"] = rhythm.min_fetch_gap_ms;
    j["economy"]["sustain_interval_s"] = rhythm.sustain_interval_s;
    j["economy"]["min_move_m"] = rhythm.min_move_m;
    j["sentiment"]["alpha"] = sentiment_alpha;
    j["sentiment"]["theta"] = sentiment_theta;
    j["balance"]["min_reports_per_class"] = balance.min_reports_per_class;
    j["balance"]["max_degree"] = balance.max_degree;
    j["learn"]["k_max"] = k_max;
    j["learn"]["join_window_min"] = join_window_min;
    j["learn"]["tuning_budget"] = tuning_budget;
    j["learn"]["include_synthetic"] = include_synthetic;
    j["learn"]["weighted_f1"] = weighted_f1;
    j["learn"]["n_rounds_min"] = n_rounds_min;
    j["learn"]["n_rounds_max"] = n_rounds_max;
    j["learn"]["depth_min"] = depth_min;
    j["learn"]["depth_max"] = depth_max;
    j["learn"]["learning_rate_min"] = learning_rate_min;
    j["learn"]["learning_rate_max"] = learning_rate_max;
    j["learn"]["min_child_weight_min"] = min_child_weight_min;
    j["learn"]["min_child_weight_max"] = min_child_weight_max;
    j["learn"]["l2_lambda_min"] = l2_lambda_min;
    j["learn"]["l2_lambda_max"] = l2_lambda_max;
    j["learn"]["subsample_min"] = subsample_min;
    j["learn"]["subsample_max"] = subsample_max;
    j["empathy"]["half_life_s"] = empathy_half_life_s;
    j["empathy"]["report_boost"] = empathy_report_boost;
    j["empathy"]["pause_multiplier"] = empathy_pause_multiplier;
    j["store"]["retention_days"] = retention_days;
    j["pipeline"]["workers"] = workers;
    return j;
}

}  // namespace sxp
