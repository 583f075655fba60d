#pragma once

// Pipeline configuration: a key-value text format with one [section] per
// module (docs/formats.md). Every value here is echoed into run reports.

#include <string>

#include <json.hpp>

#include "sxp/balance.hpp"
#include "sxp/bayesopt.hpp"
#include "sxp/economy.hpp"

namespace sxp {

struct PipelineConfig {
    // [model]
    double debounce_window_s = 2.0;
    // [economy]
    CollectionRhythm rhythm;
    // [sentiment]
    double sentiment_alpha = 15.0;
    double sentiment_theta = 0.05;
    // [balance]
    BalanceThresholds balance;
    // [learn]
    int k_max = 10;
    double join_window_min = 30.0;
    int tuning_budget = 40;
    bool include_synthetic = true;
    bool weighted_f1 = false;
    int n_rounds_min = 20, n_rounds_max = 300;
    int depth_min = 1, depth_max = 6;
    double learning_rate_min = 0.01, learning_rate_max = 0.5;  // log-scaled search
    double min_child_weight_min = 0.0, min_child_weight_max = 10.0;
    double l2_lambda_min = 0.0, l2_lambda_max = 10.0;
    double subsample_min = 0.5, subsample_max = 1.0;
    // [empathy]
    double empathy_half_life_s = 86400.0;
    double empathy_report_boost = 0.05;
    double empathy_pause_multiplier = 2.0;
    // [store]
    double retention_days = 28.0;
    // [pipeline]
    int workers = 0;  // 0 = hardware concurrency

    static PipelineConfig parse(const std::string& text);
    static PipelineConfig load(const std::string& path);

    // hyperparameter search space for the tuner
    std::vector<ParamRange> search_space() const;

    nlohmann::ordered_json to_json() const;
};

}  // namespace sxp
