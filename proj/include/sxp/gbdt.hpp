#pragma once

// Gradient-boosted regression trees with a softmax link: one tree per
// class per round, second-order leaf weights, exact greedy splits over
// the distinct values of each feature. Deterministic for a fixed seed.
// The persisted form is a compact little-endian binary (docs/formats.md).

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sxp/matrix.hpp"
#include "sxp/types.hpp"

namespace sxp {

struct Hyperparams {
    int n_rounds = 100;
    int max_depth = 3;
    double learning_rate = 0.3;
    double min_child_weight = 1.0;
    double l2_lambda = 1.0;
    double subsample = 1.0;

    void validate() const;
};

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // x[feature] < threshold goes left
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;   // leaf weight, shrinkage included
    double cover = 0.0;   // training rows that reached this node

    bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
    std::int32_t round = 0;
    std::uint8_t class_index = 0;
    std::vector<TreeNode> nodes;  // node 0 is the root

    double predict(std::span<const double> x) const;
    int depth() const;
    // cover-weighted mean leaf value (the tree's expected output)
    double mean_value() const;
};

struct FoldPlanSummary {
    int k = 0;
    std::vector<std::int32_t> fold_sizes;
};

class ModelIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GbdtModel {
    std::vector<ValenceClass> class_list;  // training classes, fixed order
    std::vector<double> base_score;        // margin-space prior per class
    std::vector<RegressionTree> trees;
    std::vector<std::string> feature_names;
    std::uint64_t seed = 0;
    Hyperparams hyperparams;
    FoldPlanSummary fold_plan;

    std::size_t num_classes() const { return class_list.size(); }
    int feature_index(const std::string& name) const;  // -1 if unknown

    std::vector<double> predict_margin(std::span<const double> x) const;
    // softmax over margins; entries in [0,1], summing to 1
    std::vector<double> predict_proba(std::span<const double> x) const;
    // class with the highest probability (first on ties)
    ValenceClass predict_class(std::span<const double> x) const;
};

// Labels must span at least two classes; features must be finite.
GbdtModel train_gbdt(const Matrix& features, const std::vector<ValenceClass>& labels,
                     const Hyperparams& hp, std::uint64_t seed,
                     const std::vector<std::string>& feature_names = {});

// Mean softmax cross-entropy of the model's predictions.
double log_loss(const GbdtModel& model, const Matrix& features,
                const std::vector<ValenceClass>& labels);

void persist_model(const GbdtModel& model, const std::string& path);
GbdtModel load_model(const std::string& path);  // throws ModelIoError

std::vector<unsigned char> serialize_model(const GbdtModel& model);
GbdtModel deserialize_model(std::span<const unsigned char> bytes);

}  // namespace sxp
