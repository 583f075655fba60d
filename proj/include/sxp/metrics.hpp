#pragma once

// Evaluation: confusion matrices, per-class and macro F1, K-fold cross
// validation, and the F1 range bins used for population reporting.

#include <cstdint>
#include <string>
#include <vector>

#include "sxp/folds.hpp"
#include "sxp/gbdt.hpp"
#include "sxp/matrix.hpp"
#include "sxp/types.hpp"

namespace sxp {

struct EvalReport {
    std::vector<ValenceClass> class_list;
    std::vector<std::vector<std::int64_t>> confusion;  // [true][pred], pooled
    std::vector<double> f1_per_class;  // mean over folds, per class
    double f1_macro = 0.0;             // mean of f1_per_class over present classes
    std::vector<double> fold_scores;   // per-fold macro F1
};

// F1 over a confusion matrix; classes absent from the true labels are
// excluded from the macro mean. Weighted=true averages by true-class
// support instead.
double macro_f1(const std::vector<std::vector<std::int64_t>>& confusion,
                bool weighted = false);
std::vector<double> per_class_f1(const std::vector<std::vector<std::int64_t>>& confusion);

// Per-fold train/score with the given plan; per-class F1 and macro F1 are
// fold means, the confusion matrix is pooled over folds.
EvalReport cross_validate(const Matrix& features, const std::vector<ValenceClass>& labels,
                          const Hyperparams& hp, const FoldPlan& plan, std::uint64_t seed,
                          const std::vector<std::string>& feature_names = {},
                          bool weighted_f1 = false);

// Single-pass evaluation of a trained model on labeled data.
EvalReport evaluate_model(const GbdtModel& model, const Matrix& features,
                          const std::vector<ValenceClass>& labels, bool weighted_f1 = false);

// Population-report F1 ranges: "<=0.6", "(0.6,0.7]", "(0.7,0.8]",
// "(0.8,0.9]", "(0.9,1.0]".
extern const std::vector<std::string> kF1BinLabels;
std::size_t f1_bin_index(double f1);

}  // namespace sxp
