#include "sxp/metrics.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace sxp {

std::vector<double> per_class_f1(const std::vector<std::vector<std::int64_t>>& confusion) {
    const std::size_t k = confusion.size();
    std::vector<double> f1(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        std::int64_t tp = confusion[c][c], fn = 0, fp = 0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j != c) {
                fn += confusion[c][j];
                fp += confusion[j][c];
            }
        }
        const std::int64_t denom = 2 * tp + fp + fn;
        f1[c] = denom > 0 ? 2.0 * tp / static_cast<double>(denom) : 0.0;
    }
    return f1;
}

double macro_f1(const std::vector<std::vector<std::int64_t>>& confusion, bool weighted) {
    const auto f1 = per_class_f1(confusion);
    double sum = 0.0, weight_sum = 0.0;
    for (std::size_t c = 0; c < confusion.size(); ++c) {
        std::int64_t support = 0;
        for (std::size_t j = 0; j < confusion.size(); ++j) support += confusion[c][j];
        if (support == 0) continue;  // class absent from true labels
        const double w = weighted ? static_cast<double>(support) : 1.0;
        sum += w * f1[c];
        weight_sum += w;
    }
    return weight_sum > 0.0 ? sum / weight_sum : 0.0;
}

namespace {

std::vector<ValenceClass> present_classes(const std::vector<ValenceClass>& labels) {
    std::map<ValenceClass, bool> seen;
    for (auto l : labels) seen[l] = true;
    std::vector<ValenceClass> out;
    for (auto& [c, _] : seen) out.push_back(c);
    return out;
}

int class_pos(const std::vector<ValenceClass>& list, ValenceClass c) {
    for (std::size_t i = 0; i < list.size(); ++i)
        if (list[i] == c) return static_cast<int>(i);
    return -1;
}

}  // namespace

EvalReport cross_validate(const Matrix& features, const std::vector<ValenceClass>& labels,
                          const Hyperparams& hp, const FoldPlan& plan, std::uint64_t seed,
                          const std::vector<std::string>& feature_names, bool weighted_f1) {
    if (plan.assignment.size() != labels.size())
        throw std::invalid_argument("fold plan does not match label count");
    EvalReport report;
    report.class_list = present_classes(labels);
    const std::size_t k = report.class_list.size();
    report.confusion.assign(k, std::vector<std::int64_t>(k, 0));
    std::vector<std::vector<double>> fold_class_f1;

    for (int fold = 0; fold < plan.k; ++fold) {
        std::vector<std::size_t> train_idx, test_idx;
        for (std::size_t i = 0; i < labels.size(); ++i)
            (plan.assignment[i] == fold ? test_idx : train_idx).push_back(i);
        Matrix train_x = features.select_rows(train_idx);
        std::vector<ValenceClass> train_y;
        for (auto i : train_idx) train_y.push_back(labels[i]);

        const GbdtModel model =
            train_gbdt(train_x, train_y, hp, seed + static_cast<std::uint64_t>(fold),
                       feature_names);

        std::vector<std::vector<std::int64_t>> cm(k, std::vector<std::int64_t>(k, 0));
        for (auto i : test_idx) {
            const ValenceClass pred = model.predict_class(features.row(i));
            const int t = class_pos(report.class_list, labels[i]);
            const int p = class_pos(report.class_list, pred);
            if (t >= 0 && p >= 0) ++cm[t][p];
        }
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b) report.confusion[a][b] += cm[a][b];
        report.fold_scores.push_back(macro_f1(cm, weighted_f1));
        fold_class_f1.push_back(per_class_f1(cm));
    }

    report.f1_per_class.assign(k, 0.0);
    for (const auto& fc : fold_class_f1)
        for (std::size_t c = 0; c < k; ++c) report.f1_per_class[c] += fc[c];
    for (auto& v : report.f1_per_class) v /= static_cast<double>(plan.k);
    double sum = 0.0;
    for (double s : report.fold_scores) sum += s;
    report.f1_macro = sum / static_cast<double>(report.fold_scores.size());
    return report;
}

EvalReport evaluate_model(const GbdtModel& model, const Matrix& features,
                          const std::vector<ValenceClass>& labels, bool weighted_f1) {
    if (features.rows != labels.size())
        throw std::invalid_argument("feature/label row mismatch");
    EvalReport report;
    // union of true-label classes and model classes, in ValenceClass order
    std::vector<ValenceClass> all = labels;
    all.insert(all.end(), model.class_list.begin(), model.class_list.end());
    report.class_list = present_classes(all);
    const std::size_t k = report.class_list.size();
    report.confusion.assign(k, std::vector<std::int64_t>(k, 0));
    for (std::size_t i = 0; i < features.rows; ++i) {
        const ValenceClass pred = model.predict_class(features.row(i));
        const int t = class_pos(report.class_list, labels[i]);
        const int p = class_pos(report.class_list, pred);
        ++report.confusion[t][p];
    }
    report.f1_per_class = per_class_f1(report.confusion);
    report.f1_macro = macro_f1(report.confusion, weighted_f1);
    report.fold_scores = {report.f1_macro};
    return report;
}

const std::vector<std::string> kF1BinLabels = {"<=0.6", "(0.6,0.7]", "(0.7,0.8]",
                                               "(0.8,0.9]", "(0.9,1.0]"};

std::size_t f1_bin_index(double f1) {
    if (f1 <= 0.6) return 0;
    if (f1 <= 0.7) return 1;
    if (f1 <= 0.8) return 2;
    if (f1 <= 0.9) return 3;
    return 4;
}

}  // namespace sxp
