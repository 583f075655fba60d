#include "sxp/explain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sxp {

namespace {

// Decision-path bookkeeping for the polynomial-time tree traversal. The
// pweight of element i is the permutation weight of paths with i "one"
// (feature present) extensions.
struct PathElement {
    int feature_index = -1;
    double zero_fraction = 0.0;
    double one_fraction = 0.0;
    double pweight = 0.0;
};

void extend_path(PathElement* path, int unique_depth, double zero_fraction,
                 double one_fraction, int feature_index) {
    path[unique_depth] = {feature_index, zero_fraction, one_fraction,
                          unique_depth == 0 ? 1.0 : 0.0};
    for (int i = unique_depth - 1; i >= 0; --i) {
        path[i + 1].pweight +=
            one_fraction * path[i].pweight * (i + 1) / static_cast<double>(unique_depth + 1);
        path[i].pweight = zero_fraction * path[i].pweight * (unique_depth - i) /
                          static_cast<double>(unique_depth + 1);
    }
}

void unwind_path(PathElement* path, int unique_depth, int path_index) {
    const double one_fraction = path[path_index].one_fraction;
    const double zero_fraction = path[path_index].zero_fraction;
    double next_one_portion = path[unique_depth].pweight;
    for (int i = unique_depth - 1; i >= 0; --i) {
        if (one_fraction != 0.0) {
            const double tmp = path[i].pweight;
            path[i].pweight = next_one_portion * (unique_depth + 1) /
                              static_cast<double>((i + 1) * one_fraction);
            next_one_portion = tmp - path[i].pweight * zero_fraction * (unique_depth - i) /
                                         static_cast<double>(unique_depth + 1);
        } else {
            path[i].pweight = path[i].pweight * (unique_depth + 1) /
                              static_cast<double>(zero_fraction * (unique_depth - i));
        }
    }
    for (int i = path_index; i < unique_depth; ++i) {
        path[i].feature_index = path[i + 1].feature_index;
        path[i].zero_fraction = path[i + 1].zero_fraction;
        path[i].one_fraction = path[i + 1].one_fraction;
    }
}

double unwound_path_sum(const PathElement* path, int unique_depth, int path_index) {
    const double one_fraction = path[path_index].one_fraction;
    const double zero_fraction = path[path_index].zero_fraction;
    double next_one_portion = path[unique_depth].pweight;
    double total = 0.0;
    for (int i = unique_depth - 1; i >= 0; --i) {
        if (one_fraction != 0.0) {
            const double tmp = next_one_portion * (unique_depth + 1) /
                               static_cast<double>((i + 1) * one_fraction);
            total += tmp;
            next_one_portion = path[i].pweight - tmp * zero_fraction * (unique_depth - i) /
                                                     static_cast<double>(unique_depth + 1);
        } else if (zero_fraction != 0.0) {
            total += path[i].pweight / zero_fraction /
                     ((unique_depth - i) / static_cast<double>(unique_depth + 1));
        }
    }
    return total;
}

void tree_shap_recurse(const RegressionTree& tree, std::span<const double> x, double* phi,
                       int node_index, int unique_depth, PathElement* parent_path,
                       double parent_zero_fraction, double parent_one_fraction,
                       int parent_feature_index) {
    const TreeNode& node = tree.nodes[node_index];
    PathElement* path = parent_path + unique_depth + 1;
    std::copy(parent_path, parent_path + unique_depth + 1, path);
    extend_path(path, unique_depth, parent_zero_fraction, parent_one_fraction,
                parent_feature_index);

    if (node.is_leaf()) {
        for (int i = 1; i <= unique_depth; ++i) {
            const double w = unwound_path_sum(path, unique_depth, i);
            const PathElement& el = path[i];
            phi[el.feature_index] += w * (el.one_fraction - el.zero_fraction) * node.value;
        }
        return;
    }

    const int split = node.feature;
    const int hot = x[split] < node.threshold ? node.left : node.right;
    const int cold = hot == node.left ? node.right : node.left;
    const double w = node.cover;
    const double hot_zero_fraction = tree.nodes[hot].cover / w;
    const double cold_zero_fraction = tree.nodes[cold].cover / w;
    double incoming_zero_fraction = 1.0;
    double incoming_one_fraction = 1.0;

    // if this feature already appears on the path, undo that extension
    int path_index = 0;
    for (; path_index <= unique_depth; ++path_index)
        if (path[path_index].feature_index == split) break;
    if (path_index != unique_depth + 1) {
        incoming_zero_fraction = path[path_index].zero_fraction;
        incoming_one_fraction = path[path_index].one_fraction;
        unwind_path(path, unique_depth, path_index);
        unique_depth -= 1;
    }

    tree_shap_recurse(tree, x, phi, hot, unique_depth + 1, path,
                      hot_zero_fraction * incoming_zero_fraction, incoming_one_fraction,
                      split);
    tree_shap_recurse(tree, x, phi, cold, unique_depth + 1, path,
                      cold_zero_fraction * incoming_zero_fraction, 0.0, split);
}

void tree_shap(const RegressionTree& tree, std::span<const double> x, double* phi) {
    const int maxd = tree.depth() + 2;
    std::vector<PathElement> path_storage(static_cast<std::size_t>(maxd * (maxd + 1)) / 2);
    tree_shap_recurse(tree, x, phi, 0, 0, path_storage.data(), 1.0, 1.0, -1);
}

}  // namespace

Attribution shap_attribution(const GbdtModel& model, std::span<const double> instance) {
    if (instance.size() != model.feature_names.size())
        throw std::invalid_argument("instance width does not match model features");
    const std::size_t k = model.num_classes();
    const std::size_t f = model.feature_names.size();
    Attribution out;
    out.base = model.base_score;
    out.phi.assign(k, std::vector<double>(f, 0.0));
    for (const auto& tree : model.trees) {
        out.base[tree.class_index] += tree.mean_value();
        tree_shap(tree, instance, out.phi[tree.class_index].data());
    }
    return out;
}

std::vector<double> mean_abs_attribution(const GbdtModel& model, const Matrix& instances) {
    std::vector<double> acc(model.feature_names.size(), 0.0);
    if (instances.rows == 0) return acc;
    for (std::size_t i = 0; i < instances.rows; ++i) {
        const Attribution a = shap_attribution(model, instances.row(i));
        for (const auto& phi_c : a.phi)
            for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += std::abs(phi_c[j]);
    }
    for (auto& v : acc) v /= static_cast<double>(instances.rows);
    return acc;
}

std::string feature_family(const std::string& feature_name) {
    if (feature_name.rfind("mgrs_", 0) == 0) return "mgrs_*";
    return feature_name;
}

FeatureRanking rank_features(const std::vector<EntityAttribution>& entities) {
    if (entities.empty()) throw std::invalid_argument("ranking needs at least one entity");
    FeatureRanking out;
    std::map<std::string, int> family_counts;
    int ranked = 0;
    for (const auto& e : entities) {
        if (e.mean_abs.empty()) continue;
        std::size_t best = 0;
        bool tie = false;
        for (std::size_t j = 1; j < e.mean_abs.size(); ++j) {
            if (e.mean_abs[j] > e.mean_abs[best]) {
                best = j;
                tie = false;
            } else if (e.mean_abs[j] == e.mean_abs[best]) {
                tie = true;  // fixed feature order keeps the earlier one
            }
        }
        FeatureRanking::EntityTop top;
        top.entity_id = e.entity_id;
        top.top_feature = e.feature_names[best];
        top.family = feature_family(top.top_feature);
        top.mean_abs = e.mean_abs[best];
        top.tie = tie;
        ++family_counts[top.family];
        ++ranked;
        out.entities.push_back(std::move(top));
    }
    for (const auto& [family, count] : family_counts)
        out.family_share_pct[family] = 100.0 * count / std::max(ranked, 1);
    return out;
}

}  // namespace sxp
