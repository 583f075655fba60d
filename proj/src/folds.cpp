#include "sxp/folds.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "sxp/rng.hpp"

namespace sxp {

std::vector<std::int32_t> FoldPlan::fold_sizes() const {
    std::vector<std::int32_t> sizes(k, 0);
    for (int f : assignment) ++sizes[f];
    return sizes;
}

FoldPlan select_k(const std::vector<ValenceClass>& labels, int k_max, std::uint64_t seed) {
    if (k_max < 2) throw std::invalid_argument("k_max must be >= 2");
    std::map<ValenceClass, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    if (by_class.size() < 2)
        throw std::invalid_argument("fold plan needs at least two classes");

    std::size_t min_count = labels.size();
    for (const auto& [cls, idx] : by_class) min_count = std::min(min_count, idx.size());
    if (min_count < 2) throw std::runtime_error("unsatisfiable fold plan");
    const int k = static_cast<int>(std::min<std::size_t>(k_max, min_count));

    FoldPlan plan;
    plan.k = k;
    plan.assignment.assign(labels.size(), 0);
    Rng rng(seed);
    // Deal each class's shuffled instances round-robin, carrying the fold
    // pointer across classes so global fold sizes differ by at most one.
    int next_fold = 0;
    for (auto& [cls, idx] : by_class) {
        rng.shuffle(idx);
        for (std::size_t i : idx) {
            plan.assignment[i] = next_fold;
            next_fold = (next_fold + 1) % k;
        }
    }
    return plan;
}

}  // namespace sxp
