#pragma once

// Stratified K-fold planning: K adapts to the rarest class so that every
// fold sees every present class.

#include <cstdint>
#include <vector>

#include "sxp/types.hpp"

namespace sxp {

struct FoldPlan {
    int k = 0;
    std::vector<int> assignment;  // fold id per instance, 0..k-1

    std::vector<std::int32_t> fold_sizes() const;
};

// k = min(k_max, smallest class count); stratified assignment with seeded
// shuffling. Throws std::runtime_error("unsatisfiable fold plan") when the
// smallest class count is below 2, std::invalid_argument when fewer than
// two classes are present.
FoldPlan select_k(const std::vector<ValenceClass>& labels, int k_max, std::uint64_t seed);

}  // namespace sxp
