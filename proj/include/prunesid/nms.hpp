#pragma once

#include "prunesid/tensor.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace prunesid {

inline constexpr double default_alpha = 32.0;
inline constexpr double rho_floor = 0.05;

struct RedundancyStats {
    double rho = 0.0;
    double phi = 1.0;
    double tau = 0.0;
    double lambda = 0.0;
    double alpha = default_alpha;
};

struct Threshold {
    double tau;
    double lambda;
};

/// Mean off-diagonal similarity. Fewer than two tokens gives 0.
double global_redundancy(const SimilarityMatrix& similarity);

/// Same quantity in O(T D): sum_{i<j} <u_i, u_j> = (|sum u_i|^2 - sum |u_i|^2) / 2.
double global_redundancy(const UnitRows& rows);

/// lambda = budget / alpha, tau = lambda * max(rho, rho_floor).
Threshold nms_threshold(double rho, std::size_t budget, double alpha);

/// Visit order for NMS and top-n selection: descending priority, then
/// ascending token index.
inline bool ranks_before(std::span<const double> priority, std::size_t a, std::size_t b) {
    if (priority[a] != priority[b]) return priority[a] > priority[b];
    return a < b;
}

inline std::vector<std::size_t> rank_tokens(std::span<const std::size_t> tokens, std::span<const double> priority) {
    std::vector<std::size_t> order(tokens.begin(), tokens.end());
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return ranks_before(priority, a, b); });
    return order;
}

/// Greedy NMS over one group. Survivors come back in visit order. `similarity`
/// is any callable (i, j) -> double over global token indices.
template <typename Similarity>
std::vector<std::size_t> intra_group_nms(std::span<const std::size_t> group, std::span<const double> priority,
                                         Similarity&& similarity, double tau) {
    std::vector<std::size_t> kept;
    for (const std::size_t candidate : rank_tokens(group, priority)) {
        const bool distinct = std::all_of(kept.begin(), kept.end(),
                                          [&](std::size_t k) { return similarity(candidate, k) < tau; });
        if (distinct) kept.push_back(candidate);
    }
    return kept;
}

inline std::vector<std::size_t> intra_group_nms(std::span<const std::size_t> group, std::span<const double> priority,
                                                const SimilarityMatrix& similarity, double tau) {
    return intra_group_nms(group, priority, [&](std::size_t i, std::size_t j) { return similarity(i, j); }, tau);
}

/// Largest-remainder apportionment of `budget` over `sizes`; sums to budget
/// exactly. Remainder ties go to the lower group index.
std::vector<std::size_t> allocate_quotas(std::span<const std::size_t> sizes, std::size_t budget);

enum class DropReason { suppressed_by_nms, over_quota };

struct DroppedToken {
    std::size_t index;
    DropReason reason;
};

struct PrunedSelection {
    std::vector<std::size_t> retained;  // ascending token index
    std::vector<std::size_t> quotas;
    std::vector<std::size_t> survivors_per_group;
    std::vector<std::size_t> selected_per_group;  // NMS-selected only, excludes backfill
    std::vector<DroppedToken> dropped;            // ascending token index
    std::vector<std::size_t> backfilled;          // in fill order
};

/// Top-n_k survivors per group, then backfill to min(N, T) tokens: spare
/// survivors first, then NMS-suppressed tokens, each by descending priority.
/// `survivors[k]` must already be in visit order.
PrunedSelection select_tokens(const std::vector<std::vector<std::size_t>>& survivors,
                              std::span<const double> priority, std::span<const std::size_t> quotas,
                              std::size_t total_tokens);

}  // namespace prunesid
