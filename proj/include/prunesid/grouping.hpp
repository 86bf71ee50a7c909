#pragma once

#include "prunesid/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace prunesid {

/// Hard assignment of tokens to principal directions. `loadings` is the
/// T x K matrix of right singular vectors (empty for non-PSCA groupings).
struct GroupAssignment {
    std::vector<std::size_t> group_of;
    std::vector<double> scores;
    std::size_t groups = 0;
    Matrix loadings;

    std::size_t tokens() const noexcept { return group_of.size(); }
};

/// floor(budget / 4). Throws for budgets below 4; pass an explicit K instead.
std::size_t default_group_count(std::size_t budget);

/// As above, clamped to [1, min(T - 1, D)] for the given matrix.
std::size_t default_group_count(std::size_t budget, const TokenMatrix& context);

/// Sigmoid, centre, rank-K PCA over the token dimension, then argmax |V| per
/// token (lowest component index wins ties). Requires 1 <= K <= min(T, D).
/// A matrix that centres to zero puts every token in group 0 with score 0.
GroupAssignment psca_group(const TokenMatrix& tokens, std::size_t groups, std::uint64_t seed,
                           int svd_iters = default_power_iterations);

/// Token count per group; sums to T.
std::vector<std::size_t> group_sizes(const GroupAssignment& assignment);

/// Token indices per group, ascending.
std::vector<std::vector<std::size_t>> group_members(const GroupAssignment& assignment);

}  // namespace prunesid
