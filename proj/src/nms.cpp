#include "prunesid/nms.hpp"

#include "prunesid/error.hpp"
#include "prunesid/log.hpp"

#include <cmath>
#include <cstdint>
#include <string>

namespace prunesid {

double global_redundancy(const SimilarityMatrix& similarity) {
    const std::size_t n = similarity.size();
    if (n < 2) {
        log::warn("redundancy of fewer than two tokens is defined as 0");
        return 0.0;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) sum += similarity(i, j);
    return 2.0 * sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double global_redundancy(const UnitRows& rows) {
    const std::size_t n = rows.size();
    if (n < 2) {
        log::warn("redundancy of fewer than two tokens is defined as 0");
        return 0.0;
    }
    const Eigen::RowVectorXd total = rows.values().colwise().sum();
    const double pair_sum = total.squaredNorm() - rows.values().squaredNorm();
    const double rho = pair_sum / (static_cast<double>(n) * static_cast<double>(n - 1));
    return std::clamp(rho, -1.0, 1.0);
}

Threshold nms_threshold(double rho, std::size_t budget, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        fail(ErrorKind::parameter, "alpha must be a positive finite number, got " + std::to_string(alpha));
    }
    if (budget < 1) fail(ErrorKind::parameter, "token budget must be at least 1");
    const double lambda = static_cast<double>(budget) / alpha;
    return {lambda * std::max(rho, rho_floor), lambda};
}

std::vector<std::size_t> allocate_quotas(std::span<const std::size_t> sizes, std::size_t budget) {
    std::uint64_t total = 0;
    for (const std::size_t s : sizes) total += s;
    if (total == 0) fail(ErrorKind::parameter, "cannot allocate quotas over groups that are all empty");

    std::vector<std::size_t> quotas(sizes.size());
    std::vector<std::uint64_t> remainders(sizes.size());
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        const std::uint64_t scaled = static_cast<std::uint64_t>(sizes[k]) * budget;
        quotas[k] = static_cast<std::size_t>(scaled / total);
        remainders[k] = scaled % total;
        assigned += quotas[k];
    }

    std::vector<std::size_t> order(sizes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
    // Leftover is strictly less than the number of groups with a nonzero remainder.
    for (std::size_t i = 0; assigned < budget; ++i, ++assigned) ++quotas[order[i]];
    return quotas;
}

PrunedSelection select_tokens(const std::vector<std::vector<std::size_t>>& survivors,
                              std::span<const double> priority, std::span<const std::size_t> quotas,
                              std::size_t total_tokens) {
    if (quotas.size() != survivors.size()) {
        fail(ErrorKind::parameter, "got " + std::to_string(quotas.size()) + " quotas for " +
                                       std::to_string(survivors.size()) + " groups");
    }
    if (priority.size() != total_tokens) fail(ErrorKind::parameter, "priority length does not match token count");

    PrunedSelection out;
    out.quotas.assign(quotas.begin(), quotas.end());
    const std::size_t budget = std::accumulate(quotas.begin(), quotas.end(), std::size_t{0});
    const std::size_t target = std::min(budget, total_tokens);

    std::vector<unsigned char> retained(total_tokens, 0);
    std::vector<unsigned char> survived(total_tokens, 0);
    std::vector<std::size_t> spare;
    for (std::size_t k = 0; k < survivors.size(); ++k) {
        const auto& group = survivors[k];
        const std::size_t take = std::min(quotas[k], group.size());
        out.survivors_per_group.push_back(group.size());
        out.selected_per_group.push_back(take);
        for (std::size_t r = 0; r < group.size(); ++r) {
            survived.at(group[r]) = 1;
            if (r < take) {
                retained[group[r]] = 1;
                out.retained.push_back(group[r]);
            } else {
                spare.push_back(group[r]);
            }
        }
    }

    if (out.retained.size() < target) {
        std::vector<std::size_t> suppressed;
        for (std::size_t i = 0; i < total_tokens; ++i)
            if (!survived[i]) suppressed.push_back(i);
        for (const auto* pool : {&spare, &suppressed}) {
            for (const std::size_t i : rank_tokens(*pool, priority)) {
                if (out.retained.size() == target) break;
                retained[i] = 1;
                out.retained.push_back(i);
                out.backfilled.push_back(i);
            }
        }
    }

    std::sort(out.retained.begin(), out.retained.end());
    for (std::size_t i = 0; i < total_tokens; ++i) {
        if (retained[i]) continue;
        out.dropped.push_back({i, survived[i] ? DropReason::over_quota : DropReason::suppressed_by_nms});
    }
    return out;
}

}  // namespace prunesid
