#include "prunesid/baselines.hpp"

#include "prunesid/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace prunesid {

GroupAssignment random_grouping(const TokenMatrix& tokens, std::size_t groups, std::uint64_t seed) {
    const std::size_t n = tokens.tokens();
    if (groups < 1 || groups > n) {
        fail(ErrorKind::parameter, "random grouping needs 1 <= K <= T, got K=" + std::to_string(groups) +
                                       " for T=" + std::to_string(n));
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    GroupAssignment out;
    out.groups = groups;
    out.group_of.resize(n);
    out.scores.resize(n);
    const std::size_t base = n / groups;
    const std::size_t extra = n % groups;
    std::size_t pos = 0;
    for (std::size_t k = 0; k < groups; ++k) {
        const std::size_t size = base + (k < extra ? 1 : 0);
        for (std::size_t r = 0; r < size; ++r) out.group_of[order[pos++]] = k;
    }
    for (std::size_t i = 0; i < n; ++i) out.scores[i] = tokens.values().row(static_cast<Eigen::Index>(i)).norm();
    return out;
}

namespace {

double squared_distance(const RowMatrix& points, Eigen::Index i, const RowMatrix& centroids, Eigen::Index c) {
    return (points.row(i) - centroids.row(c)).squaredNorm();
}

}  // namespace

KMeansResult kmeans_grouping(const TokenMatrix& tokens, std::size_t groups, std::uint64_t seed,
                             std::size_t max_iters) {
    const auto n = static_cast<Eigen::Index>(tokens.tokens());
    const auto k = static_cast<Eigen::Index>(groups);
    if (groups < 1 || groups > tokens.tokens()) {
        fail(ErrorKind::parameter, "k-means needs 1 <= K <= T, got K=" + std::to_string(groups) +
                                       " for T=" + std::to_string(tokens.tokens()));
    }
    const RowMatrix& x = tokens.values();
    std::mt19937_64 rng(seed);

    // k-means++ seeding.
    RowMatrix centroids(k, x.cols());
    std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    Eigen::Index pick = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
    for (Eigen::Index c = 0; c < k; ++c) {
        centroids.row(c) = x.row(pick);
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            auto& d = nearest[static_cast<std::size_t>(i)];
            d = std::min(d, squared_distance(x, i, centroids, c));
            total += d;
        }
        if (c + 1 == k) break;
        if (total > 0.0) {
            std::discrete_distribution<Eigen::Index> weighted(nearest.begin(), nearest.end());
            pick = weighted(rng);
        } else {
            pick = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
        }
    }

    KMeansResult out;
    auto& assignment = out.assignment;
    assignment.groups = groups;
    assignment.group_of.assign(static_cast<std::size_t>(n), 0);
    std::vector<double> distance(static_cast<std::size_t>(n), 0.0);

    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index best = 0;
            double best_d = squared_distance(x, i, centroids, 0);
            for (Eigen::Index c = 1; c < k; ++c) {
                const double d = squared_distance(x, i, centroids, c);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            auto& g = assignment.group_of[static_cast<std::size_t>(i)];
            if (iter == 0 || g != static_cast<std::size_t>(best)) changed = true;
            g = static_cast<std::size_t>(best);
            distance[static_cast<std::size_t>(i)] = best_d;
        }

        // Empty clusters take the point farthest from its centroid among
        // clusters that can spare one.
        std::vector<std::size_t> sizes(groups, 0);
        for (const std::size_t g : assignment.group_of) ++sizes[g];
        for (std::size_t c = 0; c < groups; ++c) {
            if (sizes[c] > 0) continue;
            std::size_t far = tokens.tokens();
            for (std::size_t i = 0; i < tokens.tokens(); ++i) {
                if (sizes[assignment.group_of[i]] < 2) continue;
                if (far == tokens.tokens() || distance[i] > distance[far]) far = i;
            }
            if (far == tokens.tokens()) fail(ErrorKind::internal, "k-means could not repair an empty cluster");
            --sizes[assignment.group_of[far]];
            assignment.group_of[far] = c;
            ++sizes[c];
            distance[far] = 0.0;
            centroids.row(static_cast<Eigen::Index>(c)) = x.row(static_cast<Eigen::Index>(far));
            changed = true;
        }

        centroids.setZero();
        for (Eigen::Index i = 0; i < n; ++i)
            centroids.row(static_cast<Eigen::Index>(assignment.group_of[static_cast<std::size_t>(i)])) += x.row(i);
        for (std::size_t c = 0; c < groups; ++c)
            centroids.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(sizes[c]);

        double inertia = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto g = static_cast<Eigen::Index>(assignment.group_of[static_cast<std::size_t>(i)]);
            distance[static_cast<std::size_t>(i)] = squared_distance(x, i, centroids, g);
            inertia += distance[static_cast<std::size_t>(i)];
        }
        out.inertia.push_back(inertia);
        out.iterations = iter + 1;
        if (!changed) {
            out.converged = true;
            break;
        }
    }

    assignment.scores.resize(static_cast<std::size_t>(n));
    double farthest = 0.0;
    for (auto& d : distance) {
        d = std::sqrt(d);
        farthest = std::max(farthest, d);
    }
    for (std::size_t i = 0; i < distance.size(); ++i) assignment.scores[i] = farthest - distance[i];
    return out;
}

PrunedSelection importance_only_select(const GroupAssignment& assignment, const SimilarityMatrix& similarity,
                                       std::size_t budget, ImportanceOrder order, double tau) {
    const std::size_t n = assignment.tokens();
    if (budget > n) {
        fail(ErrorKind::parameter, "budget " + std::to_string(budget) + " exceeds token count " + std::to_string(n));
    }

    if (order == ImportanceOrder::ascend) {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        const auto ranked = rank_tokens(all, assignment.scores);
        PrunedSelection out;
        out.quotas = {budget};
        out.survivors_per_group = {n};
        out.selected_per_group = {budget};
        out.retained.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(budget));
        std::sort(out.retained.begin(), out.retained.end());
        std::vector<unsigned char> kept(n, 0);
        for (const std::size_t i : out.retained) kept[i] = 1;
        for (std::size_t i = 0; i < n; ++i)
            if (!kept[i]) out.dropped.push_back({i, DropReason::over_quota});
        return out;
    }

    std::vector<double> reversed(assignment.scores.size());
    std::transform(assignment.scores.begin(), assignment.scores.end(), reversed.begin(),
                   [](double s) { return -s; });
    const auto members = group_members(assignment);
    std::vector<std::vector<std::size_t>> survivors(members.size());
    std::vector<std::size_t> sizes(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
        survivors[k] = intra_group_nms(members[k], reversed, similarity, tau);
        sizes[k] = survivors[k].size();
    }
    return select_tokens(survivors, reversed, allocate_quotas(sizes, budget), n);
}

ScoredInstance score_instance(const TokenMatrix& tokens, std::size_t budget, const CompressConfig& config) {
    if (budget < 1) fail(ErrorKind::parameter, "token budget must be at least 1");
    const std::size_t groups = resolve_group_count(tokens, budget, config);
    const UnitRows rows = similarity_rows(tokens, config.similarity);
    const double rho = global_redundancy(rows);
    return {psca_group(tokens, groups, config.seed, config.svd_iters), pairwise_similarity(rows),
            nms_threshold(rho, budget, config.alpha).tau};
}

PrunedSelection importance_only_select(const TokenMatrix& tokens, std::size_t budget, ImportanceOrder order,
                                       const CompressConfig& config) {
    const ScoredInstance instance = score_instance(tokens, budget, config);
    return importance_only_select(instance.assignment, instance.similarity, budget, order, instance.tau);
}

InformativenessScore informativeness_objective(std::span<const std::size_t> subset, std::span<const double> scores,
                                               const SimilarityMatrix& similarity) {
    std::vector<std::size_t> sorted(subset.begin(), subset.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        fail(ErrorKind::parameter, "subset contains duplicate token indices");
    }
    if (!sorted.empty() && (sorted.back() >= scores.size() || sorted.back() >= similarity.size())) {
        fail(ErrorKind::parameter, "subset index " + std::to_string(sorted.back()) + " out of range");
    }

    InformativenessScore out;
    for (std::size_t a = 0; a < sorted.size(); ++a) {
        out.gain += scores[sorted[a]];
        for (std::size_t b = a + 1; b < sorted.size(); ++b)
            out.penalty += std::max(0.0, similarity(sorted[a], sorted[b]));
    }
    out.objective = out.gain - out.penalty;
    return out;
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 value = 1;
    for (std::size_t i = 0; i < k; ++i) {
        value = value * (n - i) / (i + 1);
        if (value > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(value);
}

BestSubset brute_force_best_subset(std::span<const double> scores, const SimilarityMatrix& similarity,
                                   std::size_t budget) {
    const std::size_t n = scores.size();
    if (similarity.size() != n) fail(ErrorKind::parameter, "scores and similarity sizes differ");
    if (budget > n) {
        fail(ErrorKind::parameter, "budget " + std::to_string(budget) + " exceeds token count " + std::to_string(n));
    }
    if (n > brute_force_max_tokens || binomial(n, budget) > brute_force_max_subsets) {
        fail(ErrorKind::guard, "exhaustive search limited to T <= " + std::to_string(brute_force_max_tokens) +
                                   " and C(T, N) <= " + std::to_string(brute_force_max_subsets) + "; got T=" +
                                   std::to_string(n) + ", N=" + std::to_string(budget));
    }

    std::vector<std::size_t> current(budget);
    std::iota(current.begin(), current.end(), std::size_t{0});
    BestSubset best{current, informativeness_objective(current, scores, similarity)};
    while (budget > 0) {
        // Advance to the next combination in lexicographic order.
        std::size_t pos = budget;
        while (pos > 0 && current[pos - 1] == n - budget + (pos - 1)) --pos;
        if (pos == 0) break;
        ++current[pos - 1];
        for (std::size_t r = pos; r < budget; ++r) current[r] = current[r - 1] + 1;
        const InformativenessScore score = informativeness_objective(current, scores, similarity);
        if (score.objective > best.score.objective) best = {current, score};
    }
    return best;
}

BestSubset brute_force_best_subset(const TokenMatrix& tokens, std::size_t budget, const CompressConfig& config) {
    if (tokens.tokens() > brute_force_max_tokens || binomial(tokens.tokens(), budget) > brute_force_max_subsets) {
        fail(ErrorKind::guard, "exhaustive search limited to T <= " + std::to_string(brute_force_max_tokens) +
                                   " and C(T, N) <= " + std::to_string(brute_force_max_subsets));
    }
    const ScoredInstance instance = score_instance(tokens, budget, config);
    return brute_force_best_subset(instance.assignment.scores, instance.similarity, budget);
}

}  // namespace prunesid
