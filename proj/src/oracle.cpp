#include "prunesid/oracle.hpp"

#include "prunesid/baselines.hpp"
#include "prunesid/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace prunesid {
namespace {

constexpr std::uint64_t random_stream = 0x9e3779b97f4a7c15ULL;

}  // namespace

void Tally::record(double ours, double theirs) {
    const double scale = std::max({1.0, std::abs(ours), std::abs(theirs)});
    if (std::abs(ours - theirs) <= 1e-12 * scale) {
        ++ties;
    } else if (ours > theirs) {
        ++wins;
    } else {
        ++losses;
    }
}

std::vector<std::size_t> random_subset(std::size_t tokens, std::size_t budget, std::uint64_t seed) {
    if (budget > tokens) fail(ErrorKind::parameter, "random subset larger than the token count");
    std::vector<std::size_t> pool(tokens);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < budget; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, tokens - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(budget);
    std::sort(pool.begin(), pool.end());
    return pool;
}

bool near_optimal(const TrialOutcome& outcome) {
    return outcome.compress >= outcome.best - (1.0 - near_optimal_fraction) * std::abs(outcome.best);
}

TrialOutcome evaluate_trial(const TokenMatrix& tokens, std::size_t budget, std::uint64_t seed,
                            const CompressConfig& config) {
    if (budget < 1 || budget > tokens.tokens()) {
        fail(ErrorKind::parameter, "oracle budget must lie in [1, T], got " + std::to_string(budget));
    }
    CompressConfig trial_config = config;
    trial_config.seed = seed;

    const ScoredInstance instance = score_instance(tokens, budget, trial_config);
    const auto& scores = instance.assignment.scores;
    const auto objective = [&](const std::vector<std::size_t>& subset) {
        return informativeness_objective(subset, scores, instance.similarity).objective;
    };

    TrialOutcome out;
    out.seed = seed;
    out.compress_subset = compress(tokens, budget, trial_config).selection.retained;
    out.compress = objective(out.compress_subset);
    out.random_subset = random_subset(tokens.tokens(), budget, seed ^ random_stream);
    out.random = objective(out.random_subset);
    out.ascend = objective(importance_only_select(instance.assignment, instance.similarity, budget,
                                                  ImportanceOrder::ascend, instance.tau)
                               .retained);
    out.descend = objective(importance_only_select(instance.assignment, instance.similarity, budget,
                                                   ImportanceOrder::descend, instance.tau)
                                .retained);
    BestSubset best = brute_force_best_subset(scores, instance.similarity, budget);
    out.best = best.score.objective;
    out.best_subset = std::move(best.subset);
    return out;
}

OracleReport run_oracle(const TokenMatrix& tokens, std::size_t budget, std::size_t trials, std::uint64_t seed,
                        const CompressConfig& config) {
    if (trials < 1) fail(ErrorKind::parameter, "oracle needs at least one trial");
    if (tokens.tokens() > brute_force_max_tokens || binomial(tokens.tokens(), budget) > brute_force_max_subsets) {
        fail(ErrorKind::guard, "oracle comparisons enumerate every subset and are limited to T <= " +
                                   std::to_string(brute_force_max_tokens) + " and C(T, N) <= " +
                                   std::to_string(brute_force_max_subsets) + "; got T=" +
                                   std::to_string(tokens.tokens()) + ", N=" + std::to_string(budget));
    }

    OracleReport report;
    report.tokens = tokens.tokens();
    report.dims = tokens.dims();
    report.budget = budget;
    report.seed = seed;
    for (std::size_t t = 0; t < trials; ++t) {
        TrialOutcome outcome = evaluate_trial(tokens, budget, seed + t, config);
        report.vs_random.record(outcome.compress, outcome.random);
        report.vs_ascend.record(outcome.compress, outcome.ascend);
        report.vs_descend.record(outcome.compress, outcome.descend);
        if (near_optimal(outcome)) ++report.near_optimal;
        report.trials.push_back(std::move(outcome));
    }
    return report;
}

}  // namespace prunesid
