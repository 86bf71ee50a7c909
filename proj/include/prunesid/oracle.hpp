#pragma once

#include "prunesid/pipeline.hpp"
#include "prunesid/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace prunesid {

/// Objective values of every strategy on one instance, all scored with the
/// same PSCA importances and similarities.
struct TrialOutcome {
    std::uint64_t seed = 0;
    double compress = 0.0;
    double random = 0.0;
    double ascend = 0.0;
    double descend = 0.0;
    double best = 0.0;
    std::vector<std::size_t> compress_subset;
    std::vector<std::size_t> random_subset;
    std::vector<std::size_t> best_subset;
};

struct Tally {
    std::size_t wins = 0;
    std::size_t ties = 0;
    std::size_t losses = 0;

    std::size_t total() const { return wins + ties + losses; }
    double win_rate() const { return total() ? static_cast<double>(wins) / static_cast<double>(total()) : 0.0; }
    double tie_rate() const { return total() ? static_cast<double>(ties) / static_cast<double>(total()) : 0.0; }
    void record(double ours, double theirs);
};

struct OracleReport {
    std::size_t tokens = 0;
    std::size_t dims = 0;
    std::size_t budget = 0;
    std::uint64_t seed = 0;
    std::vector<TrialOutcome> trials;
    Tally vs_random;
    Tally vs_ascend;
    Tally vs_descend;
    std::size_t near_optimal = 0;  // trials with J(compress) >= 0.9 J*

    double near_optimal_rate() const {
        return trials.empty() ? 0.0 : static_cast<double>(near_optimal) / static_cast<double>(trials.size());
    }
};

inline constexpr double near_optimal_fraction = 0.9;

/// Uniform random size-`budget` subset of [0, tokens), ascending.
std::vector<std::size_t> random_subset(std::size_t tokens, std::size_t budget, std::uint64_t seed);

/// One comparison: compress and the ablations run with `seed`, the random
/// baseline draws from a stream derived from it.
TrialOutcome evaluate_trial(const TokenMatrix& tokens, std::size_t budget, std::uint64_t seed,
                            const CompressConfig& config = {});

/// `trials` comparisons on one matrix; trial t uses seed + t. Subject to the
/// brute-force guards.
OracleReport run_oracle(const TokenMatrix& tokens, std::size_t budget, std::size_t trials, std::uint64_t seed,
                        const CompressConfig& config = {});

/// True when J(compress) reaches the near-optimal fraction of J*.
bool near_optimal(const TrialOutcome& outcome);

}  // namespace prunesid
