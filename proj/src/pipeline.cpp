#include "prunesid/pipeline.hpp"

#include "prunesid/error.hpp"
#include "prunesid/log.hpp"

#include <chrono>
#include <numeric>

namespace prunesid {
namespace {

using Clock = std::chrono::steady_clock;

std::int64_t micros_since(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start).count();
}

void note(std::vector<std::string>* warnings, const std::string& message) {
    log::warn(message);
    if (warnings) warnings->push_back(message);
}

}  // namespace

std::string_view to_string(SimilaritySource source) {
    return source == SimilaritySource::raw ? "raw" : "rescaled";
}

SimilaritySource parse_similarity_source(std::string_view text) {
    if (text == "raw") return SimilaritySource::raw;
    if (text == "rescaled") return SimilaritySource::rescaled;
    fail(ErrorKind::parameter, "similarity source must be raw or rescaled, got '" + std::string(text) + "'");
}

UnitRows similarity_rows(const TokenMatrix& tokens, SimilaritySource source) {
    return source == SimilaritySource::raw ? UnitRows(tokens) : UnitRows(sigmoid_rescale(tokens));
}

std::size_t resolve_group_count(const TokenMatrix& tokens, std::size_t budget, const CompressConfig& config,
                                std::vector<std::string>* warnings) {
    if (config.groups && *config.groups < 1) fail(ErrorKind::parameter, "group count must be at least 1");
    if (config.strict) {
        const std::size_t requested = config.groups ? *config.groups : default_group_count(budget);
        const std::size_t limit = std::min(tokens.tokens(), tokens.dims());
        if (requested > limit) {
            fail(ErrorKind::parameter, "group count " + std::to_string(requested) + " exceeds min(T, D) = " +
                                           std::to_string(limit));
        }
        return requested;
    }

    std::size_t requested = 1;
    if (config.groups) {
        requested = *config.groups;
    } else if (budget >= 4) {
        requested = default_group_count(budget);
    } else {
        note(warnings, "budget " + std::to_string(budget) + " is below 4; using a single group");
    }
    const std::size_t upper = std::max<std::size_t>(1, std::min(tokens.tokens() - 1, tokens.dims()));
    if (requested <= upper) return requested;
    note(warnings, "group count " + std::to_string(requested) + " clamped to " + std::to_string(upper));
    return upper;
}

CompressionResult compress(const TokenMatrix& tokens, std::size_t budget, const CompressConfig& config) {
    if (budget < 1) fail(ErrorKind::parameter, "token budget must be at least 1");
    const auto start = Clock::now();

    CompressionResult out;
    out.tokens = tokens.tokens();
    out.dims = tokens.dims();
    out.budget = budget;
    out.config = config;
    out.stats.alpha = config.alpha;

    auto stage = Clock::now();
    const UnitRows rows = similarity_rows(tokens, config.similarity);
    out.stats.rho = global_redundancy(rows);
    out.stats.phi = 1.0 - out.stats.rho;
    const Threshold threshold = nms_threshold(out.stats.rho, budget, config.alpha);
    out.stats.tau = threshold.tau;
    out.stats.lambda = threshold.lambda;
    out.timings.similarity_us = micros_since(stage);

    if (budget >= tokens.tokens()) {
        out.identity = true;
        note(&out.warnings, "budget " + std::to_string(budget) + " >= token count " +
                                std::to_string(tokens.tokens()) + "; keeping every token");
        out.selection.retained.resize(tokens.tokens());
        std::iota(out.selection.retained.begin(), out.selection.retained.end(), std::size_t{0});
        out.timings.total_us = micros_since(start);
        return out;
    }

    const std::size_t group_count = resolve_group_count(tokens, budget, config, &out.warnings);
    stage = Clock::now();
    out.groups = psca_group(tokens, group_count, config.seed, config.svd_iters);
    out.timings.grouping_us = micros_since(stage);

    stage = Clock::now();
    const auto members = group_members(out.groups);
    std::vector<std::vector<std::size_t>> survivors(members.size());
    std::vector<std::size_t> survivor_sizes(members.size());
    const auto similarity = [&rows](std::size_t i, std::size_t j) { return rows.similarity(i, j); };
    for (std::size_t k = 0; k < members.size(); ++k) {
        survivors[k] = intra_group_nms(members[k], out.groups.scores, similarity, out.stats.tau);
        survivor_sizes[k] = survivors[k].size();
    }
    out.timings.nms_us = micros_since(stage);

    stage = Clock::now();
    const auto quotas = allocate_quotas(survivor_sizes, budget);
    out.selection = select_tokens(survivors, out.groups.scores, quotas, tokens.tokens());
    out.timings.selection_us = micros_since(stage);
    out.timings.total_us = micros_since(start);
    return out;
}

}  // namespace prunesid
