#pragma once

#include "prunesid/grouping.hpp"
#include "prunesid/nms.hpp"
#include "prunesid/tensor.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prunesid {

/// Which embeddings the redundancy score and NMS similarities are computed on.
enum class SimilaritySource { raw, rescaled };

std::string_view to_string(SimilaritySource source);
SimilaritySource parse_similarity_source(std::string_view text);

struct CompressConfig {
    std::optional<std::size_t> groups;  // default: floor(N / 4), clamped
    double alpha = default_alpha;
    std::uint64_t seed = 0;
    SimilaritySource similarity = SimilaritySource::raw;
    int svd_iters = default_power_iterations;
    // Strict mode rejects out-of-range group counts instead of clamping.
    bool strict = false;
};

struct StageTimings {
    std::int64_t grouping_us = 0;
    std::int64_t similarity_us = 0;
    std::int64_t nms_us = 0;
    std::int64_t selection_us = 0;
    std::int64_t total_us = 0;
};

struct CompressionResult {
    std::size_t tokens = 0;
    std::size_t dims = 0;
    std::size_t budget = 0;
    bool identity = false;
    GroupAssignment groups;
    RedundancyStats stats;
    PrunedSelection selection;
    CompressConfig config;
    StageTimings timings;
    std::vector<std::string> warnings;
};

/// Full two-stage compression of one image to `budget` tokens.
CompressionResult compress(const TokenMatrix& tokens, std::size_t budget, const CompressConfig& config = {});

/// Similarity rows for the configured source.
UnitRows similarity_rows(const TokenMatrix& tokens, SimilaritySource source);

/// Group count compress() would use, with any clamping warning appended.
std::size_t resolve_group_count(const TokenMatrix& tokens, std::size_t budget, const CompressConfig& config,
                                std::vector<std::string>* warnings = nullptr);

}  // namespace prunesid
