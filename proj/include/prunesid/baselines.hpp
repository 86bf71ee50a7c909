#pragma once

#include "prunesid/grouping.hpp"
#include "prunesid/nms.hpp"
#include "prunesid/pipeline.hpp"
#include "prunesid/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace prunesid {

/// Seeded shuffle cut into K contiguous chunks whose sizes differ by at most
/// one. Scores are token l2 norms.
GroupAssignment random_grouping(const TokenMatrix& tokens, std::size_t groups, std::uint64_t seed);

struct KMeansResult {
    GroupAssignment assignment;
    std::vector<double> inertia;  // within-cluster sum of squares after each Lloyd step
    std::size_t iterations = 0;
    bool converged = false;
};

/// Lloyd's algorithm with k-means++ seeding on raw features. Scores are
/// (largest own-centroid distance) - (own-centroid distance), so the token
/// nearest its centroid scores highest.
KMeansResult kmeans_grouping(const TokenMatrix& tokens, std::size_t groups, std::uint64_t seed,
                             std::size_t max_iters = 100);

/// PSCA scores, similarities and NMS threshold for one image, computed the
/// same way compress() computes them.
struct ScoredInstance {
    GroupAssignment assignment;
    SimilarityMatrix similarity;
    double tau;
};

ScoredInstance score_instance(const TokenMatrix& tokens, std::size_t budget, const CompressConfig& config = {});

/// Importance-only ablations.
///   ascend:  the N highest-scoring tokens, no redundancy removal.
///   descend: the full NMS pipeline driven by reversed importance, so the
///            least important tokens are visited and kept first.
enum class ImportanceOrder { ascend, descend };

PrunedSelection importance_only_select(const GroupAssignment& assignment, const SimilarityMatrix& similarity,
                                       std::size_t budget, ImportanceOrder order, double tau);

/// Convenience form: PSCA scores and thresholds exactly as compress() would
/// compute them.
PrunedSelection importance_only_select(const TokenMatrix& tokens, std::size_t budget, ImportanceOrder order,
                                       const CompressConfig& config = {});

/// gain = sum of scores, penalty = sum over unordered pairs of max(0, sim),
/// objective = gain - penalty.
struct InformativenessScore {
    double gain = 0.0;
    double penalty = 0.0;
    double objective = 0.0;
};

/// Throws on duplicate or out-of-range indices. Evaluated in ascending index
/// order so equal subsets give bit-identical results.
InformativenessScore informativeness_objective(std::span<const std::size_t> subset, std::span<const double> scores,
                                               const SimilarityMatrix& similarity);

struct BestSubset {
    std::vector<std::size_t> subset;
    InformativenessScore score;
};

inline constexpr std::size_t brute_force_max_tokens = 16;
inline constexpr std::uint64_t brute_force_max_subsets = 20000;

/// Exhaustive search over all size-N subsets; the lexicographically first
/// maximiser wins. Guarded to T <= 16 and C(T, N) <= 20000.
BestSubset brute_force_best_subset(std::span<const double> scores, const SimilarityMatrix& similarity,
                                   std::size_t budget);

/// Uses the same PSCA scores and raw similarities as compress().
BestSubset brute_force_best_subset(const TokenMatrix& tokens, std::size_t budget, const CompressConfig& config = {});

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::size_t n, std::size_t k);

}  // namespace prunesid
