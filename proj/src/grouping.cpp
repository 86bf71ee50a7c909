#include "prunesid/grouping.hpp"

#include "prunesid/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace prunesid {
namespace {

// Centred values below this are treated as zero; sigmoid outputs live in
// (0, 1) so an absolute bound is meaningful.
constexpr double degenerate_bound = 1e-12;

}  // namespace

std::size_t default_group_count(std::size_t budget) {
    if (budget < 4) {
        fail(ErrorKind::parameter, "default group count needs a budget of at least 4 (got " +
                                       std::to_string(budget) + "); pass an explicit group count");
    }
    return budget / 4;
}

std::size_t default_group_count(std::size_t budget, const TokenMatrix& context) {
    const std::size_t upper = std::max<std::size_t>(1, std::min(context.tokens() - 1, context.dims()));
    return std::clamp<std::size_t>(default_group_count(budget), 1, upper);
}

GroupAssignment psca_group(const TokenMatrix& tokens, std::size_t groups, std::uint64_t seed, int svd_iters) {
    const std::size_t limit = std::min(tokens.tokens(), tokens.dims());
    if (groups < 1 || groups > limit) {
        fail(ErrorKind::parameter, "group count " + std::to_string(groups) + " outside [1, " +
                                       std::to_string(limit) + "]");
    }

    GroupAssignment out;
    out.groups = groups;
    out.group_of.assign(tokens.tokens(), 0);
    out.scores.assign(tokens.tokens(), 0.0);

    const CenteredMatrix centered = rescale_and_center(tokens);
    if (centered.values.cwiseAbs().maxCoeff() <= degenerate_bound) {
        out.loadings = Matrix::Zero(static_cast<Eigen::Index>(tokens.tokens()), static_cast<Eigen::Index>(groups));
        return out;
    }

    // Rows of X_ctr are tokens, so the right singular vectors of X_ctr^T index tokens.
    SvdFactors factors =
        truncated_svd(centered.values.transpose(), static_cast<Eigen::Index>(groups), svd_iters, seed);
    out.loadings = std::move(factors.V);

    for (Eigen::Index i = 0; i < out.loadings.rows(); ++i) {
        std::size_t best = 0;
        double best_mag = std::abs(out.loadings(i, 0));
        for (Eigen::Index j = 1; j < out.loadings.cols(); ++j) {
            const double mag = std::abs(out.loadings(i, j));
            if (mag > best_mag) {
                best_mag = mag;
                best = static_cast<std::size_t>(j);
            }
        }
        out.group_of[static_cast<std::size_t>(i)] = best;
        out.scores[static_cast<std::size_t>(i)] = best_mag;
    }
    return out;
}

std::vector<std::size_t> group_sizes(const GroupAssignment& assignment) {
    std::vector<std::size_t> sizes(assignment.groups, 0);
    for (const std::size_t g : assignment.group_of) ++sizes.at(g);
    return sizes;
}

std::vector<std::vector<std::size_t>> group_members(const GroupAssignment& assignment) {
    std::vector<std::vector<std::size_t>> members(assignment.groups);
    for (std::size_t i = 0; i < assignment.group_of.size(); ++i) members.at(assignment.group_of[i]).push_back(i);
    return members;
}

}  // namespace prunesid
