#include "prunesid/budget.hpp"

#include "prunesid/error.hpp"
#include "prunesid/log.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

namespace prunesid {
namespace {

struct Bounds {
    double lo;
    double hi;
};

double filled(std::span<const double> phis, std::span<const Bounds> bounds, double scale) {
    double sum = 0.0;
    for (std::size_t i = 0; i < phis.size(); ++i) sum += std::clamp(scale * phis[i], bounds[i].lo, bounds[i].hi);
    return sum;
}

// Solve sum_i clamp(c * phi_i, lo_i, hi_i) = target for c. The left side is
// piecewise linear and nondecreasing in c, with kinks at lo_i/phi_i and hi_i/phi_i.
double solve_scale(std::span<const double> phis, std::span<const Bounds> bounds, double target) {
    std::vector<double> kinks;
    for (std::size_t i = 0; i < phis.size(); ++i) {
        if (phis[i] <= 0.0) continue;
        kinks.push_back(bounds[i].lo / phis[i]);
        kinks.push_back(bounds[i].hi / phis[i]);
    }
    std::sort(kinks.begin(), kinks.end());
    const auto first_reaching = std::partition_point(kinks.begin(), kinks.end(), [&](double c) {
        return filled(phis, bounds, c) < target;
    });
    if (first_reaching == kinks.end()) return kinks.empty() ? 0.0 : kinks.back();
    const double right = *first_reaching;
    if (filled(phis, bounds, right) == target) return right;
    const double left = first_reaching == kinks.begin() ? 0.0 : *(first_reaching - 1);

    const double mid = 0.5 * (left + right);
    double fixed = 0.0;
    double free_weight = 0.0;
    for (std::size_t i = 0; i < phis.size(); ++i) {
        const double v = mid * phis[i];
        if (phis[i] > 0.0 && v > bounds[i].lo && v < bounds[i].hi) {
            free_weight += phis[i];
        } else {
            fixed += std::clamp(v, bounds[i].lo, bounds[i].hi);
        }
    }
    return free_weight > 0.0 ? (target - fixed) / free_weight : right;
}

}  // namespace

std::size_t BudgetPlan::total() const {
    std::size_t sum = 0;
    for (const auto& image : per_image) sum += image.n_prime;
    return sum;
}

double BudgetPlan::mean() const {
    return per_image.empty() ? 0.0 : static_cast<double>(total()) / static_cast<double>(per_image.size());
}

BudgetPlan allocate_dynamic_budgets(std::span<const double> phis, std::size_t target_avg, std::size_t n_min,
                                    std::span<const std::size_t> caps, std::span<const std::string> ids) {
    if (phis.empty()) fail(ErrorKind::parameter, "dynamic budgets need at least one image");
    if (n_min < 1 || target_avg < n_min) {
        fail(ErrorKind::parameter, "need target average >= minimum budget >= 1, got " + std::to_string(target_avg) +
                                       " and " + std::to_string(n_min));
    }
    if (!caps.empty() && caps.size() != phis.size()) fail(ErrorKind::parameter, "caps length must match phis");
    if (!ids.empty() && ids.size() != phis.size()) fail(ErrorKind::parameter, "ids length must match phis");
    for (const double phi : phis) {
        if (!std::isfinite(phi) || phi < 0.0) {
            fail(ErrorKind::invalid_input, "information scores must be finite and nonnegative, got " +
                                               std::to_string(phi));
        }
    }

    const std::size_t n = phis.size();
    BudgetPlan plan;
    plan.target_avg = target_avg;
    plan.n_min = n_min;
    plan.caps.assign(n, std::numeric_limits<std::size_t>::max());
    if (!caps.empty()) std::copy(caps.begin(), caps.end(), plan.caps.begin());

    std::vector<Bounds> bounds(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double hi = static_cast<double>(plan.caps[i]);
        bounds[i] = {std::min(static_cast<double>(n_min), hi), hi};
    }

    const double target = static_cast<double>(target_avg) * static_cast<double>(n);
    std::vector<double> share(n);
    if (std::accumulate(phis.begin(), phis.end(), 0.0) <= 0.0) {
        plan.uniform_fallback = true;
        plan.warnings.push_back("all information scores are zero; using the uniform budget");
        log::warn(plan.warnings.back());
        for (std::size_t i = 0; i < n; ++i)
            share[i] = std::clamp(static_cast<double>(target_avg), bounds[i].lo, bounds[i].hi);
    } else {
        const double scale = solve_scale(phis, bounds, target);
        for (std::size_t i = 0; i < n; ++i) {
            double v = std::clamp(scale * phis[i], bounds[i].lo, bounds[i].hi);
            const double nearest = std::round(v);
            if (std::abs(v - nearest) <= 1e-9 * std::max(1.0, nearest)) v = nearest;
            share[i] = v;
        }
    }

    // Floor, then hand the leftover to the largest fractional parts.
    std::vector<std::size_t> counts(n);
    double floored = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        counts[i] = static_cast<std::size_t>(std::floor(share[i]));
        floored += static_cast<double>(counts[i]);
    }
    const double attainable = std::min(target, std::accumulate(bounds.begin(), bounds.end(), 0.0,
                                                               [](double s, const Bounds& b) { return s + b.hi; }));
    auto leftover = static_cast<std::int64_t>(std::llround(attainable - floored));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return share[a] - std::floor(share[a]) > share[b] - std::floor(share[b]);
    });
    for (const std::size_t i : order) {
        if (leftover <= 0) break;
        if (share[i] - std::floor(share[i]) <= 0.0) break;
        ++counts[i];
        --leftover;
    }

    plan.per_image.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        plan.per_image[i].id = ids.empty() ? std::to_string(i) : ids[i];
        plan.per_image[i].phi = phis[i];
        plan.per_image[i].n_prime = counts[i];
    }
    return plan;
}

Histogram information_histogram(std::span<const double> phis, std::size_t bins) {
    if (bins < 1) fail(ErrorKind::parameter, "histogram needs at least one bin");
    Histogram out;
    out.counts.assign(bins, 0);
    if (phis.empty()) return out;
    const auto [lo, hi] = std::minmax_element(phis.begin(), phis.end());
    out.min = *lo;
    out.max = *hi;
    const double width = (out.max - out.min) / static_cast<double>(bins);
    for (const double v : phis) {
        std::size_t bin = 0;
        if (width > 0.0) bin = std::min(bins - 1, static_cast<std::size_t>((v - out.min) / width));
        ++out.counts[bin];
    }
    return out;
}

}  // namespace prunesid
