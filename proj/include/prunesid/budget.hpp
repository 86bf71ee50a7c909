#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace prunesid {

inline constexpr std::size_t default_min_budget = 16;

/// phi = 1 - rho; higher means a more diverse image.
inline double information_score(double rho) { return 1.0 - rho; }

struct ImageBudget {
    std::string id;
    double phi = 0.0;
    std::size_t n_prime = 0;
};

struct BudgetPlan {
    std::vector<ImageBudget> per_image;
    std::size_t target_avg = 0;
    std::size_t n_min = 0;
    std::vector<std::size_t> caps;
    bool uniform_fallback = false;
    std::vector<std::string> warnings;

    std::size_t total() const;
    double mean() const;
};

/// Budgets proportional to phi, scaled so the dataset mean is `target_avg`,
/// each within [min(n_min, cap_i), cap_i]. An empty `caps` means uncapped.
/// Ids default to the image position when `ids` is empty.
BudgetPlan allocate_dynamic_budgets(std::span<const double> phis, std::size_t target_avg, std::size_t n_min,
                                    std::span<const std::size_t> caps = {}, std::span<const std::string> ids = {});

struct Histogram {
    double min = 0.0;
    double max = 0.0;
    std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max]; the maximum lands in the last bin.
Histogram information_histogram(std::span<const double> phis, std::size_t bins);

}  // namespace prunesid
