#include "prunesid/budget.hpp"
#include "prunesid/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace prunesid;

namespace {

std::vector<std::size_t> budgets(const BudgetPlan& plan) {
    std::vector<std::size_t> out;
    for (const auto& image : plan.per_image) out.push_back(image.n_prime);
    return out;
}

}  // namespace

TEST_CASE("information score") {
    CHECK(information_score(1.0) == 0.0);
    CHECK(information_score(0.0) == 1.0);
    CHECK(information_score(0.3) == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("proportional budgets") {
    SUBCASE("two images") {
        const std::vector<double> phis{0.25, 0.75};
        const BudgetPlan plan = allocate_dynamic_budgets(phis, 64, 16);
        CHECK(budgets(plan) == std::vector<std::size_t>{32, 96});
        CHECK(plan.total() == 128);
        CHECK_FALSE(plan.uniform_fallback);
    }
    SUBCASE("equal scores give the average") {
        const std::vector<double> phis(7, 0.42);
        CHECK(budgets(allocate_dynamic_budgets(phis, 50, 16)) == std::vector<std::size_t>(7, 50));
    }
    SUBCASE("floor engages and the rest is redistributed") {
        const std::vector<double> phis{0.9, 0.1};
        CHECK(budgets(allocate_dynamic_budgets(phis, 64, 16)) == std::vector<std::size_t>{112, 16});
    }
    SUBCASE("caps engage") {
        const std::vector<double> phis{0.9, 0.5, 0.1};
        const std::vector<std::size_t> caps{70, 500, 500};
        const BudgetPlan plan = allocate_dynamic_budgets(phis, 64, 16, caps);
        CHECK(plan.per_image[0].n_prime == 70);
        CHECK(plan.total() == 192);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(plan.per_image[i].n_prime >= 16);
            CHECK(plan.per_image[i].n_prime <= caps[i]);
        }
    }
    SUBCASE("cap below the floor wins") {
        const std::vector<double> phis{0.1, 0.9};
        const std::vector<std::size_t> caps{4, 1000};
        const BudgetPlan plan = allocate_dynamic_budgets(phis, 32, 16, caps);
        CHECK(plan.per_image[0].n_prime == 4);
        CHECK(plan.total() == 64);
    }
    SUBCASE("ids are carried through") {
        const std::vector<double> phis{0.5, 0.5};
        const std::vector<std::string> ids{"a", "b"};
        const BudgetPlan plan = allocate_dynamic_budgets(phis, 20, 16, {}, ids);
        CHECK(plan.per_image[1].id == "b");
        CHECK(allocate_dynamic_budgets(phis, 20, 16).per_image[1].id == "1");
    }
}

TEST_CASE("all-zero scores fall back to the uniform budget") {
    const std::vector<double> phis{0.0, 0.0, 0.0};
    const BudgetPlan plan = allocate_dynamic_budgets(phis, 40, 16);
    CHECK(plan.uniform_fallback);
    CHECK_FALSE(plan.warnings.empty());
    CHECK(budgets(plan) == std::vector<std::size_t>(3, 40));
}

TEST_CASE("budget parameter errors") {
    const std::vector<double> phis{0.5, 0.2};
    CHECK_THROWS_AS(allocate_dynamic_budgets(std::vector<double>{}, 64, 16), Error);
    CHECK_THROWS_AS(allocate_dynamic_budgets(phis, 8, 16), Error);
    CHECK_THROWS_AS(allocate_dynamic_budgets(phis, 64, 0), Error);
    CHECK_THROWS_AS(allocate_dynamic_budgets(std::vector<double>{0.5, -0.1}, 64, 16), Error);
    CHECK_THROWS_AS(allocate_dynamic_budgets(phis, 64, 16, std::vector<std::size_t>{10}), Error);
}

TEST_CASE("random score vectors") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> phis(1 + rng() % 40);
        for (auto& p : phis) p = uniform(rng);
        const std::size_t avg = 16 + rng() % 200;
        const BudgetPlan plan = allocate_dynamic_budgets(phis, avg, 16);
        CHECK(plan.total() == avg * phis.size());
        for (std::size_t i = 0; i < phis.size(); ++i) {
            CHECK(plan.per_image[i].n_prime >= 16);
            for (std::size_t j = 0; j < phis.size(); ++j) {
                if (phis[i] < phis[j]) CHECK(plan.per_image[i].n_prime <= plan.per_image[j].n_prime);
            }
        }
        // Scaling every score leaves the plan unchanged.
        std::vector<double> scaled = phis;
        for (auto& p : scaled) p *= 0.25;
        CHECK(budgets(allocate_dynamic_budgets(scaled, avg, 16)) == budgets(plan));
    }
}

TEST_CASE("histogram") {
    CHECK(information_histogram(std::vector<double>{0.1, 0.1, 0.9}, 2).counts == std::vector<std::size_t>{2, 1});
    const Histogram flat = information_histogram(std::vector<double>(5, 0.3), 4);
    CHECK(flat.counts == std::vector<std::size_t>{5, 0, 0, 0});

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<double> samples(1000);
    for (auto& s : samples) s = uniform(rng);
    const Histogram h = information_histogram(samples, 10);
    std::size_t total = 0;
    for (const std::size_t c : h.counts) {
        CHECK(c >= 60);
        CHECK(c <= 140);
        total += c;
    }
    CHECK(total == 1000);
    CHECK_THROWS_AS(information_histogram(samples, 0), Error);
}
