#include <doctest.h>

#include <random>
#include <vector>

#include "aicap/allocation.hpp"
#include "oracles.hpp"

using namespace aicap;
using namespace aicap::allocation;

namespace {
std::vector<Company> with_efficiencies(const std::vector<double>& e) {
    std::vector<Company> out;
    for (std::size_t i = 0; i < e.size(); ++i) {
        Company c;
        c.id = "c" + std::to_string(i);
        c.efficiency = e[i];
        out.push_back(c);
    }
    return out;
}
}  // namespace

TEST_CASE("grandfathering") {
    CHECK(allocate_grandfathering(1000, 0.9) == doctest::Approx(900));
    CHECK(allocate_grandfathering(0, 0.5) == 0.0);
    CHECK(allocate_grandfathering(100, 0.5) == doctest::Approx(50));
    CHECK_THROWS_AS(allocate_grandfathering(100, 1.0), ValidationError);
    CHECK_THROWS_AS(allocate_grandfathering(100, 0.0), ValidationError);
}

TEST_CASE("benchmarking") {
    CHECK(allocate_benchmarking(100, 0.5, 1) == doctest::Approx(50));
    CHECK(allocate_benchmarking(100, 0.5, 1.2) == doctest::Approx(60));
    CHECK(allocate_benchmarking(0, 0.5, 1) == 0.0);
    CHECK_THROWS_AS(allocate_benchmarking(100, 0.0, 1), ValidationError);
    CHECK_THROWS_AS(allocate_benchmarking(100, 0.5, -1), ValidationError);
}

TEST_CASE("allowed flops") {
    CHECK(allowed_flops(10, 2) == doctest::Approx(5));
    CHECK(allowed_flops(50, 0.5) == doctest::Approx(100));
    CHECK_THROWS_AS(allowed_flops(10, 0), ValidationError);

    // At the benchmark with C = 1 a company is allocated exactly its output.
    for (double output : {0.0, 1.0, 17.5, 1e6})
        for (double b : {0.01, 0.5, 3.0}) CHECK(allowed_flops(allocate_benchmarking(output, b, 1.0), b) == doctest::Approx(output));
}

TEST_CASE("compute_benchmark") {
    CHECK(compute_benchmark(with_efficiencies({1.0, 1.0, 1.0}), BenchmarkRule::pct90_of_average, 7) == doctest::Approx(0.9));
    CHECK(compute_benchmark(with_efficiencies({0.5, 1.0, 1.5}), BenchmarkRule::pct90_of_average, 7) == doctest::Approx(0.9));
    CHECK(compute_benchmark(with_efficiencies({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}), BenchmarkRule::top_decile, 7) ==
          doctest::Approx(0.1));
    CHECK(compute_benchmark(with_efficiencies({0.3, 0.9}), BenchmarkRule::fixed, 0.42) == 0.42);
    CHECK_THROWS_AS(compute_benchmark({}, BenchmarkRule::pct90_of_average, 1.0), ValidationError);

    SUBCASE("top decile matches a counting nearest-rank oracle") {
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> e(0.05, 2.0);
        for (int n = 1; n <= 60; ++n) {
            std::vector<double> eff(static_cast<std::size_t>(n));
            for (auto& v : eff) v = e(rng);
            CHECK(compute_benchmark(with_efficiencies(eff), BenchmarkRule::top_decile, 1.0) ==
                  oracle::nearest_rank(eff, 10.0));
        }
    }
}

TEST_CASE("allocation properties") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> pos(0.01, 100.0), lam(0.0, 10.0);
    for (int i = 0; i < 500; ++i) {
        const double o = pos(rng), b = pos(rng) / 100, c = pos(rng) / 50, h = pos(rng), l = lam(rng);
        const double base = allocate_benchmarking(o, b, c);
        // monotone in each argument
        CHECK(allocate_benchmarking(o * 1.1, b, c) >= base);
        CHECK(allocate_benchmarking(o, b * 1.1, c) >= base);
        CHECK(allocate_benchmarking(o, b, c * 1.1) >= base);
        CHECK(allocate_grandfathering(h * 1.1, 0.7) >= allocate_grandfathering(h, 0.7));
        // scale covariance
        CHECK(allocate_benchmarking(l * o, b, c) == doctest::Approx(l * base));

        // efficient companies have surplus, inefficient ones a deficit
        Company co;
        co.id = "x";
        co.output = o;
        co.assistance = 1.0;
        co.efficiency = b * 0.8;
        CHECK(allocate(co, b).flops_allowed > o);
        co.efficiency = b * 1.25;
        CHECK(allocate(co, b).flops_allowed < o);
    }
}
