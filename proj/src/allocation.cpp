#include "aicap/allocation.hpp"

#include <algorithm>
#include <vector>

namespace aicap::allocation {

double allocate_grandfathering(double historical, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma", "gamma must be in open interval (0,1)");
    if (!(historical >= 0.0)) throw ValidationError("historical", "historical must be >= 0");
    return gamma * historical;
}

double allocate_benchmarking(double output, double benchmark, double assistance) {
    if (!(benchmark > 0.0)) throw ValidationError("benchmark", "benchmark must be > 0");
    if (!(assistance > 0.0)) throw ValidationError("assistance", "assistance must be > 0");
    if (!(output >= 0.0)) throw ValidationError("output", "output must be >= 0");
    return output * benchmark * assistance;
}

double allowed_flops(double allowances, double efficiency) {
    if (!(efficiency > 0.0)) throw ValidationError("efficiency", "efficiency must be > 0");
    if (!(allowances >= 0.0)) throw ValidationError("allowances", "allowances must be >= 0");
    return allowances / efficiency;
}

double compute_benchmark(std::span<const Company> companies, BenchmarkRule rule, double configured) {
    if (companies.empty()) throw ValidationError("companies", "benchmark requires at least one company");
    for (const auto& c : companies)
        if (!(c.efficiency > 0.0)) throw ValidationError("efficiency", "efficiency must be > 0");

    switch (rule) {
        case BenchmarkRule::fixed:
            return configured;
        case BenchmarkRule::pct90_of_average: {
            double sum = 0.0;
            for (const auto& c : companies) sum += c.efficiency;
            return 0.9 * (sum / static_cast<double>(companies.size()));
        }
        case BenchmarkRule::top_decile: {
            std::vector<double> e;
            e.reserve(companies.size());
            for (const auto& c : companies) e.push_back(c.efficiency);
            std::sort(e.begin(), e.end());
            // nearest rank: ceil(P/100 * N), 1-based
            const std::size_t rank = std::max<std::size_t>(1, (e.size() * 10 + 99) / 100);
            return e[rank - 1];
        }
    }
    return configured;
}

AllocationResult allocate(const Company& c, double benchmark) {
    const double a = allocate_benchmarking(c.output, benchmark, c.assistance);
    return {c.id, a, allowed_flops(a, c.efficiency)};
}

}  // namespace aicap::allocation
