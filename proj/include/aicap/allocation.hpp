#pragma once

#include <span>
#include <string>

#include "aicap/core_model.hpp"

namespace aicap::allocation {

struct AllocationResult {
    std::string company;
    double allowances = 0.0;     // A_i
    double flops_allowed = 0.0;  // F_i = A_i / E_i
};

/// A_i = gamma * H_i.
double allocate_grandfathering(double historical, double gamma);

/// A_i = O_i * B * C_i.
double allocate_benchmarking(double output, double benchmark, double assistance);

/// F_i = A_i / E_i.
double allowed_flops(double allowances, double efficiency);

/// Benchmark B from the companies' efficiencies. `configured` is returned
/// unchanged for BenchmarkRule::fixed. top_decile takes the nearest-rank 10th
/// percentile of ascending E_i (lower is more efficient).
double compute_benchmark(std::span<const Company> companies, BenchmarkRule rule, double configured);

/// Benchmarking allocation for one company, with its F_i.
AllocationResult allocate(const Company& c, double benchmark);

}  // namespace aicap::allocation
