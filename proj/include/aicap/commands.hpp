#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "aicap/core_model.hpp"
#include "aicap/simulation.hpp"

namespace aicap::cli {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitIo = 1,
    kExitValidation = 2,
    kExitClearing = 3,
    kExitVerification = 4,
};

struct RunManifest {
    std::string scenario_path;
    std::string command;
    std::string output_dir;
    std::string tool_version = kToolVersion;
    std::string config_hash;
};

/// Fixed 10-significant-digit rendering used in every CSV cell.
std::string format_number(double v);

/// First line of every CSV: "# aicap <version> command=<cmd> config_hash=<hex>".
std::string header_comment(const RunManifest& m);

std::string years_csv(const std::vector<YearReport>& years, const RunManifest& m);
std::string trades_csv(const TradeLedger& ledger, const RunManifest& m);
std::string summary_csv(const std::vector<YearReport>& years, const RunManifest& m);
std::string sweep_csv(const sim::SweepResult& result, const RunManifest& m);

/// Drives run_horizon and writes years.csv, trades.csv, summary.csv and manifest.json.
int cmd_run(const std::filesystem::path& scenario, const std::filesystem::path& out_dir, std::ostream& out,
            std::ostream& err);

/// Writes <figure>.csv for one figure panel.
int cmd_sweep(sim::Figure figure, const sim::SweepOptions& options, const std::filesystem::path& out_dir,
              std::ostream& out, std::ostream& err);

using CapTradeSolver = std::function<EquilibriumSolution(double k, double a, double b, double flops)>;
using BaselineSolver = std::function<EquilibriumSolution(double k, double a)>;

struct VerifyOptions {
    long long sample_size = 1000;
    std::uint64_t seed = 42;
    int gradient_points = 100;
    double oracle_tolerance = 1e-5;  // relative x* discrepancy
    double kkt_tolerance = 1e-9;     // absolute
    double gradient_tolerance = 1e-4;
    // Solvers under test; replaceable so a corrupted solver can be injected.
    CapTradeSolver cap_and_trade;
    BaselineSolver no_governance;
};

struct VerifyReport {
    bool passed = true;
    long long draws = 0;
    double worst_oracle_rel_baseline = 0.0;
    double worst_oracle_rel_cap_trade = 0.0;
    double worst_kkt = 0.0;
    double worst_gradient_rel = 0.0;
    int fewer_flops_violations = 0;
    std::string failure;  // first failing parameter tuple
};

/// Random parameter draws: k in [0.25, 4], a and b log-uniform in [1e-4, 1],
/// F uniform in [0, 20]. Checks oracle equivalence, KKT residuals, strictly
/// lower cap-and-trade usage, and the analytic gradient against central
/// differences.
VerifyReport verify_equilibria(const VerifyOptions& options);

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);

/// Machine-readable error line written to standard error.
std::string error_line(int code, const std::string& kind, const std::string& field, const std::string& message);

}  // namespace aicap::cli
