#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aicap/core_model.hpp"
#include "aicap/market.hpp"

namespace aicap::sim {

/// Optional per-year overrides for a company. Empty vectors mean the base
/// value holds every year; otherwise one entry per year of the horizon.
struct Schedule {
    std::vector<double> output;
    std::vector<double> efficiency;
};

struct Scenario {
    std::vector<Company> companies;
    std::vector<Schedule> schedules;  // empty, or parallel to companies
    PolicyConfig policy;
    std::uint64_t seed = 0;

    /// Company i with its year-specific output and efficiency applied (years are 1-based).
    Company company_in_year(std::size_t i, int year) const;
};

Scenario validate_scenario(const Scenario& s);

/// Carried between compliance years.
struct SimulationState {
    market::BankLedger bank;
    TradeLedger trades;
    std::vector<double> grandfathering_basis;  // H_i, scaled by gamma each year
    int next_year = 1;
};

SimulationState initial_state(const Scenario& s);

/// One compliance year: benchmark, assistance, allocation, F_i with banked
/// headroom, best responses, trading, banking and penalties, then the report.
/// Throws market::ClearingError when an endogenous market cannot clear.
YearReport run_year(SimulationState& state, const Scenario& scenario, int year);

struct HorizonResult {
    std::vector<YearReport> years;
    TradeLedger trades;
    market::BankLedger bank;
};

HorizonResult run_horizon(const Scenario& scenario);

/// Allowance-unit balance for one year:
///   allocated + banked_in + uncovered = used + banked_out + traded_out.
/// Returns the absolute discrepancy.
double conservation_residual(const YearReport& report);

/// kg CO2 for `usage` FLOPs at efficiency E (allowance units per FLOP).
double compute_emissions(double usage, double efficiency, double kwh_per_allowance_unit, double co2_kg_per_kwh);

enum class Figure { fig1a, fig1b, fig2a, fig2b };

std::string to_string(Figure f);
Figure parse_figure(const std::string& s);

struct SweepRow {
    double axis_value = 0.0;
    double x_base = 0.0;
    double x_ct = 0.0;
    double u_base = 0.0;
    double u_ct = 0.0;
    double b = 0.0;
    bool crossover = false;
};

struct SweepResult {
    Figure figure = Figure::fig1a;
    std::vector<SweepRow> rows;
    std::optional<double> crossover;  // F-hat, vary-F sweeps only
};

enum class Figure1Price { fixed, sqrt_a };
enum class Figure2Variant { vary_flops, vary_cost };

/// Log-spaced grid over [lo, hi]. When `anchor` lies strictly inside the
/// range, the nearest grid point is replaced by it so reference parameter
/// values appear exactly.
std::vector<double> sweep_grid(double lo, double hi, int points, std::optional<double> anchor = std::nullopt);

/// Baseline vs cap-and-trade usage over a grid of cost-per-FLOP values. Throws
/// std::logic_error if any row fails x_ct < x_base.
SweepResult sweep_figure1(const std::vector<double>& a_grid, Figure1Price price, double k, double b = 0.01);

/// Utility comparison over F (cost fixed at `fixed_value`) or over a (F fixed
/// at `fixed_value`). The vary_flops sweep gains an extra row at the crossover
/// when it lies inside the grid.
SweepResult sweep_figure2(const std::vector<double>& grid, Figure2Variant variant, double k, double b,
                          double fixed_value);

struct SweepOptions {
    double grid_min = 1e-3;
    double grid_max = 1e-1;
    int grid_points = 50;
    double k = 1.0;
    double b = 0.01;
};

SweepOptions default_sweep_options(Figure f);
SweepResult sweep(Figure f, const SweepOptions& options);

}  // namespace aicap::sim
