#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace aicap {

/// Default absolute tolerance for utility and allowance comparisons.
inline constexpr double kDefaultTolerance = 1e-9;

/// Raised when an input violates a field constraint. `field()` names the offending field.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& message)
        : std::invalid_argument(message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// One market participant. FLOP quantities are normalized, dimensionless units.
struct Company {
    std::string id;
    double output = 0.0;          // O_i, FLOPs per year
    double efficiency = 1.0;      // E_i, allowance units per FLOP
    double assistance = 1.0;      // C_i
    double historical = 0.0;      // H_i, baseline-period FLOPs per year
    double loss_exponent = 1.0;   // k
    double cost_per_flop = 0.01;  // a
};

Company validate_company(const Company& c);

struct AllowanceAccount {
    double allocated = 0.0;
    double banked = 0.0;
    double traded_net = 0.0;  // positive = sold

    double available() const noexcept { return allocated + banked - traded_net; }
};

void validate_account(const AllowanceAccount& account);

enum class AllocationRule { grandfathering, benchmarking };
enum class BenchmarkRule { fixed, pct90_of_average, top_decile };
enum class PriceMode { exogenous, scaled_sqrt_a, endogenous_clearing };
enum class GovernanceMode { no_governance, cap_and_trade, pigouvian, credit_program };

std::string to_string(AllocationRule r);
std::string to_string(BenchmarkRule r);
std::string to_string(PriceMode m);
std::string to_string(GovernanceMode m);

AllocationRule parse_allocation_rule(const std::string& s);
BenchmarkRule parse_benchmark_rule(const std::string& s);
PriceMode parse_price_mode(const std::string& s);
GovernanceMode parse_governance_mode(const std::string& s);

/// Governance parameters. Prices are quoted per allowance unit; a firm with
/// efficiency E_i faces a per-FLOP price of price * E_i.
struct PolicyConfig {
    GovernanceMode mode = GovernanceMode::cap_and_trade;
    AllocationRule allocation_rule = AllocationRule::benchmarking;
    double gamma = 0.9;
    double benchmark = 1.0;
    BenchmarkRule benchmark_rule = BenchmarkRule::fixed;
    PriceMode price_mode = PriceMode::exogenous;
    double price = 0.01;         // b, exogenous mode
    double penalty_rate = 0.1;   // p, per FLOP of violation
    int horizon = 1;

    double tax_rate = 0.0;          // pigouvian t
    double credit_baseline = 0.0;   // credit_program baseline, FLOPs per company
    double credit_price = 0.01;

    // Endogenous clearing searches [lo, hi]; lo doubles as the price floor.
    double bracket_lo = 1e-6;
    double bracket_hi = 1.0;
    bool banking = true;
    double tolerance = kDefaultTolerance;

    double kwh_per_allowance_unit = 1.0 / 3.6e6;
    double co2_kg_per_kwh = 0.81 * 0.45359237;

    /// Highest allowance price a firm can face under this policy when it is
    /// independent of firm parameters (exogenous: price, endogenous: bracket_hi).
    std::optional<double> price_ceiling() const;
};

PolicyConfig validate_policy(const PolicyConfig& p);

struct EquilibriumSolution {
    enum class Method { closed_form, grid_oracle };

    double x_star = 0.0;
    double y_star = 0.0;
    double utility = 0.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    Method method = Method::closed_form;
};

struct TradeEntry {
    int year = 0;
    std::string seller;
    std::string buyer;
    double quantity = 0.0;      // allowance units
    double seller_flops = 0.0;  // quantity / E_seller
    double buyer_flops = 0.0;   // quantity / E_buyer
    double price = 0.0;         // per allowance unit
};

/// Append-only record of allowance transfers.
class TradeLedger {
public:
    void record(TradeEntry entry);

    const std::vector<TradeEntry>& entries() const noexcept { return entries_; }
    std::vector<TradeEntry> for_year(int year) const;

    double total_sold(int year) const;
    double total_bought(int year) const;
    /// Sum of signed per-company positions for the year (sellers +, buyers -).
    double signed_sum(int year) const;

private:
    std::vector<TradeEntry> entries_;
};

struct CompanyYear {
    std::string company;
    double efficiency = 1.0;
    double allocated = 0.0;
    double banked_in = 0.0;
    double flops_allowed = 0.0;  // F_i = A_i / E_i
    double x_star = 0.0;
    double y_star = 0.0;         // executed, FLOPs (positive = sold)
    double banked_out = 0.0;
    double penalty = 0.0;
    double utility = 0.0;
    double energy = 0.0;         // allowance units, x * E_i
    double co2_kg = 0.0;
    double price = 0.0;          // allowance price this firm traded at
    double violation = 0.0;      // FLOPs used without cover
    double credits = 0.0;        // credit_program: minted (+) or purchased (-)
};

struct YearReport {
    int year = 0;
    double benchmark = 0.0;
    std::vector<CompanyYear> rows;
    std::optional<double> clearing_price;
    double unmatched_net = 0.0;  // allowance units exported (+) or imported (-)
    double credits_minted = 0.0;

    double total_flops() const;
    double total_allocated() const;
    double total_banked_in() const;
    double total_banked_out() const;
    double total_used_allowances() const;
    double total_penalty() const;
    double total_utility() const;
    double total_co2_kg() const;
    int violation_count() const;
};

}  // namespace aicap
