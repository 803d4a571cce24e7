#include "aicap/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>

namespace aicap {

namespace {

void require(bool ok, const char* field, const char* message) {
    if (!ok) throw ValidationError(field, message);
}

bool finite(double v) { return std::isfinite(v); }

template <typename Enum>
Enum lookup(const std::map<std::string, Enum>& table, const std::string& s, const char* field) {
    auto it = table.find(s);
    if (it == table.end()) throw ValidationError(field, std::string(field) + ": unknown value '" + s + "'");
    return it->second;
}

const std::map<std::string, AllocationRule> kAllocationRules = {
    {"grandfathering", AllocationRule::grandfathering},
    {"benchmarking", AllocationRule::benchmarking},
};
const std::map<std::string, BenchmarkRule> kBenchmarkRules = {
    {"fixed", BenchmarkRule::fixed},
    {"pct90_of_average", BenchmarkRule::pct90_of_average},
    {"top_decile", BenchmarkRule::top_decile},
};
const std::map<std::string, PriceMode> kPriceModes = {
    {"exogenous", PriceMode::exogenous},
    {"scaled_sqrt_a", PriceMode::scaled_sqrt_a},
    {"endogenous_clearing", PriceMode::endogenous_clearing},
};
const std::map<std::string, GovernanceMode> kModes = {
    {"no_governance", GovernanceMode::no_governance},
    {"cap_and_trade", GovernanceMode::cap_and_trade},
    {"pigouvian", GovernanceMode::pigouvian},
    {"credit_program", GovernanceMode::credit_program},
};

template <typename Enum>
std::string name_of(const std::map<std::string, Enum>& table, Enum v) {
    for (const auto& [name, value] : table)
        if (value == v) return name;
    return "unknown";
}

}  // namespace

Company validate_company(const Company& c) {
    require(!c.id.empty(), "id", "id must be non-empty");
    require(finite(c.output) && c.output >= 0.0, "output", "output must be >= 0");
    require(finite(c.efficiency) && c.efficiency > 0.0, "efficiency", "efficiency must be > 0");
    require(finite(c.assistance) && c.assistance > 0.0, "assistance", "assistance must be > 0");
    require(finite(c.historical) && c.historical >= 0.0, "historical", "historical must be >= 0");
    require(finite(c.loss_exponent) && c.loss_exponent > 0.0, "loss_exponent", "loss_exponent must be > 0");
    require(finite(c.cost_per_flop) && c.cost_per_flop > 0.0, "cost_per_flop", "cost_per_flop must be > 0");
    return c;
}

void validate_account(const AllowanceAccount& account) {
    require(account.allocated >= 0.0, "allocated", "allocated must be >= 0");
    require(account.banked >= 0.0, "banked", "banked must be >= 0");
    require(account.available() >= -kDefaultTolerance, "available", "available allowances must be >= 0 at year close");
}

std::string to_string(AllocationRule r) { return name_of(kAllocationRules, r); }
std::string to_string(BenchmarkRule r) { return name_of(kBenchmarkRules, r); }
std::string to_string(PriceMode m) { return name_of(kPriceModes, m); }
std::string to_string(GovernanceMode m) { return name_of(kModes, m); }

AllocationRule parse_allocation_rule(const std::string& s) { return lookup(kAllocationRules, s, "allocation_rule"); }
BenchmarkRule parse_benchmark_rule(const std::string& s) { return lookup(kBenchmarkRules, s, "benchmark_rule"); }
PriceMode parse_price_mode(const std::string& s) { return lookup(kPriceModes, s, "price_mode"); }
GovernanceMode parse_governance_mode(const std::string& s) { return lookup(kModes, s, "mode"); }

std::optional<double> PolicyConfig::price_ceiling() const {
    switch (price_mode) {
        case PriceMode::exogenous: return price;
        case PriceMode::endogenous_clearing: return bracket_hi;
        case PriceMode::scaled_sqrt_a: return std::nullopt;
    }
    return std::nullopt;
}

PolicyConfig validate_policy(const PolicyConfig& p) {
    require(finite(p.gamma) && p.gamma > 0.0 && p.gamma < 1.0, "gamma", "gamma must be in open interval (0,1)");
    require(finite(p.benchmark) && p.benchmark > 0.0, "benchmark", "benchmark must be > 0");
    require(p.horizon >= 1, "horizon", "horizon must be >= 1");
    if (p.price_mode == PriceMode::exogenous)
        require(finite(p.price) && p.price > 0.0, "price", "price must be > 0");
    require(finite(p.penalty_rate) && p.penalty_rate > 0.0, "penalty_rate", "penalty_rate must be > 0");
    if (auto ceiling = p.price_ceiling())
        require(p.penalty_rate > *ceiling, "penalty_rate", "penalty must exceed price");
    require(finite(p.tax_rate) && p.tax_rate >= 0.0, "tax_rate", "tax_rate must be >= 0");
    if (p.mode == GovernanceMode::credit_program) {
        require(finite(p.credit_baseline) && p.credit_baseline > 0.0, "credit_baseline", "credit_baseline must be > 0");
        require(finite(p.credit_price) && p.credit_price > 0.0, "credit_price", "credit_price must be > 0");
    }
    require(finite(p.bracket_lo) && p.bracket_lo > 0.0, "clearing_bracket", "clearing bracket lower bound must be > 0");
    require(finite(p.bracket_hi) && p.bracket_hi > p.bracket_lo, "clearing_bracket", "clearing bracket must satisfy lo < hi");
    require(finite(p.tolerance) && p.tolerance > 0.0, "tolerance", "tolerance must be > 0");
    require(finite(p.kwh_per_allowance_unit) && p.kwh_per_allowance_unit >= 0.0, "kwh_per_allowance_unit",
            "kwh_per_allowance_unit must be >= 0");
    require(finite(p.co2_kg_per_kwh) && p.co2_kg_per_kwh >= 0.0, "co2_kg_per_kwh", "co2_kg_per_kwh must be >= 0");
    return p;
}

void TradeLedger::record(TradeEntry entry) {
    if (!(entry.quantity > 0.0)) throw ValidationError("quantity", "trade quantity must be > 0");
    if (entry.seller == entry.buyer) throw ValidationError("buyer", "a company cannot trade with itself");
    entries_.push_back(std::move(entry));
}

std::vector<TradeEntry> TradeLedger::for_year(int year) const {
    std::vector<TradeEntry> out;
    std::copy_if(entries_.begin(), entries_.end(), std::back_inserter(out),
                 [year](const TradeEntry& e) { return e.year == year; });
    return out;
}

double TradeLedger::total_sold(int year) const {
    double s = 0.0;
    for (const auto& e : entries_)
        if (e.year == year) s += e.quantity;
    return s;
}

double TradeLedger::total_bought(int year) const {
    // Every entry moves the same allowance quantity out of the seller and into the buyer.
    return total_sold(year);
}

double TradeLedger::signed_sum(int year) const {
    std::map<std::string, double> position;
    for (const auto& e : entries_) {
        if (e.year != year) continue;
        position[e.seller] += e.quantity;
        position[e.buyer] -= e.quantity;
    }
    double s = 0.0;
    for (const auto& [id, q] : position) s += q;
    return s;
}

namespace {
template <typename F>
double sum_rows(const std::vector<CompanyYear>& rows, F f) {
    double s = 0.0;
    for (const auto& r : rows) s += f(r);
    return s;
}
}  // namespace

double YearReport::total_flops() const { return sum_rows(rows, [](const CompanyYear& r) { return r.x_star; }); }
double YearReport::total_allocated() const { return sum_rows(rows, [](const CompanyYear& r) { return r.allocated; }); }
double YearReport::total_banked_in() const { return sum_rows(rows, [](const CompanyYear& r) { return r.banked_in; }); }
double YearReport::total_banked_out() const { return sum_rows(rows, [](const CompanyYear& r) { return r.banked_out; }); }
double YearReport::total_used_allowances() const { return sum_rows(rows, [](const CompanyYear& r) { return r.energy; }); }
double YearReport::total_penalty() const { return sum_rows(rows, [](const CompanyYear& r) { return r.penalty; }); }
double YearReport::total_utility() const { return sum_rows(rows, [](const CompanyYear& r) { return r.utility; }); }
double YearReport::total_co2_kg() const { return sum_rows(rows, [](const CompanyYear& r) { return r.co2_kg; }); }

int YearReport::violation_count() const {
    return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const CompanyYear& r) { return r.violation > 0.0; }));
}

}  // namespace aicap
