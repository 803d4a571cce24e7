#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aicap/core_model.hpp"

namespace aicap::market {

/// A price-taking firm as seen by the allowance market. The firm's per-FLOP
/// price is the allowance price times its efficiency.
struct Agent {
    std::string id;
    double loss_exponent = 1.0;
    double cost_per_flop = 0.01;
    double flops_allowed = 0.0;  // F_i, including banked headroom
    double efficiency = 1.0;
};

/// Usage the agent chooses at the given allowance price.
double demand(const Agent& agent, double price);

/// Aggregate allowances offered minus allowances wanted at `price`:
///   sum_i E_i * (F_i - x_i*(price * E_i)).
/// With E_i = 1 this is the sum of the agents' cap-and-trade trades y_i*.
double net_supply(double price, std::span<const Agent> agents);

class ClearingError : public std::runtime_error {
public:
    enum class Kind { excess_supply, excess_demand };

    ClearingError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Bisection for the uniform price with zero net supply in [lo, hi]. Stops
/// once |net_supply| < tol or the bracket is narrower than tol^2. Interior
/// results always have net supply in [0, tol).
double clear_price(std::span<const Agent> agents, double lo, double hi, double tol = kDefaultTolerance,
                   int max_iterations = 200);

/// A desired trade in FLOPs (positive sells), converted at the firm's own E_i.
struct Order {
    std::string id;
    double flops = 0.0;
    double efficiency = 1.0;
};

struct Fill {
    std::string id;
    double desired = 0.0;  // allowance units, signed
    double matched = 0.0;  // allowance units, signed
};

struct MarketOutcome {
    double price = 0.0;
    std::vector<Fill> fills;  // same order as the input orders
    TradeLedger ledger;
    double unmatched_net = 0.0;  // allowance units; positive = unsold supply
};

/// Greedy matching of sellers to buyers, both taken in descending quantity
/// with ties broken by id.
MarketOutcome execute_trades(std::span<const Order> orders, double price, int year);

struct BankEntry {
    std::string company;
    int year = 0;
    double amount = 0.0;  // deposit (+) or withdrawal (-)
};

/// Per-company banked allowance balances. Balances never go negative.
class BankLedger {
public:
    void deposit(const std::string& company, int year, double amount);
    void withdraw(const std::string& company, int year, double amount);
    double balance(const std::string& company) const;

    const std::vector<BankEntry>& entries() const noexcept { return entries_; }

private:
    std::map<std::string, double> balances_;
    std::vector<BankEntry> entries_;
};

struct BankOutcome {
    double deposited = 0.0;
    double violation = 0.0;  // allowance units used without cover
};

/// Deposits `unused` allowance units at year close. A negative amount is a
/// compliance violation and is never banked.
BankOutcome bank_surplus(BankLedger& ledger, const std::string& company, int year, double unused);

/// p * max(0, usage - allowed).
double assess_penalty(double usage_flops, double flops_total, double penalty_rate);

struct CreditUsage {
    std::string id;
    double usage = 0.0;
};

struct CreditSettlement {
    std::string id;
    double credits = 0.0;  // minted (+) or required purchase (-)
    double payment = 0.0;  // received (+) or paid (-)
};

struct CreditOutcome {
    std::vector<CreditSettlement> rows;
    double minted = 0.0;
    double purchased = 0.0;
};

/// Baseline-and-credit settlement: usage below the baseline mints credits,
/// usage above it must be covered by purchased credits. Nothing caps the total.
CreditOutcome credit_program_settle(std::span<const CreditUsage> usage, double baseline, double credit_price);

}  // namespace aicap::market
