#include "aicap/market.hpp"

#include <algorithm>
#include <cmath>

#include "aicap/equilibrium.hpp"

namespace aicap::market {

double demand(const Agent& agent, double price) {
    return equilibrium::optimal_usage(agent.loss_exponent, agent.cost_per_flop + price * agent.efficiency);
}

double net_supply(double price, std::span<const Agent> agents) {
    if (!(price > 0.0)) throw ValidationError("price", "price must be > 0");
    if (agents.empty()) throw ValidationError("agents", "net supply requires at least one agent");
    double s = 0.0;
    for (const auto& ag : agents) s += ag.efficiency * (ag.flops_allowed - demand(ag, price));
    return s;
}

double clear_price(std::span<const Agent> agents, double lo, double hi, double tol, int max_iterations) {
    if (!(lo > 0.0 && hi > lo)) throw ValidationError("clearing_bracket", "clearing bracket must satisfy 0 < lo < hi");
    if (!(tol > 0.0)) throw ValidationError("tolerance", "tolerance must be > 0");

    const double f_lo = net_supply(lo, agents);
    if (std::abs(f_lo) < tol) return lo;
    const double f_hi = net_supply(hi, agents);
    if (std::abs(f_hi) < tol) return hi;

    // net_supply is strictly increasing in price
    if (f_lo > 0.0)
        throw ClearingError(ClearingError::Kind::excess_supply,
                            "market cannot clear in bracket: excess supply at the lower bound");
    if (f_hi < 0.0)
        throw ClearingError(ClearingError::Kind::excess_demand,
                            "market cannot clear in bracket: excess demand at the upper bound");

    // Invariant: net_supply(lo) < 0 < net_supply(hi). Only supply-side points
    // (net supply >= 0) are returned so buyers are always fully served.
    for (int it = 0; it < max_iterations && (hi - lo) >= tol * tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f = net_supply(mid, agents);
        if (f >= 0.0 && f < tol) return mid;
        if (f < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

MarketOutcome execute_trades(std::span<const Order> orders, double price, int year) {
    MarketOutcome out;
    out.price = price;

    struct Side {
        std::size_t index;
        double remaining;
    };
    std::vector<Side> sellers, buyers;
    for (std::size_t i = 0; i < orders.size(); ++i) {
        const auto& o = orders[i];
        if (!(o.efficiency > 0.0)) throw ValidationError("efficiency", "efficiency must be > 0");
        const double q = o.flops * o.efficiency;
        out.fills.push_back({o.id, q, 0.0});
        if (q > 0.0) sellers.push_back({i, q});
        if (q < 0.0) buyers.push_back({i, -q});
    }
    auto by_quantity = [&](const Side& l, const Side& r) {
        if (l.remaining != r.remaining) return l.remaining > r.remaining;
        return orders[l.index].id < orders[r.index].id;
    };
    std::sort(sellers.begin(), sellers.end(), by_quantity);
    std::sort(buyers.begin(), buyers.end(), by_quantity);

    std::size_t s = 0, b = 0;
    while (s < sellers.size() && b < buyers.size()) {
        const double q = std::min(sellers[s].remaining, buyers[b].remaining);
        const auto& seller = orders[sellers[s].index];
        const auto& buyer = orders[buyers[b].index];
        if (q > 0.0) {
            out.ledger.record({year, seller.id, buyer.id, q, q / seller.efficiency, q / buyer.efficiency, price});
            out.fills[sellers[s].index].matched += q;
            out.fills[buyers[b].index].matched -= q;
        }
        sellers[s].remaining -= q;
        buyers[b].remaining -= q;
        if (sellers[s].remaining <= 0.0) ++s;
        if (buyers[b].remaining <= 0.0) ++b;
    }

    for (const auto& f : out.fills) out.unmatched_net += f.desired - f.matched;
    return out;
}

void BankLedger::deposit(const std::string& company, int year, double amount) {
    if (!(amount >= 0.0)) throw ValidationError("amount", "bank deposit must be >= 0");
    balances_[company] += amount;
    entries_.push_back({company, year, amount});
}

void BankLedger::withdraw(const std::string& company, int year, double amount) {
    if (!(amount >= 0.0)) throw ValidationError("amount", "bank withdrawal must be >= 0");
    double& bal = balances_[company];
    if (amount > bal) throw ValidationError("amount", "bank withdrawal exceeds balance for " + company);
    bal -= amount;
    entries_.push_back({company, year, -amount});
}

double BankLedger::balance(const std::string& company) const {
    auto it = balances_.find(company);
    return it == balances_.end() ? 0.0 : it->second;
}

BankOutcome bank_surplus(BankLedger& ledger, const std::string& company, int year, double unused) {
    if (unused < 0.0) return {0.0, -unused};
    ledger.deposit(company, year, unused);
    return {unused, 0.0};
}

double assess_penalty(double usage_flops, double flops_total, double penalty_rate) {
    if (!(penalty_rate >= 0.0)) throw ValidationError("penalty_rate", "penalty_rate must be >= 0");
    return penalty_rate * std::max(0.0, usage_flops - flops_total);
}

CreditOutcome credit_program_settle(std::span<const CreditUsage> usage, double baseline, double credit_price) {
    if (!(baseline > 0.0)) throw ValidationError("credit_baseline", "credit_baseline must be > 0");
    if (!(credit_price > 0.0)) throw ValidationError("credit_price", "credit_price must be > 0");
    CreditOutcome out;
    for (const auto& u : usage) {
        if (!(u.usage >= 0.0)) throw ValidationError("usage", "usage must be >= 0");
        const double credits = baseline - u.usage;
        out.rows.push_back({u.id, credits, credits * credit_price});
        if (credits > 0.0)
            out.minted += credits;
        else
            out.purchased -= credits;
    }
    return out;
}

}  // namespace aicap::market
