#include "aicap/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "aicap/allocation.hpp"
#include "aicap/equilibrium.hpp"

namespace aicap::sim {

namespace {

double pick(const std::vector<double>& schedule, int year, double base) {
    if (schedule.empty()) return base;
    return schedule[static_cast<std::size_t>(year - 1)];
}

void check_schedule(const std::vector<double>& schedule, int horizon, const std::string& field) {
    if (schedule.empty()) return;
    if (static_cast<int>(schedule.size()) != horizon)
        throw ValidationError(field, field + " schedule must have exactly one entry per year of the horizon");
}

// Per-company trade settlement in allowance units, shared by the cap-and-trade path.
struct Position {
    Company company;
    double allocated = 0.0;
    double banked_in = 0.0;
    double price = 0.0;  // allowance price
    EquilibriumSolution best;
    double traded = 0.0;  // executed, allowance units (+ sold)
};

YearReport run_cap_and_trade(SimulationState& state, const Scenario& scenario, int year,
                             const std::vector<Company>& companies, double benchmark) {
    const PolicyConfig& policy = scenario.policy;
    YearReport report;
    report.year = year;
    report.benchmark = benchmark;

    std::vector<Position> pos;
    pos.reserve(companies.size());
    for (std::size_t i = 0; i < companies.size(); ++i) {
        const Company& c = companies[i];
        Position p;
        p.company = c;
        if (policy.allocation_rule == AllocationRule::benchmarking) {
            p.allocated = allocation::allocate_benchmarking(c.output, benchmark, c.assistance);
        } else {
            p.allocated = allocation::allocate_grandfathering(state.grandfathering_basis[i], policy.gamma);
            state.grandfathering_basis[i] = p.allocated;
        }
        p.banked_in = state.bank.balance(c.id);
        pos.push_back(std::move(p));
    }

    auto headroom = [](const Position& p) {
        return allocation::allowed_flops(p.allocated + p.banked_in, p.company.efficiency);
    };

    switch (policy.price_mode) {
        case PriceMode::exogenous:
            for (auto& p : pos) p.price = policy.price;
            break;
        case PriceMode::scaled_sqrt_a:
            for (auto& p : pos) p.price = std::sqrt(p.company.cost_per_flop);
            break;
        case PriceMode::endogenous_clearing: {
            std::vector<market::Agent> agents;
            for (const auto& p : pos)
                agents.push_back({p.company.id, p.company.loss_exponent, p.company.cost_per_flop, headroom(p),
                                  p.company.efficiency});
            double price = 0.0;
            try {
                price = market::clear_price(agents, policy.bracket_lo, policy.bracket_hi, policy.tolerance);
            } catch (const market::ClearingError& e) {
                // Excess supply at the floor: clear at the floor and bank what does not sell.
                if (e.kind() != market::ClearingError::Kind::excess_supply || !policy.banking) throw;
                price = policy.bracket_lo;
            }
            for (auto& p : pos) p.price = price;
            report.clearing_price = price;
            break;
        }
    }

    std::vector<market::Order> orders;
    for (auto& p : pos) {
        p.best = equilibrium::solve_cap_and_trade(p.company.loss_exponent, p.company.cost_per_flop,
                                                  p.price * p.company.efficiency, headroom(p));
        orders.push_back({p.company.id, p.best.y_star, p.company.efficiency});
    }

    // Uniform-price modes match firms against each other; sqrt(a) pricing is
    // firm-specific, so those trades all go to the external counterparty.
    if (policy.price_mode != PriceMode::scaled_sqrt_a) {
        market::MarketOutcome outcome = market::execute_trades(orders, pos.front().price, year);
        for (const auto& e : outcome.ledger.entries()) state.trades.record(e);
        const bool internal_only = policy.price_mode == PriceMode::endogenous_clearing;
        for (std::size_t i = 0; i < pos.size(); ++i)
            pos[i].traded = internal_only ? outcome.fills[i].matched : outcome.fills[i].desired;
        if (!internal_only) report.unmatched_net = outcome.unmatched_net;
    } else {
        for (std::size_t i = 0; i < pos.size(); ++i) {
            pos[i].traded = orders[i].flops * orders[i].efficiency;
            report.unmatched_net += pos[i].traded;
        }
    }

    for (auto& p : pos) {
        const Company& c = p.company;
        const double x = p.best.x_star;
        const double used = x * c.efficiency;
        const double consumed = used + p.traded;

        // Banked allowances cover consumption before this year's allocation.
        const double withdrawn = std::clamp(consumed, 0.0, p.banked_in);
        if (withdrawn > 0.0) state.bank.withdraw(c.id, year, withdrawn);
        double unused = p.allocated - (consumed - withdrawn);
        if (std::abs(unused) < policy.tolerance) unused = std::max(unused, 0.0);
        if (!policy.banking && unused > 0.0) unused = 0.0;  // expires
        const market::BankOutcome banked = market::bank_surplus(state.bank, c.id, year, unused);

        CompanyYear row;
        row.company = c.id;
        row.efficiency = c.efficiency;
        row.allocated = p.allocated;
        row.banked_in = p.banked_in;
        row.flops_allowed = allocation::allowed_flops(p.allocated, c.efficiency);
        row.x_star = x;
        row.y_star = p.traded / c.efficiency;
        row.banked_out = state.bank.balance(c.id);
        row.violation = banked.violation / c.efficiency;
        row.penalty = market::assess_penalty(x, x - row.violation, policy.penalty_rate);
        row.utility = equilibrium::utility_cap_and_trade(x, row.y_star, c.loss_exponent, c.cost_per_flop,
                                                         p.price * c.efficiency) -
                      row.penalty;
        row.energy = used;
        row.co2_kg = compute_emissions(x, c.efficiency, policy.kwh_per_allowance_unit, policy.co2_kg_per_kwh);
        row.price = p.price;
        report.rows.push_back(std::move(row));
    }
    return report;
}

CompanyYear usage_only_row(const Company& c, const PolicyConfig& policy, const EquilibriumSolution& sol) {
    CompanyYear row;
    row.company = c.id;
    row.efficiency = c.efficiency;
    row.x_star = sol.x_star;
    row.utility = sol.utility;
    row.energy = sol.x_star * c.efficiency;
    row.co2_kg = compute_emissions(sol.x_star, c.efficiency, policy.kwh_per_allowance_unit, policy.co2_kg_per_kwh);
    return row;
}

}  // namespace

Company Scenario::company_in_year(std::size_t i, int year) const {
    Company c = companies.at(i);
    if (i < schedules.size()) {
        c.output = pick(schedules[i].output, year, c.output);
        c.efficiency = pick(schedules[i].efficiency, year, c.efficiency);
    }
    return c;
}

Scenario validate_scenario(const Scenario& s) {
    if (s.companies.empty()) throw ValidationError("companies", "scenario needs at least one company");
    if (!s.schedules.empty() && s.schedules.size() != s.companies.size())
        throw ValidationError("schedules", "schedules must be parallel to companies");
    validate_policy(s.policy);

    std::set<std::string> ids;
    for (std::size_t i = 0; i < s.companies.size(); ++i) {
        const Company& c = s.companies[i];
        if (!ids.insert(c.id).second) throw ValidationError("id", "duplicate company id '" + c.id + "'");
        if (i < s.schedules.size()) {
            check_schedule(s.schedules[i].output, s.policy.horizon, "output");
            check_schedule(s.schedules[i].efficiency, s.policy.horizon, "efficiency");
        }
        for (int year = 1; year <= s.policy.horizon; ++year) validate_company(s.company_in_year(i, year));
        if (s.policy.price_mode == PriceMode::scaled_sqrt_a &&
            !(s.policy.penalty_rate > std::sqrt(c.cost_per_flop)))
            throw ValidationError("penalty_rate", "penalty must exceed price");
    }
    return s;
}

SimulationState initial_state(const Scenario& s) {
    SimulationState st;
    for (const auto& c : s.companies) st.grandfathering_basis.push_back(c.historical);
    return st;
}

YearReport run_year(SimulationState& state, const Scenario& scenario, int year) {
    if (year < 1 || year > scenario.policy.horizon)
        throw ValidationError("year", "year must lie within the scenario horizon");
    if (year != state.next_year) throw ValidationError("year", "compliance years must run in order");

    const PolicyConfig& policy = scenario.policy;
    std::vector<Company> companies;
    for (std::size_t i = 0; i < scenario.companies.size(); ++i)
        companies.push_back(validate_company(scenario.company_in_year(i, year)));
    const double benchmark = allocation::compute_benchmark(companies, policy.benchmark_rule, policy.benchmark);

    YearReport report;
    switch (policy.mode) {
        case GovernanceMode::cap_and_trade:
            report = run_cap_and_trade(state, scenario, year, companies, benchmark);
            break;
        case GovernanceMode::no_governance:
            report.year = year;
            report.benchmark = benchmark;
            for (const auto& c : companies)
                report.rows.push_back(usage_only_row(c, policy, equilibrium::solve_no_governance(c.loss_exponent,
                                                                                                 c.cost_per_flop)));
            break;
        case GovernanceMode::pigouvian:
            report.year = year;
            report.benchmark = benchmark;
            for (const auto& c : companies)
                report.rows.push_back(usage_only_row(
                    c, policy, equilibrium::solve_pigouvian(c.loss_exponent, c.cost_per_flop, policy.tax_rate)));
            break;
        case GovernanceMode::credit_program: {
            report.year = year;
            report.benchmark = benchmark;
            // Credits trade per FLOP below or above the baseline, so a firm's best
            // response is the capped problem with F = baseline at the credit price.
            std::vector<market::CreditUsage> usage;
            for (const auto& c : companies) {
                const auto sol = equilibrium::solve_cap_and_trade(c.loss_exponent, c.cost_per_flop,
                                                                  policy.credit_price, policy.credit_baseline);
                CompanyYear row = usage_only_row(c, policy, sol);
                row.flops_allowed = policy.credit_baseline;
                row.y_star = sol.y_star;
                row.price = policy.credit_price;
                report.rows.push_back(std::move(row));
                usage.push_back({c.id, sol.x_star});
            }
            const auto settled = market::credit_program_settle(usage, policy.credit_baseline, policy.credit_price);
            for (std::size_t i = 0; i < report.rows.size(); ++i) report.rows[i].credits = settled.rows[i].credits;
            report.credits_minted = settled.minted;
            report.clearing_price = policy.credit_price;
            break;
        }
    }
    ++state.next_year;
    return report;
}

HorizonResult run_horizon(const Scenario& scenario) {
    const Scenario s = validate_scenario(scenario);
    SimulationState state = initial_state(s);
    HorizonResult out;
    for (int year = 1; year <= s.policy.horizon; ++year) out.years.push_back(run_year(state, s, year));
    out.trades = std::move(state.trades);
    out.bank = std::move(state.bank);
    return out;
}

double conservation_residual(const YearReport& report) {
    double lhs = 0.0, rhs = 0.0;
    for (const auto& r : report.rows) {
        lhs += r.allocated + r.banked_in + r.violation * r.efficiency;
        rhs += r.energy + r.banked_out + r.y_star * r.efficiency;
    }
    return std::abs(lhs - rhs);
}

double compute_emissions(double usage, double efficiency, double kwh_per_allowance_unit, double co2_kg_per_kwh) {
    if (!(usage >= 0.0)) throw ValidationError("usage", "usage must be >= 0");
    return usage * efficiency * kwh_per_allowance_unit * co2_kg_per_kwh;
}

std::string to_string(Figure f) {
    switch (f) {
        case Figure::fig1a: return "fig1a";
        case Figure::fig1b: return "fig1b";
        case Figure::fig2a: return "fig2a";
        case Figure::fig2b: return "fig2b";
    }
    return "unknown";
}

Figure parse_figure(const std::string& s) {
    for (Figure f : {Figure::fig1a, Figure::fig1b, Figure::fig2a, Figure::fig2b})
        if (to_string(f) == s) return f;
    throw ValidationError("figure", "figure must be one of fig1a, fig1b, fig2a, fig2b");
}

std::vector<double> sweep_grid(double lo, double hi, int points, std::optional<double> anchor) {
    if (!(lo > 0.0 && hi > lo) || !std::isfinite(hi)) throw ValidationError("grid", "grid must satisfy 0 < min < max");
    if (points < 2) throw ValidationError("grid_points", "grid needs at least 2 points");
    std::vector<double> g(static_cast<std::size_t>(points));
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * i / (points - 1));
    g.front() = lo;
    g.back() = hi;
    if (anchor && *anchor > lo && *anchor < hi) {
        auto nearest = std::min_element(g.begin(), g.end(), [&](double l, double r) {
            return std::abs(std::log(l / *anchor)) < std::abs(std::log(r / *anchor));
        });
        *nearest = *anchor;
    }
    return g;
}

SweepResult sweep_figure1(const std::vector<double>& a_grid, Figure1Price price, double k, double b) {
    if (a_grid.empty()) throw ValidationError("grid", "grid must be non-empty");
    SweepResult out;
    out.figure = price == Figure1Price::fixed ? Figure::fig1a : Figure::fig1b;
    for (std::size_t i = 0; i < a_grid.size(); ++i) {
        const double a = a_grid[i];
        if (!(a > 0.0)) throw ValidationError("grid", "grid values must be > 0");
        if (i > 0 && !(a > a_grid[i - 1])) throw ValidationError("grid", "grid must be strictly increasing");
        SweepRow row;
        row.axis_value = a;
        row.b = price == Figure1Price::fixed ? b : std::sqrt(a);
        const auto base = equilibrium::solve_no_governance(k, a);
        const auto ct = equilibrium::solve_cap_and_trade(k, a, row.b, 0.0);
        row.x_base = base.x_star;
        row.x_ct = ct.x_star;
        row.u_base = base.utility;
        row.u_ct = ct.utility;
        if (!(row.x_ct < row.x_base)) throw std::logic_error("cap-and-trade usage is not below baseline usage");
        out.rows.push_back(row);
    }
    return out;
}

SweepResult sweep_figure2(const std::vector<double>& grid, Figure2Variant variant, double k, double b,
                          double fixed_value) {
    if (grid.empty()) throw ValidationError("grid", "grid must be non-empty");
    SweepResult out;
    out.figure = variant == Figure2Variant::vary_flops ? Figure::fig2a : Figure::fig2b;

    auto make_row = [&](double axis) {
        const double a = variant == Figure2Variant::vary_flops ? fixed_value : axis;
        const double flops = variant == Figure2Variant::vary_flops ? axis : fixed_value;
        const auto base = equilibrium::solve_no_governance(k, a);
        const auto ct = equilibrium::solve_cap_and_trade(k, a, b, flops);
        return SweepRow{axis, base.x_star, ct.x_star, base.utility, ct.utility, b, false};
    };

    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) throw ValidationError("grid", "grid values must be > 0");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw ValidationError("grid", "grid must be strictly increasing");
        out.rows.push_back(make_row(grid[i]));
    }

    if (variant == Figure2Variant::vary_flops) {
        const double crossover = equilibrium::breakeven_allowance(k, fixed_value, b);
        out.crossover = crossover;
        if (crossover >= grid.front() && crossover <= grid.back()) {
            auto it = std::lower_bound(out.rows.begin(), out.rows.end(), crossover,
                                       [](const SweepRow& r, double v) { return r.axis_value < v; });
            if (it == out.rows.end() || it->axis_value != crossover) it = out.rows.insert(it, make_row(crossover));
            it->crossover = true;
        }
    }
    return out;
}

SweepOptions default_sweep_options(Figure f) {
    SweepOptions o;
    if (f == Figure::fig2a) {
        o.grid_min = 0.5;
        o.grid_max = 20.0;
    }
    return o;
}

SweepResult sweep(Figure f, const SweepOptions& o) {
    constexpr double kReferenceCost = 1e-2;   // a pinned in the fixed-cost panels
    constexpr double kReferenceFlops = 10.0;  // F pinned in the fixed-allowance panel
    if (!(o.k > 0.0)) throw ValidationError("k", "loss_exponent must be > 0");
    if (!(o.b > 0.0)) throw ValidationError("b", "price must be > 0");

    switch (f) {
        case Figure::fig1a:
            return sweep_figure1(sweep_grid(o.grid_min, o.grid_max, o.grid_points, kReferenceCost), Figure1Price::fixed,
                                 o.k, o.b);
        case Figure::fig1b:
            return sweep_figure1(sweep_grid(o.grid_min, o.grid_max, o.grid_points, kReferenceCost),
                                 Figure1Price::sqrt_a, o.k, o.b);
        case Figure::fig2a:
            return sweep_figure2(sweep_grid(o.grid_min, o.grid_max, o.grid_points, kReferenceFlops),
                                 Figure2Variant::vary_flops, o.k, o.b, kReferenceCost);
        case Figure::fig2b:
            return sweep_figure2(sweep_grid(o.grid_min, o.grid_max, o.grid_points, kReferenceCost),
                                 Figure2Variant::vary_cost, o.k, o.b, kReferenceFlops);
    }
    throw ValidationError("figure", "unknown figure");
}

}  // namespace aicap::sim
