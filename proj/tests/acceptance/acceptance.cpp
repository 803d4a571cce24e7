// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "aicap/commands.hpp"
#include "aicap/equilibrium.hpp"
#include "aicap/market.hpp"
#include "aicap/scenario_io.hpp"
#include "aicap/simulation.hpp"
#include "oracles.hpp"

using namespace aicap;
namespace fs = std::filesystem;

namespace {

const std::string kScenarios = AICAP_SCENARIO_DIR;

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) detail = what;
        ok = ok && cond;
    }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("aicap_acceptance_" + name);
    fs::remove_all(p);
    return p;
}

Outcome no_governance_optimum() {
    Outcome o;
    const auto s = equilibrium::solve_no_governance(1, 0.01);
    o.require(std::abs(s.x_star - 10.0) < 1e-9, "x*=" + fmt(s.x_star));
    const auto g = equilibrium::grid_oracle(1, 0.01, 0, 0, equilibrium::OracleMode::no_governance);
    o.require(std::abs(g.x_star - s.x_star) / s.x_star < 1e-5, "oracle x*=" + fmt(g.x_star));
    o.require(std::abs(oracle::best_usage(1, 0.01, 0) - 10.0) < 1e-6, "golden-section oracle disagrees");
    if (o.ok) o.detail = "x*=" + fmt(s.x_star) + " oracle=" + fmt(g.x_star);
    return o;
}

Outcome cap_and_trade_optimum() {
    Outcome o;
    const double sqrt50 = 7.0710678118654755;
    const auto s = equilibrium::solve_cap_and_trade(1, 0.01, 0.01, 10);
    o.require(std::abs(s.x_star - sqrt50) < 1e-9, "x*=" + fmt(s.x_star));
    o.require(std::abs(s.y_star - (10 - sqrt50)) < 1e-9, "y*=" + fmt(s.y_star));
    const auto r = equilibrium::kkt_residuals(s, 1, 0.01, 0.01, 10);
    for (double v : {r.stationarity_x, r.stationarity_y, r.primal_cap, r.primal_nonneg, r.comp_slack_1, r.comp_slack_2})
        o.require(v < 1e-9, "KKT residual " + fmt(v));
    if (o.ok) o.detail = "x*=" + fmt(s.x_star) + " y*=" + fmt(s.y_star) + " max_kkt=" + fmt(r.max());
    return o;
}

Outcome fewer_flops() {
    Outcome o;
    int violations = 0;
    for (const auto& p : oracle::random_params(1000, 2024)) {
        const double f = 10.0;
        if (!(equilibrium::solve_cap_and_trade(p.k, p.a, p.b, f).x_star < equilibrium::solve_no_governance(p.k, p.a).x_star))
            ++violations;
    }
    o.require(violations == 0, std::to_string(violations) + " violations");
    if (o.ok) o.detail = "draws=1000 violations=0";
    return o;
}

Outcome figure1() {
    Outcome o;
    const auto dir = scratch("fig1");
    std::ostringstream out, err;
    for (auto f : {sim::Figure::fig1a, sim::Figure::fig1b})
        o.require(cli::cmd_sweep(f, sim::default_sweep_options(f), dir, out, err) == cli::kExitOk, "sweep failed");
    for (auto f : {sim::Figure::fig1a, sim::Figure::fig1b}) {
        const auto r = sim::sweep(f, sim::default_sweep_options(f));
        o.require(r.rows.size() == 50, "row count");
        for (const auto& row : r.rows) o.require(row.x_ct < row.x_base, "x_ct >= x_base at a=" + fmt(row.axis_value));
        if (f == sim::Figure::fig1a) {
            bool found = false;
            for (const auto& row : r.rows)
                if (row.axis_value == 0.01) {
                    found = true;
                    o.require(std::abs(row.x_base - 10.0) < 1e-6 && std::abs(row.x_ct - 7.0710678) < 1e-6,
                              "reference row (" + fmt(row.x_base) + ", " + fmt(row.x_ct) + ")");
                }
            o.require(found, "no row at a=0.01");
        }
    }
    o.require(slurp(dir / "fig1a.csv").find("\n0.01,10,7.071067812,") != std::string::npos, "fig1a.csv reference row");
    if (o.ok) o.detail = "fig1a,fig1b 50 rows each, a=0.01 -> (10, 7.0710678)";
    return o;
}

Outcome figure2() {
    Outcome o;
    const auto dir = scratch("fig2");
    std::ostringstream out, err;
    for (auto f : {sim::Figure::fig2a, sim::Figure::fig2b})
        o.require(cli::cmd_sweep(f, sim::default_sweep_options(f), dir, out, err) == cli::kExitOk, "sweep failed");

    const auto a = sim::sweep(sim::Figure::fig2a, sim::default_sweep_options(sim::Figure::fig2a));
    o.require(a.crossover.has_value(), "no crossover");
    const double fhat = a.crossover.value_or(0.0);
    o.require(std::abs(fhat - 8.2842712) < 1e-4, "crossover " + fmt(fhat));
    const double u_base = equilibrium::solve_no_governance(1, 0.01).utility;
    const double bisected = oracle::bisect(
        [&](double f) { return oracle::utility(std::sqrt(50.0), f - std::sqrt(50.0), 1, 0.01, 0.01) - u_base; }, 0, 20);
    o.require(std::abs(bisected - fhat) < 1e-6, "bisection gives " + fmt(bisected));
    for (const auto& r : a.rows) {
        if (r.crossover) continue;
        if (r.axis_value < fhat) o.require(r.u_ct < r.u_base, "u_ct >= u_base below crossover at F=" + fmt(r.axis_value));
        if (r.axis_value > fhat) o.require(r.u_ct > r.u_base, "u_ct <= u_base above crossover at F=" + fmt(r.axis_value));
    }

    const auto b = sim::sweep(sim::Figure::fig2b, sim::default_sweep_options(sim::Figure::fig2b));
    bool found = false;
    for (const auto& r : b.rows)
        if (r.axis_value == 0.01) {
            found = true;
            o.require(std::abs(r.u_ct + 0.1828427) < 1e-6 && std::abs(r.u_base + 0.2) < 1e-9 && r.u_ct > r.u_base,
                      "fig2b a=0.01 u_ct=" + fmt(r.u_ct) + " u_base=" + fmt(r.u_base));
        }
    o.require(found, "no fig2b row at a=0.01");
    if (o.ok) o.detail = "crossover F=" + fmt(fhat) + " bisection=" + fmt(bisected);
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    cli::VerifyOptions opt;
    opt.sample_size = 1000;
    std::ostringstream out, err;
    o.require(cli::cmd_verify(opt, out, err) == cli::kExitOk, "verify exit code non-zero: " + err.str());
    const auto rep = cli::verify_equilibria(opt);
    const double worst = std::max(rep.worst_oracle_rel_baseline, rep.worst_oracle_rel_cap_trade);
    o.require(worst < 1e-5, "worst x* discrepancy " + fmt(worst));
    o.require(rep.worst_gradient_rel < 1e-4, "gradient " + fmt(rep.worst_gradient_rel));
    if (o.ok) o.detail = "worst_rel=" + fmt(worst) + " worst_gradient_rel=" + fmt(rep.worst_gradient_rel);
    return o;
}

Outcome market_clearing() {
    Outcome o;
    const auto parsed = io::parse_scenario(kScenarios + "/two_firm_clearing.json");
    const auto r = sim::run_horizon(parsed.scenario);
    const double p = r.years.at(0).clearing_price.value_or(-1.0);
    o.require(std::abs(p - 0.005625) < 1e-8, "b*=" + fmt(p));
    o.require(std::abs(r.trades.signed_sum(1)) < 1e-12, "ledger not zero-sum");
    o.require(std::abs(r.trades.total_sold(1) - r.trades.total_bought(1)) < 1e-12, "sold != bought");
    o.require(!r.trades.entries().empty(), "no trades recorded");
    if (o.ok) o.detail = "b*=" + fmt(p) + " traded=" + fmt(r.trades.total_sold(1));
    return o;
}

Outcome conservation() {
    Outcome o;
    const auto scenario = kScenarios + "/banking_5yr.json";
    const auto parsed = io::parse_scenario(scenario);
    o.require(parsed.scenario.companies.size() == 4 && parsed.scenario.policy.horizon == 5, "scenario shape");
    const auto r = sim::run_horizon(parsed.scenario);
    double used = 0, allocated = 0, banked = 0;
    for (const auto& y : r.years) {
        used += y.total_used_allowances();
        allocated += y.total_allocated();
        banked = std::max(banked, y.total_banked_out());
        o.require(used <= allocated + 1e-9, "cumulative usage exceeds allocation in year " + std::to_string(y.year));
        o.require(sim::conservation_residual(y) < 1e-8, "balance residual in year " + std::to_string(y.year));
    }
    o.require(banked > 0.0, "nothing was banked");

    const auto d1 = scratch("run1"), d2 = scratch("run2");
    std::ostringstream out, err;
    o.require(cli::cmd_run(scenario, d1, out, err) == cli::kExitOk, "run 1 failed");
    o.require(cli::cmd_run(scenario, d2, out, err) == cli::kExitOk, "run 2 failed");
    for (const char* f : {"years.csv", "trades.csv", "summary.csv"})
        o.require(slurp(d1 / f) == slurp(d2 / f) && !slurp(d1 / f).empty(), std::string(f) + " differs");
    if (o.ok) o.detail = "used=" + fmt(used) + " allocated=" + fmt(allocated) + " csv identical";
    return o;
}

Outcome credit_contrast() {
    Outcome o;
    auto s = io::parse_scenario(kScenarios + "/credit_contrast.json").scenario;
    o.require(s.companies.size() == 3, "scenario shape");
    const double credit = sim::run_horizon(s).years.at(0).total_flops();
    s.policy.mode = GovernanceMode::cap_and_trade;
    const double capped = sim::run_horizon(s).years.at(0).total_flops();
    o.require(credit > capped, "credit usage " + fmt(credit) + " <= cap-and-trade " + fmt(capped));
    if (o.ok) o.detail = "credit_program=" + fmt(credit) + " cap_and_trade=" + fmt(capped);
    return o;
}

struct Criterion {
    const char* name;
    double limit_seconds;
    std::function<Outcome()> check;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"no_governance_optimum", 1, no_governance_optimum},
        {"cap_and_trade_optimum_kkt", 1, cap_and_trade_optimum},
        {"fewer_flops_property", 5, fewer_flops},
        {"figure1_sweeps", 5, figure1},
        {"figure2_crossover", 5, figure2},
        {"oracle_equivalence", 30, oracle_equivalence},
        {"market_clearing", 1, market_clearing},
        {"conservation_banking", 5, conservation},
        {"credit_program_contrast", 1, credit_contrast},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.limit_seconds) {
            o.ok = false;
            o.detail += " (runtime over " + fmt(c.limit_seconds) + " s)";
        }
        std::printf("%s %s %.3fs %s\n", o.ok ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
        if (!o.ok) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
