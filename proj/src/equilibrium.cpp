#include "aicap/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace aicap::equilibrium {

namespace {

void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(field, std::string(field) + " must be > 0");
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * i / (n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> linear_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    g.back() = hi;
    return g;
}

template <typename Objective>
std::size_t argmax(const std::vector<double>& grid, Objective u) {
    std::size_t best = 0;
    double best_u = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = u(grid[i]);
        if (v > best_u) {
            best_u = v;
            best = i;
        }
    }
    return best;
}

}  // namespace

double KktResiduals::max() const noexcept {
    return std::max({stationarity_x, stationarity_y, primal_cap, primal_nonneg, comp_slack_1, comp_slack_2});
}

double optimal_usage(double k, double marginal_cost) {
    require_positive(k, "loss_exponent");
    require_positive(marginal_cost, "marginal_cost");
    return std::pow(k / marginal_cost, 1.0 / (k + 1.0));
}

double utility_no_governance(double x, double k, double a) {
    if (!(x > 0.0)) throw ValidationError("x", "utility is undefined (negative infinity) at x <= 0");
    return -std::pow(x, -k) - a * x;
}

double utility_cap_and_trade(double x, double y, double k, double a, double b) {
    return utility_no_governance(x, k, a) + b * y;
}

Gradient utility_cap_and_trade_gradient(double x, double y, double k, double a, double b) {
    (void)y;
    if (!(x > 0.0)) throw ValidationError("x", "gradient is undefined at x <= 0");
    return {k * std::pow(x, -(k + 1.0)) - a, b};
}

EquilibriumSolution solve_no_governance(double k, double a) {
    require_positive(k, "loss_exponent");
    require_positive(a, "cost_per_flop");
    EquilibriumSolution s;
    s.x_star = optimal_usage(k, a);
    s.y_star = 0.0;
    s.utility = utility_no_governance(s.x_star, k, a);
    return s;
}

EquilibriumSolution solve_cap_and_trade(double k, double a, double b, double flops_allowed) {
    require_positive(k, "loss_exponent");
    require_positive(a, "cost_per_flop");
    require_positive(b, "price");
    if (!(flops_allowed >= 0.0)) throw ValidationError("flops_allowed", "flops_allowed must be >= 0");

    // Stationarity in y gives mu1 = b > 0, so the cap binds; x > 0 forces mu2 = 0.
    EquilibriumSolution s;
    s.x_star = optimal_usage(k, a + b);
    s.y_star = flops_allowed - s.x_star;
    s.mu1 = b;
    s.mu2 = 0.0;
    s.utility = utility_cap_and_trade(s.x_star, s.y_star, k, a, b);
    return s;
}

EquilibriumSolution solve_pigouvian(double k, double a, double t) {
    require_positive(k, "loss_exponent");
    require_positive(a, "cost_per_flop");
    if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("tax_rate", "tax_rate must be >= 0");
    EquilibriumSolution s;
    s.x_star = optimal_usage(k, a + t);
    s.y_star = 0.0;
    s.utility = utility_no_governance(s.x_star, k, a + t);
    return s;
}

KktResiduals kkt_residuals(const EquilibriumSolution& sol, double k, double a, double b, double flops_allowed) {
    const double x = sol.x_star;
    const double gap = x + sol.y_star - flops_allowed;
    KktResiduals r;
    r.stationarity_x = std::abs(-k * std::pow(x, -(k + 1.0)) + a + sol.mu1 - sol.mu2);
    r.stationarity_y = std::abs(sol.mu1 - b);
    r.primal_cap = std::max(0.0, gap);
    r.primal_nonneg = std::max(0.0, -x);
    r.comp_slack_1 = std::abs(sol.mu1 * gap);
    r.comp_slack_2 = std::abs(sol.mu2 * x);
    return r;
}

EquilibriumSolution grid_oracle(double k, double a, double b, double flops_allowed, OracleMode mode,
                                const OracleGrid& grid) {
    require_positive(k, "loss_exponent");
    require_positive(a, "cost_per_flop");
    if (mode == OracleMode::cap_and_trade) {
        require_positive(b, "price");
        if (!(flops_allowed >= 0.0)) throw ValidationError("flops_allowed", "flops_allowed must be >= 0");
    }
    if (!(grid.lo > 0.0 && grid.hi > grid.lo) || grid.points < 3 || grid.zoom_rounds < 0)
        throw ValidationError("bracket", "oracle bracket must satisfy 0 < lo < hi with at least 3 points");

    const double price = mode == OracleMode::cap_and_trade ? b : 0.0;
    // With y = F - x the objective differs from -x^{-k} - (a+b)x only by the constant bF;
    // dropping it keeps the argmax scan free of cancellation at large F.
    auto u = [&](double x) { return -std::pow(x, -k) - (a + price) * x; };

    std::vector<double> xs = log_grid(grid.lo, grid.hi, grid.points);
    std::size_t i = argmax(xs, u);
    for (int round = 0; round < grid.zoom_rounds; ++round) {
        const double lo = xs[i == 0 ? 0 : i - 1];
        const double hi = xs[std::min(i + 1, xs.size() - 1)];
        xs = linear_grid(lo, hi, grid.points);
        i = argmax(xs, u);
    }

    EquilibriumSolution s;
    s.method = EquilibriumSolution::Method::grid_oracle;
    s.x_star = xs[i];
    if (mode == OracleMode::cap_and_trade) {
        s.y_star = flops_allowed - s.x_star;
        s.mu1 = b;
        s.utility = utility_cap_and_trade(s.x_star, s.y_star, k, a, b);
    } else {
        s.utility = utility_no_governance(s.x_star, k, a);
    }
    return s;
}

SlackScan slack_scan(double k, double a, double b, double flops_allowed, int x_points, int slack_points) {
    require_positive(k, "loss_exponent");
    require_positive(a, "cost_per_flop");
    require_positive(b, "price");
    if (!(flops_allowed >= 0.0)) throw ValidationError("flops_allowed", "flops_allowed must be >= 0");
    if (x_points < 2 || slack_points < 2) throw ValidationError("points", "slack scan needs at least 2 points per axis");

    const auto xs = log_grid(1e-3, 1e4, x_points);
    const auto slacks = log_grid(1e-6, 1e2, slack_points);

    SlackScan scan;
    scan.binding_utility = -std::numeric_limits<double>::infinity();
    scan.best_slack_utility = -std::numeric_limits<double>::infinity();
    for (double x : xs) {
        scan.binding_utility = std::max(scan.binding_utility, utility_cap_and_trade(x, flops_allowed - x, k, a, b));
        for (double s : slacks) {
            const double v = utility_cap_and_trade(x, flops_allowed - x - s, k, a, b);
            if (v > scan.best_slack_utility) {
                scan.best_slack_utility = v;
                scan.best_slack_x = x;
                scan.best_slack = s;
            }
        }
    }
    return scan;
}

double breakeven_allowance(double k, double a, double b) {
    const double u_base = solve_no_governance(k, a).utility;
    const double xc = optimal_usage(k, a + b);
    // u_cap(F) = -xc^{-k} - a xc + b (F - xc) is affine in F with slope b.
    return (u_base + std::pow(xc, -k) + a * xc + b * xc) / b;
}

}  // namespace aicap::equilibrium
