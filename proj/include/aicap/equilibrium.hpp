#pragma once

#include "aicap/core_model.hpp"

namespace aicap::equilibrium {

/// Absolute values of every KKT condition of the cap-and-trade problem
///   max -x^{-k} - a x + b y   s.t.  x + y <= F,  x >= 0
/// evaluated at a candidate (x, y, mu1, mu2).
struct KktResiduals {
    double stationarity_x = 0.0;
    double stationarity_y = 0.0;
    double primal_cap = 0.0;
    double primal_nonneg = 0.0;
    double comp_slack_1 = 0.0;
    double comp_slack_2 = 0.0;

    double max() const noexcept;
    bool valid(double tol = kDefaultTolerance) const noexcept { return max() < tol; }
};

/// Unconstrained maximizer of -x^{-k} - c x, i.e. (k/c)^{1/(k+1)}.
double optimal_usage(double k, double marginal_cost);

double utility_no_governance(double x, double k, double a);
double utility_cap_and_trade(double x, double y, double k, double a, double b);

struct Gradient {
    double dx = 0.0;
    double dy = 0.0;
};

/// Analytic gradient of utility_cap_and_trade.
Gradient utility_cap_and_trade_gradient(double x, double y, double k, double a, double b);

EquilibriumSolution solve_no_governance(double k, double a);

/// Price-taking best response under a cap of F FLOPs with buy/sell price b.
/// The cap binds: x* + y* = F.
EquilibriumSolution solve_cap_and_trade(double k, double a, double b, double flops_allowed);

/// No-governance problem with a per-FLOP tax t added to the marginal cost.
EquilibriumSolution solve_pigouvian(double k, double a, double t);

KktResiduals kkt_residuals(const EquilibriumSolution& sol, double k, double a, double b, double flops_allowed);

enum class OracleMode { no_governance, cap_and_trade };

struct OracleGrid {
    double lo = 1e-3;
    double hi = 1e4;
    int points = 1001;
    int zoom_rounds = 3;
};

/// Brute-force argmax over a log-spaced grid of x, refined by repeated zooms
/// around the incumbent. In cap_and_trade mode y is pinned to F - x; see
/// slack_scan for the independent check that this is optimal.
EquilibriumSolution grid_oracle(double k, double a, double b, double flops_allowed, OracleMode mode,
                                const OracleGrid& grid = {});

struct SlackScan {
    double binding_utility = 0.0;     // best over x with y = F - x
    double best_slack_utility = 0.0;  // best over x and slack s > 0, y = F - x - s
    double best_slack_x = 0.0;
    double best_slack = 0.0;

    bool binding_dominates() const noexcept { return binding_utility >= best_slack_utility; }
};

/// Coarse 2-D scan over (x, slack) for the cap-and-trade objective.
SlackScan slack_scan(double k, double a, double b, double flops_allowed, int x_points = 201, int slack_points = 101);

/// Allowance level F at which cap-and-trade utility equals no-governance utility.
double breakeven_allowance(double k, double a, double b);

}  // namespace aicap::equilibrium
