#include <doctest.h>

#include <cmath>

#include "aicap/core_model.hpp"

using namespace aicap;

namespace {

Company valid_company() {
    Company c;
    c.id = "alpha";
    c.output = 100;
    c.efficiency = 0.5;
    c.assistance = 1;
    c.historical = 100;
    c.loss_exponent = 1;
    c.cost_per_flop = 0.01;
    return c;
}

PolicyConfig valid_policy() {
    PolicyConfig p;
    p.gamma = 0.9;
    p.benchmark = 0.5;
    p.price = 0.01;
    p.penalty_rate = 0.1;
    p.horizon = 5;
    return p;
}

template <typename F>
std::string field_of(F f) {
    try {
        f();
    } catch (const ValidationError& e) {
        return e.field() + ": " + e.what();
    }
    return "no error";
}

}  // namespace

TEST_CASE("validate_company accepts a well-formed company unchanged") {
    const Company c = valid_company();
    const Company v = validate_company(c);
    CHECK(v.id == c.id);
    CHECK(v.output == c.output);
    CHECK(v.efficiency == c.efficiency);
    CHECK(v.cost_per_flop == c.cost_per_flop);
}

TEST_CASE("validate_company names the offending field") {
    Company c = valid_company();
    c.loss_exponent = 0;
    CHECK(field_of([&] { validate_company(c); }) == "loss_exponent: loss_exponent must be > 0");

    c = valid_company();
    c.efficiency = -1;
    CHECK(field_of([&] { validate_company(c); }) == "efficiency: efficiency must be > 0");

    c = valid_company();
    c.output = -1;
    CHECK(field_of([&] { validate_company(c); }) == "output: output must be >= 0");

    c = valid_company();
    c.assistance = 0;
    CHECK(field_of([&] { validate_company(c); }) == "assistance: assistance must be > 0");

    c = valid_company();
    c.cost_per_flop = 0;
    CHECK(field_of([&] { validate_company(c); }) == "cost_per_flop: cost_per_flop must be > 0");

    c = valid_company();
    c.historical = std::nan("");
    CHECK(field_of([&] { validate_company(c); }) == "historical: historical must be >= 0");
}

TEST_CASE("validate_policy") {
    CHECK_NOTHROW(validate_policy(valid_policy()));

    PolicyConfig p = valid_policy();
    p.gamma = 1.0;
    CHECK(field_of([&] { validate_policy(p); }) == "gamma: gamma must be in open interval (0,1)");
    p.gamma = 0.0;
    CHECK_THROWS_AS(validate_policy(p), ValidationError);

    p = valid_policy();
    p.penalty_rate = 0.005;
    p.price = 0.01;
    CHECK(field_of([&] { validate_policy(p); }) == "penalty_rate: penalty must exceed price");
    p.penalty_rate = 0.01;  // equal is not enough
    CHECK_THROWS_AS(validate_policy(p), ValidationError);

    p = valid_policy();
    p.horizon = 0;
    CHECK(field_of([&] { validate_policy(p); }) == "horizon: horizon must be >= 1");

    SUBCASE("endogenous clearing compares the penalty with the bracket ceiling") {
        p = valid_policy();
        p.price_mode = PriceMode::endogenous_clearing;
        p.bracket_hi = 1.0;
        p.penalty_rate = 0.5;
        CHECK_THROWS_AS(validate_policy(p), ValidationError);
        p.penalty_rate = 10.0;
        CHECK_NOTHROW(validate_policy(p));
    }

    SUBCASE("credit program needs a baseline") {
        p = valid_policy();
        p.mode = GovernanceMode::credit_program;
        CHECK(field_of([&] { validate_policy(p); }) == "credit_baseline: credit_baseline must be > 0");
        p.credit_baseline = 10;
        CHECK_NOTHROW(validate_policy(p));
    }
}

TEST_CASE("enum names round-trip") {
    for (auto m : {GovernanceMode::no_governance, GovernanceMode::cap_and_trade, GovernanceMode::pigouvian,
                   GovernanceMode::credit_program})
        CHECK(parse_governance_mode(to_string(m)) == m);
    for (auto m : {PriceMode::exogenous, PriceMode::scaled_sqrt_a, PriceMode::endogenous_clearing})
        CHECK(parse_price_mode(to_string(m)) == m);
    for (auto r : {BenchmarkRule::fixed, BenchmarkRule::pct90_of_average, BenchmarkRule::top_decile})
        CHECK(parse_benchmark_rule(to_string(r)) == r);
    CHECK_THROWS_AS(parse_price_mode("auction"), ValidationError);
}

TEST_CASE("allowance account availability") {
    AllowanceAccount acct{10, 2, 5};
    CHECK(acct.available() == doctest::Approx(7));
    CHECK_NOTHROW(validate_account(acct));
    acct.traded_net = 13;
    CHECK_THROWS_AS(validate_account(acct), ValidationError);
}

TEST_CASE("trade ledger rejects non-positive quantities and stays zero-sum") {
    TradeLedger ledger;
    CHECK_THROWS_AS(ledger.record({1, "a", "b", 0.0, 0, 0, 0.01}), ValidationError);
    CHECK_THROWS_AS(ledger.record({1, "a", "a", 1.0, 1, 1, 0.01}), ValidationError);
    ledger.record({1, "a", "b", 4.0, 4, 4, 0.01});
    ledger.record({1, "a", "c", 1.0, 1, 1, 0.01});
    ledger.record({2, "c", "a", 2.5, 2.5, 2.5, 0.02});
    CHECK(ledger.total_sold(1) == doctest::Approx(5.0));
    CHECK(ledger.total_bought(1) == doctest::Approx(5.0));
    CHECK(ledger.signed_sum(1) == doctest::Approx(0.0));
    CHECK(ledger.for_year(2).size() == 1);
}
