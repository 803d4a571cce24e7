#include "aicap/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace aicap::io {

using nlohmann::json;

namespace {

/// Reads typed fields from one JSON object, records defaults, rejects unknown keys.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string where, std::vector<std::string>& diagnostics)
        : obj_(obj), where_(std::move(where)), diagnostics_(diagnostics) {
        if (!obj_.is_object()) throw ValidationError(where_, where_ + " must be a JSON object");
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    double number(const std::string& key) {
        seen_.insert(key);
        if (!obj_.contains(key)) throw ValidationError(key, key + " is required" + context());
        return as_number(obj_.at(key), key);
    }

    double number(const std::string& key, double fallback, const std::string& label) {
        seen_.insert(key);
        if (!obj_.contains(key)) {
            diagnostics_.push_back("default applied: " + label + "=" + short_text(fallback) + context());
            return fallback;
        }
        return as_number(obj_.at(key), key);
    }

    /// A scalar, or one value per year.
    std::vector<double> number_or_series(const std::string& key, std::optional<double> fallback,
                                         const std::string& label, double& scalar_out) {
        seen_.insert(key);
        if (!obj_.contains(key)) {
            if (!fallback) throw ValidationError(key, key + " is required" + context());
            diagnostics_.push_back("default applied: " + label + "=" + short_text(*fallback) + context());
            scalar_out = *fallback;
            return {};
        }
        const json& v = obj_.at(key);
        if (v.is_array()) {
            if (v.empty()) throw ValidationError(key, key + " schedule must not be empty" + context());
            std::vector<double> series;
            for (const auto& e : v) series.push_back(as_number(e, key));
            scalar_out = series.front();
            return series;
        }
        scalar_out = as_number(v, key);
        return {};
    }

    std::string string(const std::string& key) {
        seen_.insert(key);
        if (!obj_.contains(key)) throw ValidationError(key, key + " is required" + context());
        const json& v = obj_.at(key);
        if (!v.is_string()) throw ValidationError(key, key + " must be a string" + context());
        return v.get<std::string>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        seen_.insert(key);
        if (!obj_.contains(key)) {
            diagnostics_.push_back("default applied: " + key + "=" + fallback + context());
            return fallback;
        }
        return string(key);
    }

    bool boolean(const std::string& key, bool fallback) {
        seen_.insert(key);
        if (!obj_.contains(key)) {
            diagnostics_.push_back("default applied: " + key + "=" + (fallback ? "true" : "false") + context());
            return fallback;
        }
        const json& v = obj_.at(key);
        if (!v.is_boolean()) throw ValidationError(key, key + " must be true or false" + context());
        return v.get<bool>();
    }

    long long integer(const std::string& key, std::optional<long long> fallback) {
        seen_.insert(key);
        if (!obj_.contains(key)) {
            if (!fallback) throw ValidationError(key, key + " is required" + context());
            diagnostics_.push_back("default applied: " + key + "=" + std::to_string(*fallback) + context());
            return *fallback;
        }
        const json& v = obj_.at(key);
        if (!v.is_number_integer()) throw ValidationError(key, key + " must be an integer" + context());
        return v.get<long long>();
    }

    void mark(const std::string& key) { seen_.insert(key); }

    void reject_unknown() const {
        for (const auto& [key, value] : obj_.items())
            if (!seen_.count(key)) throw ValidationError(key, "unknown field '" + key + "'" + context());
    }

private:
    double as_number(const json& v, const std::string& key) const {
        if (!v.is_number()) throw ValidationError(key, key + " must be a number" + context());
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ValidationError(key, key + " must be finite" + context());
        return d;
    }

    static std::string short_text(double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return buf;
    }

    std::string context() const { return where_.empty() ? "" : " (" + where_ + ")"; }

    const json& obj_;
    std::string where_;
    std::vector<std::string>& diagnostics_;
    std::set<std::string> seen_;
};

json series_or_scalar(const std::vector<double>& series, double scalar) {
    if (series.empty()) return scalar;
    return series;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json to_json(const sim::Scenario& s) {
    const PolicyConfig& p = s.policy;
    json policy = {
        {"mode", to_string(p.mode)},
        {"allocation_rule", to_string(p.allocation_rule)},
        {"gamma", p.gamma},
        {"benchmark", p.benchmark},
        {"benchmark_rule", to_string(p.benchmark_rule)},
        {"price_mode", to_string(p.price_mode)},
        {"price", p.price},
        {"penalty_rate", p.penalty_rate},
        {"horizon", p.horizon},
        {"tax_rate", p.tax_rate},
        {"credit_baseline", p.credit_baseline},
        {"credit_price", p.credit_price},
        {"clearing_bracket", {p.bracket_lo, p.bracket_hi}},
        {"banking", p.banking},
        {"tolerance", p.tolerance},
        {"kwh_per_allowance_unit", p.kwh_per_allowance_unit},
        {"co2_kg_per_kwh", p.co2_kg_per_kwh},
    };
    json companies = json::array();
    for (std::size_t i = 0; i < s.companies.size(); ++i) {
        const Company& c = s.companies[i];
        const sim::Schedule none;
        const sim::Schedule& sched = i < s.schedules.size() ? s.schedules[i] : none;
        companies.push_back({
            {"id", c.id},
            {"output", series_or_scalar(sched.output, c.output)},
            {"efficiency", series_or_scalar(sched.efficiency, c.efficiency)},
            {"assistance", c.assistance},
            {"historical", c.historical},
            {"loss_exponent", c.loss_exponent},
            {"cost_per_flop", c.cost_per_flop},
        });
    }
    return {{"seed", s.seed}, {"policy", policy}, {"companies", companies}};
}

ParsedScenario parse_scenario_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const std::size_t offset = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
        const auto before = text.substr(0, offset);
        const std::size_t line = 1 + static_cast<std::size_t>(std::count(before.begin(), before.end(), '\n'));
        const auto nl = before.rfind('\n');
        const std::size_t column = nl == std::string_view::npos ? offset + 1 : offset - nl;
        throw ParseError("scenario is not valid JSON at line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + e.what(),
                         line, column);
    }

    ParsedScenario out;
    auto& diag = out.diagnostics;
    sim::Scenario& s = out.scenario;

    ObjectReader root(doc, "", diag);
    const long long seed = root.integer("seed", 0);
    if (seed < 0) throw ValidationError("seed", "seed must be >= 0");
    s.seed = static_cast<std::uint64_t>(seed);
    root.mark("policy");
    root.mark("companies");
    root.reject_unknown();
    if (!doc.contains("policy")) throw ValidationError("policy", "policy is required");
    if (!doc.contains("companies") || !doc.at("companies").is_array())
        throw ValidationError("companies", "companies must be a JSON array");

    // Companies first: some policy defaults depend on them.
    bool any_schedule = false;
    std::size_t index = 0;
    for (const auto& cj : doc.at("companies")) {
        std::string where = "companies[" + std::to_string(index++) + "]";
        if (cj.is_object() && cj.contains("id") && cj.at("id").is_string())
            where = "company " + cj.at("id").get<std::string>();
        ObjectReader r(cj, where, diag);
        Company c;
        sim::Schedule sched;
        c.id = r.string("id");
        sched.output = r.number_or_series("output", 0.0, "output", c.output);
        sched.efficiency = r.number_or_series("efficiency", std::nullopt, "efficiency", c.efficiency);
        c.assistance = r.number("assistance", 1.0, "assistance");
        c.historical = r.number("historical", 0.0, "historical");
        c.loss_exponent = r.number("loss_exponent", 1.0, "k");
        c.cost_per_flop = r.number("cost_per_flop");
        r.reject_unknown();
        any_schedule = any_schedule || !sched.output.empty() || !sched.efficiency.empty();
        s.companies.push_back(std::move(c));
        s.schedules.push_back(std::move(sched));
    }
    if (!any_schedule) s.schedules.clear();

    ObjectReader pr(doc.at("policy"), "policy", diag);
    PolicyConfig& p = s.policy;
    p.mode = parse_governance_mode(pr.string("mode"));
    const long long horizon = pr.integer("horizon", std::nullopt);
    if (horizon < 1 || horizon > 100000) throw ValidationError("horizon", "horizon must be >= 1");
    p.horizon = static_cast<int>(horizon);
    p.allocation_rule = parse_allocation_rule(pr.string("allocation_rule", "benchmarking"));
    p.gamma = pr.number("gamma", 0.9, "gamma");
    p.benchmark_rule = parse_benchmark_rule(pr.string("benchmark_rule", "fixed"));
    p.benchmark = pr.number("benchmark", 1.0, "benchmark");
    p.price_mode = parse_price_mode(pr.string("price_mode", "exogenous"));

    pr.mark("clearing_bracket");
    if (pr.has("clearing_bracket")) {
        const json& b = doc.at("policy").at("clearing_bracket");
        if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number())
            throw ValidationError("clearing_bracket", "clearing_bracket must be [lo, hi]");
        p.bracket_lo = b[0].get<double>();
        p.bracket_hi = b[1].get<double>();
    } else {
        diag.push_back("default applied: clearing_bracket=[1e-06, 1] (policy)");
    }

    if (p.price_mode == PriceMode::exogenous)
        p.price = pr.number("price");
    else
        p.price = pr.number("price", 0.01, "price");

    double reference_price = p.price;
    if (p.price_mode == PriceMode::endogenous_clearing) reference_price = p.bracket_hi;
    if (p.price_mode == PriceMode::scaled_sqrt_a) {
        reference_price = 0.0;
        for (const auto& c : s.companies) reference_price = std::max(reference_price, std::sqrt(c.cost_per_flop));
    }
    p.penalty_rate = pr.number("penalty_rate", 10.0 * reference_price, "penalty_rate");

    if (p.mode == GovernanceMode::pigouvian)
        p.tax_rate = pr.number("tax_rate");
    else
        p.tax_rate = pr.number("tax_rate", 0.0, "tax_rate");
    if (p.mode == GovernanceMode::credit_program) {
        p.credit_baseline = pr.number("credit_baseline");
        p.credit_price = pr.number("credit_price", p.price, "credit_price");
    } else {
        p.credit_baseline = pr.number("credit_baseline", 0.0, "credit_baseline");
        p.credit_price = pr.number("credit_price", p.price, "credit_price");
    }
    p.banking = pr.boolean("banking", true);
    p.tolerance = pr.number("tolerance", kDefaultTolerance, "tolerance");
    p.kwh_per_allowance_unit = pr.number("kwh_per_allowance_unit", 1.0 / 3.6e6, "kwh_per_allowance_unit");
    p.co2_kg_per_kwh = pr.number("co2_kg_per_kwh", 0.81 * 0.45359237, "co2_kg_per_kwh");
    pr.reject_unknown();

    s = sim::validate_scenario(s);
    out.canonical = to_json(s).dump();
    out.config_hash = fnv1a64(out.canonical);
    return out;
}

ParsedScenario parse_scenario(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) throw IoError("cannot read scenario file " + path.string());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("cannot read scenario file " + path.string());
    return parse_scenario_text(buf.str());
}

}  // namespace aicap::io
