#include "aicap/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "aicap/equilibrium.hpp"
#include "aicap/market.hpp"
#include "aicap/scenario_io.hpp"

namespace aicap::cli {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io::IoError("cannot open " + path.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw io::IoError("failed writing " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw io::IoError("cannot create output directory " + dir.string());
}

std::string manifest_json(const RunManifest& m) {
    const nlohmann::json j = {{"scenario", m.scenario_path}, {"command", m.command}, {"output_dir", m.output_dir},
                              {"tool_version", m.tool_version}, {"config_hash", m.config_hash}};
    return j.dump(2) + "\n";
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

template <typename Body>
int guarded(std::ostream& err, Body body) {
    try {
        return body();
    } catch (const io::ParseError& e) {
        err << error_line(kExitValidation, "parse", "line " + std::to_string(e.line()) + ":" + std::to_string(e.column()),
                          e.what());
        return kExitValidation;
    } catch (const ValidationError& e) {
        err << error_line(kExitValidation, "validation", e.field(), e.what());
        return kExitValidation;
    } catch (const market::ClearingError& e) {
        err << error_line(kExitClearing, "clearing", "price", e.what());
        return kExitClearing;
    } catch (const io::IoError& e) {
        err << error_line(kExitIo, "io", "path", e.what());
        return kExitIo;
    }
}

double relative(double value, double reference) { return std::abs(value - reference) / std::abs(reference); }

std::string tuple_text(double k, double a, double b, double flops) {
    std::ostringstream s;
    s.precision(17);
    s << "k=" << k << " a=" << a << " b=" << b << " F=" << flops;
    return s.str();
}

}  // namespace

std::string format_number(double v) {
    if (v == 0.0) return "0";  // folds -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string header_comment(const RunManifest& m) {
    return "# aicap " + m.tool_version + " command=" + m.command + " config_hash=" + m.config_hash + "\n";
}

std::string error_line(int code, const std::string& kind, const std::string& field, const std::string& message) {
    return "error code=" + std::to_string(code) + " kind=" + kind + " field=" + quote(field) + " message=" +
           quote(message) + "\n";
}

std::string years_csv(const std::vector<YearReport>& years, const RunManifest& m) {
    std::string out = header_comment(m);
    out += "year,company,allocated,banked_in,flops_allowed,x_star,y_star,banked_out,penalty,utility,energy,co2_kg,"
           "clearing_price\n";
    for (const auto& y : years) {
        for (const auto& r : y.rows) {
            out += std::to_string(y.year) + "," + r.company;
            for (double v : {r.allocated, r.banked_in, r.flops_allowed, r.x_star, r.y_star, r.banked_out, r.penalty,
                             r.utility, r.energy, r.co2_kg, r.price})
                out += "," + format_number(v);
            out += "\n";
        }
    }
    return out;
}

std::string trades_csv(const TradeLedger& ledger, const RunManifest& m) {
    std::string out = header_comment(m);
    out += "year,seller,buyer,quantity,seller_flops,buyer_flops,price\n";
    for (const auto& e : ledger.entries()) {
        out += std::to_string(e.year) + "," + e.seller + "," + e.buyer;
        for (double v : {e.quantity, e.seller_flops, e.buyer_flops, e.price}) out += "," + format_number(v);
        out += "\n";
    }
    return out;
}

std::string summary_csv(const std::vector<YearReport>& years, const RunManifest& m) {
    std::string out = header_comment(m);
    out += "year,benchmark,total_allocated,total_banked_in,total_banked_out,total_flops,total_energy,total_co2_kg,"
           "total_penalty,total_utility,violations,unmatched_net,credits_minted,clearing_price\n";
    for (const auto& y : years) {
        out += std::to_string(y.year);
        for (double v : {y.benchmark, y.total_allocated(), y.total_banked_in(), y.total_banked_out(), y.total_flops(),
                         y.total_used_allowances(), y.total_co2_kg(), y.total_penalty(), y.total_utility()})
            out += "," + format_number(v);
        out += "," + std::to_string(y.violation_count());
        out += "," + format_number(y.unmatched_net) + "," + format_number(y.credits_minted) + ",";
        if (y.clearing_price) out += format_number(*y.clearing_price);
        out += "\n";
    }
    return out;
}

std::string sweep_csv(const sim::SweepResult& result, const RunManifest& m) {
    std::string out = header_comment(m);
    for (const auto& r : result.rows)
        if (r.crossover) out += "# crossover axis_value=" + format_number(r.axis_value) + "\n";
    out += "axis_value,x_base,x_ct,u_base,u_ct,b\n";
    for (const auto& r : result.rows) {
        out += format_number(r.axis_value);
        for (double v : {r.x_base, r.x_ct, r.u_base, r.u_ct, r.b}) out += "," + format_number(v);
        out += "\n";
    }
    return out;
}

int cmd_run(const std::filesystem::path& scenario, const std::filesystem::path& out_dir, std::ostream& out,
            std::ostream& err) {
    return guarded(err, [&] {
        const io::ParsedScenario parsed = io::parse_scenario(scenario);
        for (const auto& d : parsed.diagnostics) err << d << "\n";

        RunManifest m;
        m.scenario_path = scenario.string();
        m.command = "run";
        m.output_dir = out_dir.string();
        m.config_hash = io::hex64(parsed.config_hash);

        const sim::HorizonResult result = sim::run_horizon(parsed.scenario);

        ensure_dir(out_dir);
        write_file(out_dir / "years.csv", years_csv(result.years, m));
        write_file(out_dir / "trades.csv", trades_csv(result.trades, m));
        write_file(out_dir / "summary.csv", summary_csv(result.years, m));
        write_file(out_dir / "manifest.json", manifest_json(m));
        out << "wrote " << result.years.size() << " year(s) to " << out_dir.string() << "\n";
        return static_cast<int>(kExitOk);
    });
}

int cmd_sweep(sim::Figure figure, const sim::SweepOptions& options, const std::filesystem::path& out_dir,
              std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const sim::SweepResult result = sim::sweep(figure, options);

        const nlohmann::json config = {{"figure", sim::to_string(figure)}, {"grid_min", options.grid_min},
                                       {"grid_max", options.grid_max}, {"grid_points", options.grid_points},
                                       {"k", options.k},               {"b", options.b}};
        RunManifest m;
        m.command = "sweep";
        m.output_dir = out_dir.string();
        m.config_hash = io::hex64(io::fnv1a64(config.dump()));

        ensure_dir(out_dir);
        const auto path = out_dir / (sim::to_string(figure) + ".csv");
        write_file(path, sweep_csv(result, m));
        out << "wrote " << result.rows.size() << " rows to " << path.string() << "\n";
        if (result.crossover) out << "crossover F=" << format_number(*result.crossover) << "\n";
        return static_cast<int>(kExitOk);
    });
}

VerifyReport verify_equilibria(const VerifyOptions& options) {
    if (options.sample_size < 1) throw ValidationError("sample", "sample size must be >= 1");
    const CapTradeSolver cap_and_trade = options.cap_and_trade ? options.cap_and_trade : equilibrium::solve_cap_and_trade;
    const BaselineSolver no_governance = options.no_governance ? options.no_governance : equilibrium::solve_no_governance;

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> k_dist(0.25, 4.0);
    std::uniform_real_distribution<double> log_price(std::log(1e-4), std::log(1.0));
    std::uniform_real_distribution<double> f_dist(0.0, 20.0);

    VerifyReport rep;
    auto fail = [&](const std::string& what, double k, double a, double b, double flops) {
        if (rep.passed) rep.failure = what + " at " + tuple_text(k, a, b, flops);
        rep.passed = false;
    };

    for (long long i = 0; i < options.sample_size; ++i) {
        const double k = k_dist(rng);
        const double a = std::exp(log_price(rng));
        const double b = std::exp(log_price(rng));
        const double flops = f_dist(rng);
        ++rep.draws;

        const auto base = no_governance(k, a);
        const auto base_oracle = equilibrium::grid_oracle(k, a, b, flops, equilibrium::OracleMode::no_governance);
        const double rel_base = relative(base_oracle.x_star, base.x_star);
        rep.worst_oracle_rel_baseline = std::max(rep.worst_oracle_rel_baseline, rel_base);
        if (!(rel_base < options.oracle_tolerance)) fail("baseline oracle mismatch", k, a, b, flops);

        const auto ct = cap_and_trade(k, a, b, flops);
        const auto ct_oracle = equilibrium::grid_oracle(k, a, b, flops, equilibrium::OracleMode::cap_and_trade);
        const double rel_ct = relative(ct_oracle.x_star, ct.x_star);
        rep.worst_oracle_rel_cap_trade = std::max(rep.worst_oracle_rel_cap_trade, rel_ct);
        if (!(rel_ct < options.oracle_tolerance)) fail("cap-and-trade oracle mismatch", k, a, b, flops);

        const double kkt = equilibrium::kkt_residuals(ct, k, a, b, flops).max();
        rep.worst_kkt = std::max(rep.worst_kkt, kkt);
        if (!(kkt < options.kkt_tolerance)) fail("KKT residual above tolerance", k, a, b, flops);

        if (!(ct.x_star < base.x_star)) {
            ++rep.fewer_flops_violations;
            fail("cap-and-trade usage not below baseline usage", k, a, b, flops);
        }
    }

    std::uniform_real_distribution<double> log_x(std::log(0.5), std::log(50.0));
    std::uniform_real_distribution<double> y_dist(-10.0, 10.0);
    constexpr double h = 1e-6;
    for (int i = 0; i < options.gradient_points; ++i) {
        const double k = k_dist(rng);
        const double a = std::exp(log_price(rng));
        const double b = std::exp(log_price(rng));
        const double x = std::exp(log_x(rng));
        const double y = y_dist(rng);
        auto u = [&](double xx, double yy) { return equilibrium::utility_cap_and_trade(xx, yy, k, a, b); };
        const auto g = equilibrium::utility_cap_and_trade_gradient(x, y, k, a, b);
        const double fd_x = (u(x + h, y) - u(x - h, y)) / (2.0 * h);
        const double fd_y = (u(x, y + h) - u(x, y - h)) / (2.0 * h);
        // Components near zero are compared on a 1e-3 floor.
        const double rel = std::max(std::abs(fd_x - g.dx) / std::max(std::abs(g.dx), 1e-3),
                                    std::abs(fd_y - g.dy) / std::max(std::abs(g.dy), 1e-3));
        rep.worst_gradient_rel = std::max(rep.worst_gradient_rel, rel);
        if (!(rel < options.gradient_tolerance)) fail("gradient mismatch at x=" + format_number(x) + " y=" + format_number(y), k, a, b, 0.0);
    }
    return rep;
}

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const VerifyReport rep = verify_equilibria(options);
        out << "draws=" << rep.draws << "\n"
            << "worst_oracle_rel_baseline=" << format_number(rep.worst_oracle_rel_baseline) << "\n"
            << "worst_oracle_rel_cap_trade=" << format_number(rep.worst_oracle_rel_cap_trade) << "\n"
            << "worst_kkt_residual=" << format_number(rep.worst_kkt) << "\n"
            << "worst_gradient_rel=" << format_number(rep.worst_gradient_rel) << "\n"
            << "fewer_flops_violations=" << rep.fewer_flops_violations << "\n";
        if (!rep.passed) {
            err << error_line(kExitVerification, "verification", "equilibrium", rep.failure);
            return static_cast<int>(kExitVerification);
        }
        out << "verification passed\n";
        return static_cast<int>(kExitOk);
    });
}

}  // namespace aicap::cli
