#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aicap/commands.hpp"

int main(int argc, char** argv) {
    using namespace aicap;

    CLI::App app{"AI cap-and-trade simulator"};
    app.set_version_flag("--version", cli::kToolVersion);
    app.require_subcommand(1);

    std::string scenario;
    std::string out_dir = "out";
    auto* run = app.add_subcommand("run", "Simulate a scenario over its horizon");
    run->add_option("--scenario", scenario, "Scenario JSON file")->required();
    run->add_option("--out", out_dir, "Output directory");

    std::string figure;
    std::optional<double> k, b, grid_min, grid_max;
    std::optional<int> grid_points;
    auto* sweep = app.add_subcommand("sweep", "Write a figure dataset");
    sweep->add_option("--figure", figure, "fig1a, fig1b, fig2a or fig2b")->required();
    sweep->add_option("--out", out_dir, "Output directory");
    sweep->add_option("--k", k, "Loss exponent");
    sweep->add_option("--b", b, "Buy/sell price (ignored by fig1b)");
    sweep->add_option("--grid-min", grid_min, "Lower grid bound");
    sweep->add_option("--grid-max", grid_max, "Upper grid bound");
    sweep->add_option("--grid-points", grid_points, "Number of grid points");

    long long sample = 1000;
    std::uint64_t seed = 42;
    auto* verify = app.add_subcommand("verify", "Check closed forms against the grid oracle and KKT conditions");
    verify->add_option("--sample", sample, "Number of random parameter draws");
    verify->add_option("--seed", seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kExitValidation;
    }

    if (*run) return cli::cmd_run(scenario, out_dir, std::cout, std::cerr);

    if (*sweep) {
        sim::Figure fig;
        try {
            fig = sim::parse_figure(figure);
        } catch (const ValidationError& e) {
            std::cerr << cli::error_line(cli::kExitValidation, "validation", e.field(), e.what());
            return cli::kExitValidation;
        }
        sim::SweepOptions opts = sim::default_sweep_options(fig);
        if (k) opts.k = *k;
        if (b) opts.b = *b;
        if (grid_min) opts.grid_min = *grid_min;
        if (grid_max) opts.grid_max = *grid_max;
        if (grid_points) opts.grid_points = *grid_points;
        return cli::cmd_sweep(fig, opts, out_dir, std::cout, std::cerr);
    }

    cli::VerifyOptions opts;
    opts.sample_size = sample;
    opts.seed = seed;
    return cli::cmd_verify(opts, std::cout, std::cerr);
}
