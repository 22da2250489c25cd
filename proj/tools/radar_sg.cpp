#include <iostream>
#include <string>

#include <CLI11.hpp>
#include "radarsg/cli.hpp"

int main(int argc, char** argv) {
    using namespace radarsg;
    CLI::App app{"Interference statistics and ranging performance of automotive radars on a road.", "radar-sg"};

    std::string command;
    std::string sweep;
    std::string grid;
    std::string lambda_grid;
    std::string format = "csv";
    cli::RunSpec spec;
    spec.mc_config.threads = 0;

    std::vector<std::string> names;
    for (const auto& [n, _] : cli::command_names()) names.push_back(n);
    app.add_option("command", command, "mean | cdf | ps | optimize | duty-cycle | mc | converge")
        ->required()
        ->check(CLI::IsMember(names));
    app.add_option("--scenario", spec.scenario_path, "Scenario JSON file")->required();
    app.add_option("--sweep", sweep, "Scenario sweep name:from:to:points[:log]");
    app.add_option("--grid", grid,
                   "Command axis from:to:points[:log]: x [W] for cdf, R [m] for ps and optimize, n for duty-cycle");
    app.add_option("--lambda-grid", lambda_grid, "lambda_I [1/m] axis of the optimize surface");
    app.add_flag("--mc", spec.mc, "Add Monte Carlo columns to mean, cdf and ps");
    app.add_option("--replicates", spec.mc_config.replicates, "Monte Carlo replicates")->capture_default_str();
    app.add_option("--seed", spec.mc_config.master_seed, "Monte Carlo master seed")->capture_default_str();
    app.add_option("--threads", spec.mc_config.threads, "Worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--window", spec.mc_config.window, "Monte Carlo observation window [m]")->capture_default_str();
    app.add_option("--out", spec.output_path, "Output file, '-' for stdout")->required();
    app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--dump", spec.dump_path, "Write raw Monte Carlo samples (little-endian float64)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << cli::error_json("usage_error", "", e.what()) << '\n';
        return 2;
    }

    try {
        spec.command = cli::parse_command(command);
        spec.format = format == "json" ? cli::Format::Json : cli::Format::Csv;
        if (!sweep.empty()) spec.sweep = cli::parse_sweep(sweep);
        if (!grid.empty()) spec.grid = cli::parse_axis(grid, "grid");
        if (!lambda_grid.empty()) spec.lambda_grid = cli::parse_axis(lambda_grid, "lambda_grid");
    } catch (const InvariantError& e) {
        std::cerr << cli::error_json(dynamic_cast<const SchemaError*>(&e) ? "schema_error" : "invariant_error",
                                     e.field(), e.what())
                  << '\n';
        return 2;
    }
    return cli::run(spec);
}
