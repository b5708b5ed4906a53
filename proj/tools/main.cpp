#include "ddehopf/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace ddehopf;
using namespace ddehopf::cli;

namespace {

struct Flags
{
    std::string config;
    std::string model;
    std::string guess;
    std::string scan_lam;
    std::string scan_mu;
    std::string lam_range;
    std::string omega_range;
    std::string history;
    std::optional<double> tau;
    std::optional<double> mu;
    std::optional<double> lam;
    std::optional<double> step;
    std::optional<double> transient;
    std::optional<double> record;
    std::optional<double> perturbation;
    std::optional<double> threshold;
    std::optional<double> settle_max;
    std::optional<double> tol;
    std::optional<int> points;
    std::optional<int> scan_points;
    std::optional<int> workers;
    std::string out;
    bool no_header = false;
};

void add_common(CLI::App* app, Flags& f)
{
    app->add_option("--config", f.config, "Config file; flags override its values");
    app->add_option("--model", f.model, "Built-in model (sis-inverse, sis-exp) or model file path");
    app->add_option("--tau", f.tau, "Delay override");
    app->add_option("--out", f.out, "Output file (default: stdout)");
    app->add_flag("--no-header", f.no_header, "Omit the timestamped comment line");
}

void add_sim(CLI::App* app, Flags& f)
{
    app->add_option("--step", f.step, "Integration step, tau/N with N >= 50 (default 0.05)");
    app->add_option("--transient", f.transient, "Transient time discarded (default 2000)");
    app->add_option("--record", f.record, "Record window length (default 500)");
    app->add_option("--perturbation", f.perturbation, "Offset of the history from the equilibrium (default 1e-3)");
    app->add_option("--history", f.history, "Constant history value instead of equilibrium + perturbation");
    app->add_option("--threshold", f.threshold, "Amplitude below which a window counts as equilibrium (1e-6)");
    app->add_option("--settle-max", f.settle_max, "Extra time for windows still shrinking (default 1.5e6, 0 = off)");
}

RunConfig build(Flags const& f, std::string_view command)
{
    RunConfig cfg;
    if (!f.config.empty())
        load_config(f.config, cfg, command);
    if (!f.model.empty())
    {
        cfg.model = f.model;
        cfg.inline_model.reset();
    }
    if (f.tau)
        cfg.tau = f.tau;
    if (!f.guess.empty())
        cfg.guess = parse_pair(f.guess);
    if (!f.scan_lam.empty())
        cfg.scan_lam = parse_range(f.scan_lam, false);
    if (!f.scan_mu.empty())
        cfg.scan_mu = parse_range(f.scan_mu, false);
    if (f.scan_points)
        cfg.scan_points = *f.scan_points;
    if (f.mu)
        cfg.mu = f.mu;
    if (f.lam)
        cfg.lam = f.lam;
    if (!f.lam_range.empty())
        cfg.lam_range = parse_range(f.lam_range, true);
    if (!f.omega_range.empty())
        cfg.omega_range = parse_range(f.omega_range, false);
    if (f.points)
        cfg.points = *f.points;
    if (f.step)
        cfg.sim.step = *f.step;
    if (f.transient)
        cfg.sim.t_transient = *f.transient;
    if (f.record)
        cfg.sim.t_record = *f.record;
    if (f.perturbation)
        cfg.sim.history = EquilibriumHistory{*f.perturbation};
    if (!f.history.empty())
        cfg.sim.history = ConstantHistory{parse_number(f.history, "--history")};
    if (f.threshold)
        cfg.sim.amplitude_threshold = *f.threshold;
    if (f.settle_max)
        cfg.sim.settle_max = *f.settle_max;
    if (f.tol)
        cfg.tolerance = f.tol;
    if (f.workers)
        cfg.workers = *f.workers;
    if (!f.out.empty())
        cfg.out = f.out;
    if (f.no_header)
        cfg.no_header = true;
    return cfg;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Degenerate Hopf bifurcation analysis for scalar delay differential equations"};
    app.require_subcommand(1);
    Flags f;

    auto* analyze = app.add_subcommand("analyze", "Locate and classify the degenerate Hopf point");
    add_common(analyze, f);
    analyze->add_option("--guess", f.guess, "Initial guess lam,mu");
    analyze->add_option("--scan-lam", f.scan_lam, "lam window lo:hi for an automatic guess");
    analyze->add_option("--scan-mu", f.scan_mu, "mu window lo:hi for an automatic guess");
    analyze->add_option("--scan-points", f.scan_points, "Grid points per scan axis (default 40)");

    auto* curve = app.add_subcommand("hopf-curve", "Trace the Hopf curve (omega, alpha, beta) as CSV");
    add_common(curve, f);
    curve->add_option("--omega-range", f.omega_range, "omega window lo:hi (interior points are traced)");
    curve->add_option("--points", f.points, "Number of points (default 100)");

    auto* sweep_cmd = app.add_subcommand("sweep", "Simulate over a lam grid at fixed mu and emit CSV");
    add_common(sweep_cmd, f);
    add_sim(sweep_cmd, f);
    sweep_cmd->add_option("--mu", f.mu, "Fixed mu");
    sweep_cmd->add_option("--lam-range", f.lam_range, "lam grid lo:hi:step");
    sweep_cmd->add_option("--workers", f.workers, "Worker threads (default: logical cores)");

    auto* simulate = app.add_subcommand("simulate", "Integrate one parameter point and emit the trajectory");
    add_common(simulate, f);
    add_sim(simulate, f);
    simulate->add_option("--lam", f.lam, "lam");
    simulate->add_option("--mu", f.mu, "mu");

    auto* verify = app.add_subcommand("verify", "Run the oracle cross-checks");
    verify->add_option("--config", f.config, "Config file");
    verify->add_option("--tol", f.tol, "Override every check tolerance");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(kUsage);
    }

    auto* const active = app.get_subcommands().front();
    std::string const command = active->get_name();
    RunConfig cfg;
    try
    {
        cfg = build(f, command);
    }
    catch (Error const& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    }

    if (command == "analyze")
        return cmd_analyze(cfg, std::cout, std::cerr);
    if (command == "hopf-curve")
        return cmd_hopf_curve(cfg, std::cout, std::cerr);
    if (command == "sweep")
        return cmd_sweep(cfg, std::cout, std::cerr);
    if (command == "simulate")
        return cmd_simulate(cfg, std::cout, std::cerr);
    return cmd_verify(cfg, std::cout, std::cerr);
}
