#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "magshield/cutoff_ladder.hpp"
#include "magshield/param_ledger.hpp"
#include "magshield/scenario.hpp"
#include "magshield/sweep.hpp"

namespace {

using namespace magshield;

int cmd_run(const std::string& config_path) {
    const RunManifest m = run_scenario(config_path);
    std::cout << "run " << m.run_id << ": " << m.status << "\n"
              << "  steps: " << m.steps << ", wall seconds: " << m.wall_seconds << "\n"
              << "  shield condition: " << (m.shield_condition ? "holds" : "violated")
              << "\n"
              << "  min x1: " << m.min_x1_overall
              << ", max speed: " << m.max_speed_overall << "\n"
              << "  energy drift: " << m.energy_drift
              << ", shield residual max: " << m.shield_residual_max << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<double>& mu,
              const std::vector<double>& tau, int repeats) {
    SweepSpec spec;
    spec.base = parse_scenario_file(config_path);
    spec.mu_values = mu.empty() ? std::vector<double>{spec.base.field.mu} : mu;
    spec.tau_values = tau.empty() ? std::vector<double>{spec.base.field.tau} : tau;
    spec.repeats = repeats;
    const SweepSummary summary = run_sweep(spec);
    std::cout << "sweep " << summary.sweep_id << " -> " << summary.directory << "\n"
              << "mu tau shield confined_fraction min_x1_median\n";
    for (const auto& c : summary.cells)
        std::cout << c.mu << " " << c.tau << " " << (c.shield_condition ? "yes" : "no")
                  << " " << c.confined_fraction << " " << c.min_x1_median << "\n";
    return 0;
}

int cmd_ledger(const std::string& mu, const std::string& tau, const std::string& gamma,
               const std::string& c6, const std::string& vmax, bool as_json) {
    LedgerInput input;
    input.mu = parse_rational(mu);
    input.tau = parse_rational(tau);
    if (!gamma.empty()) input.gamma = parse_rational(gamma);
    if (!c6.empty()) input.c6 = parse_rational(c6);
    if (!vmax.empty()) input.vmax = parse_rational(vmax);
    LedgerReport report = compute_intervals(input);
    if (report.feasible) {
        try {
            ladder_schedule(input, report);
        } catch (const DegenerateLadder& e) {
            std::cerr << "ladder: " << e.what() << "\n";
        }
    }
    std::cout << (as_json ? report.to_json() + "\n" : report.format());
    return report.feasible ? 0 : 2;
}

int cmd_plot(const std::string& id, const std::string& kind, const std::string& root) {
    std::cout << emit_plot_data(root, id, kind) << "\n";
    return 0;
}

int cmd_pair(const std::string& config_path, const std::vector<double>& cutoffs,
             bool sigma_units) {
    if (cutoffs.size() < 2)
        throw ConfigError("pair: need at least two --cutoffs values");
    const ScenarioConfig cfg = parse_scenario_file(config_path);
    PairSetup setup;
    setup.datum = cfg.datum;
    setup.particle_count = cfg.particle_count;
    setup.field = cfg.field;
    setup.solver = cfg.solver;
    if (setup.solver.softening < 0.0)
        setup.solver.softening =
            0.1 * std::cbrt(cfg.datum.support_box.volume() / cfg.particle_count);
    setup.stepper = cfg.stepper;
    setup.record_cadence = cfg.record_cadence;

    const double sigma = std::sqrt(0.5 / cfg.datum.lambda);
    std::vector<ConvergencePair> pairs;
    for (double n : cutoffs) {
        const double cutoff = sigma_units ? n * sigma : n;
        pairs.push_back(run_pair(setup, cutoff, cfg.seed));
        std::cout << "cutoff " << cutoff << ": sup_sigma = " << pairs.back().sup_sigma
                  << " (shell " << pairs.back().shell_count << " particles)\n";
    }
    const ConvergenceTable table = convergence_report(pairs);
    std::cout << table.format();

    const std::string root = output_root_for(cfg);
    std::filesystem::create_directories(root);
    std::ofstream out(std::filesystem::path(root) / "pair_series.jsonl");
    for (const auto& p : pairs)
        for (std::size_t i = 0; i < p.times.size(); ++i)
            out << "{\"cutoff_n\":" << p.cutoff_n << ",\"t\":" << p.times[i]
                << ",\"delta\":" << p.delta_series[i] << ",\"eta\":" << p.eta_series[i]
                << ",\"sigma\":" << p.sigma_series[i] << "}\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Half-space plasma runs behind a singular magnetic mirror"};
    app.require_subcommand(1);

    std::string config_path, id, kind = "timeseries", root = "runs";
    std::string mu_s, tau_s, gamma_s, c6_s, vmax_s;
    std::vector<double> mu_list, tau_list, cutoff_list;
    int repeats = 1;
    bool as_json = false, sigma_units = false;

    auto* run = app.add_subcommand("run", "Execute one scenario config");
    run->add_option("config", config_path, "scenario config file")->required();

    auto* sweep = app.add_subcommand("sweep", "Grid of (mu, tau) runs");
    sweep->add_option("config", config_path, "base scenario config")->required();
    sweep->add_option("--mu", mu_list, "mu values")->delimiter(',');
    sweep->add_option("--tau", tau_list, "tau values")->delimiter(',');
    sweep->add_option("--repeats", repeats, "repeats per cell");

    auto* ledger = app.add_subcommand("ledger", "Exact parameter feasibility report");
    ledger->add_option("--mu", mu_s, "mu (rational or decimal)")->required();
    ledger->add_option("--tau", tau_s, "tau (rational or decimal)")->required();
    ledger->add_option("--gamma", gamma_s, "gamma in (0, 2/3), default 3/5");
    ledger->add_option("--c6", c6_s, "field-bound constant, default 1");
    ledger->add_option("--vmax", vmax_s, "speed scale for the window schedule");
    ledger->add_flag("--json", as_json, "emit JSON instead of text");

    auto* plot = app.add_subcommand("plot", "Emit plot-ready columns for a run or sweep");
    plot->add_option("id", id, "run or sweep id")->required();
    plot->add_option("--kind", kind, "timeseries|tail|ladder|frontier");
    plot->add_option("--root", root, "output root to search");

    auto* pair = app.add_subcommand("pair", "Matched runs at cutoffs N and N+1");
    pair->add_option("config", config_path, "base scenario config")->required();
    pair->add_option("--cutoffs", cutoff_list, "cutoff values")->delimiter(',')->required();
    pair->add_flag("--sigma-units", sigma_units,
                   "interpret cutoffs as multiples of sqrt(1/(2 lambda))");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path);
        if (sweep->parsed()) return cmd_sweep(config_path, mu_list, tau_list, repeats);
        if (ledger->parsed())
            return cmd_ledger(mu_s, tau_s, gamma_s, c6_s, vmax_s, as_json);
        if (plot->parsed()) return cmd_plot(id, kind, root);
        if (pair->parsed()) return cmd_pair(config_path, cutoff_list, sigma_units);
    } catch (const magshield::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const magshield::InfeasibleInput& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
