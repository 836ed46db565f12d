// d2dec command line: analytic EC, sweeps, Monte Carlo estimation and the
// optimal-rate search, emitting CSV or JSON tables.
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "d2dec/effective_capacity.hpp"
#include "d2dec/errors.hpp"
#include "d2dec/experiment.hpp"
#include "d2dec/monte_carlo.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> scenario;
    std::optional<unsigned> threads;
    bool paper_literal = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "Config file (key = value lines)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opts.out_path, "Output path (default: stdout)");
    cmd->add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", opts.seed, "Override master_seed");
    cmd->add_option("--scenario", opts.scenario, "Override scenario kind")
        ->check(CLI::IsMember({"overlay", "underlay"}));
    cmd->add_option("--threads", opts.threads, "Worker threads for Monte Carlo paths");
    cmd->add_flag("--paper-literal-threshold", opts.paper_literal,
                  "Reuse the single-slot SNR threshold for the cellular mode");
}

d2dec::ExperimentConfig build_config(const CommonOpts& opts) {
    d2dec::ExperimentConfig cfg;
    if (!opts.config_path.empty())
        cfg = d2dec::load_config(opts.config_path);
    if (opts.seed)
        cfg.master_seed = *opts.seed;
    if (opts.scenario)
        cfg.kind = *opts.scenario == "overlay" ? d2dec::ScenarioKind::overlay
                                               : d2dec::ScenarioKind::underlay;
    if (opts.threads)
        cfg.threads = *opts.threads;
    if (opts.paper_literal)
        cfg.paper_literal_threshold = true;
    d2dec::validate(cfg);
    return cfg;
}

void write_output(const CommonOpts& opts, const std::vector<d2dec::SweepBlock>& blocks,
                  const d2dec::ExperimentConfig& cfg) {
    d2dec::EmitMeta meta;
    meta.config_hash = d2dec::config_hash(cfg);
    meta.master_seed = cfg.master_seed;

    std::ostringstream body;
    if (opts.format == "json")
        d2dec::emit_json(body, blocks, meta);
    else
        d2dec::emit_csv(body, blocks, meta);

    if (opts.out_path.empty()) {
        std::cout << body.str();
        return;
    }
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out)
        throw d2dec::IoError("cannot open output file '" + opts.out_path + "'");
    out << body.str();
    if (!out)
        throw d2dec::IoError("write failed for '" + opts.out_path + "'");
}

d2dec::OutputRow point_row(const d2dec::ExperimentConfig& cfg, const d2dec::SystemParams& sys,
                           double theta, double rate) {
    const auto diag = d2dec::mode_select_diagnostics(sys.mode_select);
    d2dec::OutputRow row;
    row.sweep_var = "rate";
    row.sweep_value = rate;
    row.kind = sys.kind;
    row.theta = theta;
    row.p_e1 = diag.p_e1;
    row.p_e2 = diag.p_e2;
    row.kld = diag.kld;
    row.seed = cfg.master_seed;
    return row;
}

int run_analytic(const CommonOpts& opts, double rate_override, double theta_override) {
    auto cfg = build_config(opts);
    const auto sys = d2dec::make_system(cfg);
    const double theta = theta_override > 0 ? theta_override : cfg.thetas.front();
    const double rate = rate_override >= 0 ? rate_override : cfg.rate;

    const auto ec = d2dec::analytic_ec(sys, theta, rate);
    auto row = point_row(cfg, sys, theta, rate);
    row.ec_analytic = ec.ec;
    row.p1 = ec.probs.p1;
    row.p2 = ec.probs.p2;
    row.p3 = ec.probs.p3;
    row.p4 = ec.probs.p4;
    write_output(opts, {{theta, {row}}}, cfg);
    return 0;
}

int run_simulate(const CommonOpts& opts, double rate_override, double theta_override,
                 std::optional<std::size_t> paths, std::optional<std::size_t> slots) {
    auto cfg = build_config(opts);
    const auto sys = d2dec::make_system(cfg);
    const double theta = theta_override > 0 ? theta_override : cfg.thetas.front();
    const double rate = rate_override >= 0 ? rate_override : cfg.rate;

    d2dec::SimOptions sim;
    sim.n_paths = paths.value_or(cfg.mc.n_paths);
    sim.path_len = slots.value_or(cfg.mc.path_len);
    sim.threads = cfg.threads;
    sim.underlay_with_noise = cfg.mc.underlay_with_noise;
    const auto est = d2dec::simulate_paths(sys, rate, theta, cfg.master_seed, sim);

    auto row = point_row(cfg, sys, theta, rate);
    const auto probs = d2dec::transition_probs(
        d2dec::decision_marginals(sys.mode_select.prior_h0, sys.mode_select.prior_h1,
                                  sys.mode_select.m_t, sys.mode_select.sigma_t,
                                  sys.mode_select.eta),
        d2dec::on_probs(sys, rate));
    row.p1 = probs.p1;
    row.p2 = probs.p2;
    row.p3 = probs.p3;
    row.p4 = probs.p4;
    row.ec_mc = est.ec_hat;
    row.ec_mc_stderr = est.std_err;
    write_output(opts, {{theta, {row}}}, cfg);
    return 0;
}

int run_sweep_cmd(const CommonOpts& opts) {
    auto cfg = build_config(opts);
    write_output(opts, d2dec::run_sweep(cfg), cfg);
    return 0;
}

int run_optrate(const CommonOpts& opts) {
    auto cfg = build_config(opts);
    // The search is a rate sweep over the configured grid; Monte Carlo is
    // skipped since the maximization is analytic.
    const auto n = static_cast<int>(
        (cfg.rate_grid.r_max - cfg.rate_grid.r_min) / cfg.rate_grid.r_step + 1e-9);
    cfg.sweep.variable = d2dec::SweepVariable::rate;
    cfg.sweep.from = cfg.rate_grid.r_min;
    cfg.sweep.to = cfg.rate_grid.r_min + n * cfg.rate_grid.r_step;
    cfg.sweep.steps = n + 1;
    cfg.mc.enabled = false;
    d2dec::validate(cfg);

    const auto blocks = d2dec::run_sweep(cfg);
    for (const auto& block : blocks) {
        double best_ec = 0.0;
        for (const auto& row : block.rows)
            if (row.r_star && row.sweep_value == *row.r_star)
                best_ec = row.ec_analytic.value_or(0.0);
        std::cerr << "theta=" << block.theta
                  << " r_star=" << (block.rows.empty() ? 0.0 : *block.rows.front().r_star)
                  << " ec_star=" << best_ec << "\n";
    }
    write_output(opts, blocks, cfg);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Effective capacity of a D2D link under pathloss-based mode selection"};
    app.require_subcommand(1);

    CommonOpts opts;
    double rate_override = -1.0;
    double theta_override = -1.0;
    std::optional<std::size_t> paths;
    std::optional<std::size_t> slots;

    auto* analytic = app.add_subcommand("analytic", "Closed-form EC at a single point");
    add_common(analytic, opts);
    analytic->add_option("--rate", rate_override, "Rate override, bits/s");
    analytic->add_option("--theta", theta_override, "QoS exponent override, 1/bits");

    auto* sweep = app.add_subcommand("sweep", "Sweep sigma_t, theta, rate or p_e1");
    add_common(sweep, opts);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo EC estimate");
    add_common(simulate, opts);
    simulate->add_option("--rate", rate_override, "Rate override, bits/s");
    simulate->add_option("--theta", theta_override, "QoS exponent override, 1/bits");
    simulate->add_option("--paths", paths, "Number of sample paths");
    simulate->add_option("--slots", slots, "Slots per path");

    auto* optrate = app.add_subcommand("optrate", "Exhaustive EC-maximizing rate search");
    add_common(optrate, opts);

    try {
        app.parse(argc, argv);
        if (analytic->parsed())
            return run_analytic(opts, rate_override, theta_override);
        if (sweep->parsed())
            return run_sweep_cmd(opts);
        if (simulate->parsed())
            return run_simulate(opts, rate_override, theta_override, paths, slots);
        return run_optrate(opts);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const d2dec::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const d2dec::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
