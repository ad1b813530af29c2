#include "cbrisk_cli/app.h"

#include <cstdio>
#include <numbers>
#include <optional>

#include <CLI11.hpp>

#include "cbrisk/errors.h"
#include "cbrisk/faults.h"
#include "cbrisk/network.h"
#include "cbrisk/powerflow.h"
#include "cbrisk/ranking.h"
#include "cbrisk/report.h"
#include "cbrisk/sampling.h"
#include "cbrisk/scenario.h"
#include "cbrisk/simulation.h"

namespace cbrisk::cli {

namespace {

struct InputArgs {
    std::string system_path;
    std::string dyn_path;
};

struct CampaignArgs {
    InputArgs input;
    std::string config_path;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::string out_stem;
    unsigned threads = 0;
    bool progress = false;
    CLI::Option* samples_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
};

struct SimulateArgs {
    InputArgs input;
    std::string line;
    int bus = 0;
    int location_pct = 50;
    std::string fault_type = "LLL";
    double fct = 0.9;
    std::string out_stem;
    bool full_horizon = false;
};

PowerSystem load_system(const InputArgs& in) {
    const std::string cdf = read_text_file(in.system_path);
    if (in.dyn_path.empty()) {
        PowerSystem system = parse_cdf(cdf);
        system.breakers = build_breaker_registry(system);
        validate_network(system);
        return system;
    }
    return assemble_system(cdf, read_text_file(in.dyn_path));
}

// Base case at forecast load; failure here is reported with its own exit code.
OperatingPoint base_power_flow(const PowerSystem& system) { return solve_power_flow(system); }

CampaignConfig campaign_config(const CampaignArgs& args, CampaignMode mode) {
    CampaignConfig config;
    if (!args.config_path.empty()) config = config_from_json(read_text_file(args.config_path), config);
    config.mode = mode;
    if (args.samples_opt && args.samples_opt->count()) config.n_samples = args.samples;
    if (args.seed_opt && args.seed_opt->count()) config.seed = args.seed;
    try {
        validate_config(config);
    } catch (const DomainError& e) {
        throw ValidationError(e.what());
    }
    return config;
}

int run_campaign(const CampaignArgs& args, CampaignMode mode, std::ostream& out, std::ostream& err) {
    const PowerSystem system = load_system(args.input);
    base_power_flow(system);
    const CampaignConfig config = campaign_config(args, mode);

    RankingOptions options;
    options.threads = args.threads;
    if (args.progress) {
        options.progress = [&err](std::size_t done, std::size_t total) {
            if (done == total || done % std::max<std::size_t>(1, total / 20) == 0) {
                err << "progress " << done << "/" << total << "\n";
            }
        };
    }
    const RankingReport report = mode == CampaignMode::deterministic_lll ? rank_deterministic_lll(system, options)
                                                                          : rank_elements(system, config, options);

    write_text_file(args.out_stem + ".csv", report_csv(report));
    write_text_file(args.out_stem + ".json", report_json(report));
    write_text_file(args.out_stem + ".run.json", run_stats_json(report));

    out << to_string(mode) << ": " << report.entries.size() << " ranked element(s), "
        << report.stats.scenarios << " scenario(s)";
    if (mode != CampaignMode::deterministic_lll) out << ", seed " << config.seed;
    out << "\n" << top_table(report, 5);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", report.stats.wall_clock_s);
    out << "wall clock " << buf << " s on " << report.stats.threads << " thread(s)\n";
    const auto& t = report.manifest.totals;
    if (t.rejected_convergence + t.rejected_islanding + t.blowups > 0) {
        out << "rejected: " << t.rejected_convergence << " power flow, " << t.rejected_islanding
            << " islanding; blowups: " << t.blowups << "\n";
    }
    out << "wrote " << args.out_stem << ".csv, " << args.out_stem << ".json\n";
    return kOk;
}

int run_validate(const InputArgs& in, std::ostream& out) {
    const PowerSystem system = load_system(in);
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.1f MW / %.1f MVar", system.total_load_mw(), system.total_load_mvar());
    out << "ok: " << system.bus_count() << " buses, " << system.branches.size() << " branches ("
        << system.line_count() << " lines), " << system.machines.size() << " machines, "
        << system.breakers.entries.size() << " breakers\n"
        << "total load " << buf << "\n";
    return kOk;
}

int run_powerflow(const InputArgs& in, std::ostream& out) {
    const PowerSystem system = load_system(in);
    const OperatingPoint op = base_power_flow(system);
    char buf[160];
    std::snprintf(buf, sizeof buf, "converged in %d iteration(s), max mismatch %.3e pu\n", op.iterations,
                  op.max_mismatch);
    out << buf;
    std::snprintf(buf, sizeof buf, "generation %.3f MW, load %.3f MW\n", op.total_generation() * system.system_mva,
                  op.total_load() * system.system_mva);
    out << buf;
    out << " bus      |V| pu   angle deg     Pg MW   Qg MVar\n";
    for (std::size_t k = 0; k < system.bus_count(); ++k) {
        const Complex v = op.v(static_cast<Eigen::Index>(k));
        std::snprintf(buf, sizeof buf, "%4d %12.6f %11.4f %9.3f %9.3f\n", system.buses[k].id, std::abs(v),
                      std::arg(v) * 180.0 / std::numbers::pi, op.s_gen[k].real() * system.system_mva,
                      op.s_gen[k].imag() * system.system_mva);
        out << buf;
    }
    return kOk;
}

int run_simulate(const SimulateArgs& args, std::ostream& out) {
    const PowerSystem system = load_system(args.input);
    if (system.machines.empty()) throw ValidationError("simulate-one needs --dyn with at least one machine");
    const OperatingPoint op = base_power_flow(system);

    FaultType type;
    try {
        type = parse_fault_type(args.fault_type);
    } catch (const DomainError& e) {
        throw ValidationError(e.what());
    }
    FaultSpec fault;
    if (!args.line.empty()) {
        if (args.location_pct < 0 || args.location_pct > 100) throw ValidationError("--location must be 0..100");
        system.branch_index(args.line);
        fault = FaultSpec::on_line(args.line, args.location_pct / 100.0, type);
    } else {
        if (!system.has_bus(args.bus)) throw ReferenceError("unknown bus " + std::to_string(args.bus));
        fault = FaultSpec::at_bus(args.bus, type);
    }
    if (!(args.fct > 0)) throw ValidationError("--fct must be positive");

    const auto internals = init_machine_internals(system, op);
    const PhaseMatrices phases = build_phase_matrices(system, op, fault);
    SimulationOptions sim;
    sim.early_exit = !args.full_horizon;
    const Trajectory traj = simulate_scenario(system, internals, phases, args.fct, sim);

    std::vector<BusId> buses;
    for (const auto& m : system.machines) buses.push_back(m.bus);
    write_text_file(args.out_stem + ".csv", trajectory_csv(traj, buses));

    char buf[160];
    std::snprintf(buf, sizeof buf, "delta_max %.4f deg, %s%s, tripped %s\n", traj.delta_max_deg,
                  traj.unstable ? "unstable" : "stable", traj.terminated_early ? " (stopped early)" : "",
                  phases.tripped_branch.c_str());
    out << buf;
    if (traj.blowup) out << "numerical blowup: " << traj.diagnostic << "\n";
    out << "wrote " << args.out_stem << ".csv (" << traj.times.size() << " rows)\n";
    return kOk;
}

void add_input_options(CLI::App* cmd, InputArgs& in, bool dyn_required) {
    cmd->add_option("--system", in.system_path, "IEEE common-format case file")->required();
    auto* dyn = cmd->add_option("--dyn", in.dyn_path, "machine dynamics JSON");
    if (dyn_required) dyn->required();
}

void add_campaign_options(CLI::App* cmd, CampaignArgs& args, bool sampled) {
    add_input_options(cmd, args.input, true);
    if (sampled) {
        args.samples_opt = cmd->add_option("--samples", args.samples, "samples per element (default 2401)")
                               ->check(CLI::PositiveNumber);
        args.seed_opt = cmd->add_option("--seed", args.seed, "campaign seed (default 42)");
        cmd->add_option("--config", args.config_path, "campaign config JSON; flags override it");
    }
    cmd->add_option("--out", args.out_stem, "output stem for <out>.csv and <out>.json")->required();
    cmd->add_option("--threads", args.threads, "worker threads (default: all cores)");
    cmd->add_flag("--progress", args.progress, "report progress on stderr");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Circuit-breaker priority ranking by transient-stability risk"};
    app.set_version_flag("--version", library_version());
    app.require_subcommand(1);

    CampaignArgs lines_args, buses_args, det_args;
    add_campaign_options(app.add_subcommand("rank-lines", "rank lines under sampled line faults"), lines_args, true);
    add_campaign_options(app.add_subcommand("rank-buses", "rank buses under sampled bus faults"), buses_args, true);
    add_campaign_options(app.add_subcommand("rank-buses-det", "rank buses under bolted three-phase faults"), det_args,
                         false);

    InputArgs pf_args, validate_args;
    add_input_options(app.add_subcommand("powerflow", "solve the base-case power flow"), pf_args, false);
    add_input_options(app.add_subcommand("validate", "check a case file (and dynamics)"), validate_args, false);

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate-one", "simulate one fault and export the rotor-angle trajectory");
    add_input_options(sim, sim_args.input, true);
    auto* line_opt = sim->add_option("--line", sim_args.line, "faulted line id");
    auto* bus_opt = sim->add_option("--bus", sim_args.bus, "faulted bus number");
    line_opt->excludes(bus_opt);
    sim->add_option("--location", sim_args.location_pct, "fault position along the line, percent")
        ->check(CLI::Range(0, 100));
    sim->add_option("--type", sim_args.fault_type, "LG, LLG, LL or LLL");
    sim->add_option("--fct", sim_args.fct, "fault clearing time, s");
    sim->add_option("--out", sim_args.out_stem, "output stem for <out>.csv")->required();
    sim->add_flag("--full-horizon", sim_args.full_horizon, "keep integrating past the instability threshold");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (sim->parsed() && line_opt->count() == 0 && bus_opt->count() == 0) {
            throw CLI::RequiredError("simulate-one needs --line or --bus");
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (app.got_subcommand("rank-lines")) return run_campaign(lines_args, CampaignMode::line_faults, out, err);
        if (app.got_subcommand("rank-buses")) return run_campaign(buses_args, CampaignMode::bus_faults, out, err);
        if (app.got_subcommand("rank-buses-det")) {
            return run_campaign(det_args, CampaignMode::deterministic_lll, out, err);
        }
        if (app.got_subcommand("powerflow")) return run_powerflow(pf_args, out);
        if (app.got_subcommand("validate")) return run_validate(validate_args, out);
        if (sim->parsed()) return run_simulate(sim_args, out);
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const ConvergenceError& e) {
        err << "base power flow did not converge: " << e.what() << "\n";
        return kPowerFlowFailed;
    } catch (const Error& e) {
        err << "numerical error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kNumericalError;
    }
    return kInputError;
}

}  // namespace cbrisk::cli
