#include "cbrisk/scenario.h"

#include "cbrisk/errors.h"

namespace cbrisk {

std::string_view to_string(ScenarioStatus status) {
    switch (status) {
        case ScenarioStatus::evaluated: return "evaluated";
        case ScenarioStatus::rejected_convergence: return "rejected_convergence";
        case ScenarioStatus::rejected_islanding: return "rejected_islanding";
    }
    return "?";
}

std::vector<std::string> campaign_elements(const PowerSystem& system, CampaignMode mode) {
    std::vector<std::string> out;
    if (mode == CampaignMode::line_faults) {
        for (auto k : system.line_indices()) out.push_back(system.branches[k].id);
    } else {
        for (BusId bus : system.breakers.breaker_buses()) out.push_back(bus_element_id(bus));
    }
    return out;
}

BusId element_bus(const PowerSystem& system, std::string_view element) {
    for (const auto& b : system.buses) {
        if (bus_element_id(b.id) == element) return b.id;
    }
    throw ReferenceError("unknown bus element " + std::string(element));
}

FaultSpec fault_for_sample(const PowerSystem& system, CampaignMode mode, const ScenarioSample& sample) {
    if (mode == CampaignMode::line_faults) {
        return FaultSpec::on_line(sample.element, sample.location_pct / 100.0, sample.ftype);
    }
    return FaultSpec::at_bus(element_bus(system, sample.element), sample.ftype);
}

ScenarioEvaluator::ScenarioEvaluator(const PowerSystem& system, const CampaignConfig& config, SimulationOptions sim)
    : system_(system), config_(config), sim_(sim), n_elements_(campaign_elements(system, config.mode).size()) {
    sim_.record = false;
}

ScenarioOutcome ScenarioEvaluator::operator()(const ScenarioSample& sample) const {
    ScenarioOutcome out;
    out.sample = sample;
    OperatingPoint op;
    try {
        op = solve_power_flow(system_, sample.load_multipliers);
    } catch (const ConvergenceError& e) {
        out.status = ScenarioStatus::rejected_convergence;
        out.diagnostic = e.what();
        return out;
    }
    const auto internals = init_machine_internals(system_, op);

    PhaseMatrices phases;
    try {
        phases = build_phase_matrices(system_, op, fault_for_sample(system_, config_.mode, sample));
    } catch (const IslandingError& e) {
        out.status = ScenarioStatus::rejected_islanding;
        out.diagnostic = e.what();
        return out;
    }

    const Trajectory traj = simulate_scenario(system_, internals, phases, sample.fct_s, sim_);
    out.blowup = traj.blowup;
    out.terminated_early = traj.terminated_early;
    out.diagnostic = traj.diagnostic;
    const auto pr = fault_probability_factors(config_.mode, n_elements_, sample.ftype, config_.params);
    out.risk = make_risk_sample(pr, sample.ftype, traj.delta_max_deg);
    return out;
}

}  // namespace cbrisk
