#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cbrisk/network.h"
#include "cbrisk/risk.h"
#include "cbrisk/sampling.h"
#include "cbrisk/simulation.h"

namespace cbrisk {

enum class ScenarioStatus { evaluated, rejected_convergence, rejected_islanding };

std::string_view to_string(ScenarioStatus status);

struct ScenarioOutcome {
    ScenarioSample sample;
    ScenarioStatus status = ScenarioStatus::evaluated;
    RiskSample risk;
    bool blowup = false;
    bool terminated_early = false;
    std::string diagnostic;

    bool accepted() const { return status == ScenarioStatus::evaluated; }
};

/// Elements a campaign iterates over: in-service line ids in line mode,
/// "Bus_NNNN" for every bus owning a line breaker otherwise.
std::vector<std::string> campaign_elements(const PowerSystem& system, CampaignMode mode);

/// Bus behind an element id of the form returned by bus_element_id.
BusId element_bus(const PowerSystem& system, std::string_view element);

/// The fault a sample describes.
FaultSpec fault_for_sample(const PowerSystem& system, CampaignMode mode, const ScenarioSample& sample);

/// Full chain for one sample: scaled power flow, machine initialisation,
/// faulted and post-fault networks, swing integration, risk factors.
/// A non-convergent power flow or an islanding clearance rejects the sample
/// instead of throwing.
class ScenarioEvaluator {
public:
    ScenarioEvaluator(const PowerSystem& system, const CampaignConfig& config, SimulationOptions sim = {});

    ScenarioOutcome operator()(const ScenarioSample& sample) const;

    const PowerSystem& system() const { return system_; }
    std::size_t element_count() const { return n_elements_; }

private:
    const PowerSystem& system_;
    CampaignConfig config_;
    SimulationOptions sim_;
    std::size_t n_elements_;
};

}  // namespace cbrisk
