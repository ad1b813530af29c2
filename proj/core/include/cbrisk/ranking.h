#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cbrisk/network.h"
#include "cbrisk/risk.h"
#include "cbrisk/sampling.h"
#include "cbrisk/scenario.h"

namespace cbrisk {

using ScenarioFn = std::function<ScenarioOutcome(const ScenarioSample&)>;

struct RankingEntry {
    int priority_rank = 0;
    std::string element;
    std::vector<std::string> breakers;
    double r_a = 0;  // fraction, not percent
    double std_error = 0;
    int n_unstable = 0;
    std::array<int, 4> n_unstable_by_type{};  // ordered like kAllFaultTypes
    std::array<double, 4> instability_probability{};
    std::size_t n_evaluated = 0;
    std::size_t n_rejected = 0;

    bool operator==(const RankingEntry&) const = default;
};

/// An element whose scenarios were all rejected.
struct FlaggedElement {
    std::string element;
    std::vector<std::string> breakers;
    std::size_t n_rejected = 0;
    std::string reason;

    bool operator==(const FlaggedElement&) const = default;
};

struct ElementCounters {
    std::size_t rejected_convergence = 0;
    std::size_t rejected_islanding = 0;
    std::size_t blowups = 0;
    std::size_t load_clamps = 0;
    std::size_t fct_clamps = 0;

    bool operator==(const ElementCounters&) const = default;
};

/// Deterministic run record embedded in every report. Wall-clock time and
/// worker count live in RunStats so reports stay byte-identical.
struct RunManifest {
    std::string code_version;
    CampaignConfig config;
    std::map<std::string, ElementCounters> per_element;
    ElementCounters totals;
};

struct RunStats {
    double wall_clock_s = 0;
    unsigned threads = 1;
    std::size_t scenarios = 0;
};

struct RankingReport {
    CampaignMode mode = CampaignMode::line_faults;
    std::vector<RankingEntry> entries;
    std::vector<FlaggedElement> flagged;
    RunManifest manifest;
    RunStats stats;
};

struct RankingOptions {
    unsigned threads = 0;  // 0: hardware concurrency
    std::function<void(std::size_t done, std::size_t total)> progress;
};

unsigned resolve_threads(unsigned requested);

/// Evaluates `config.n_samples` scenarios per element (one in deterministic
/// mode) with `evaluate`, averages risk per element and ranks by descending
/// R_A, ties by element id. Results do not depend on the worker count.
RankingReport rank_elements(const PowerSystem& system, const CampaignConfig& config, const ScenarioFn& evaluate,
                            const RankingOptions& options = {});

/// rank_elements with the full simulation chain.
RankingReport rank_elements(const PowerSystem& system, const CampaignConfig& config,
                            const RankingOptions& options = {});

/// One bolted LLL bus fault per breaker-owning bus at forecast load, 0.9 s
/// clearing and unit fault probability.
RankingReport rank_deterministic_lll(const PowerSystem& system, const RankingOptions& options = {});

/// Sorts entries by descending r_a (ties by element) and numbers them from 1.
void assign_ranks(std::vector<RankingEntry>& entries);

}  // namespace cbrisk
