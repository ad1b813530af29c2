#include "cbrisk/ranking.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "cbrisk/errors.h"

#ifndef CBRISK_VERSION
#define CBRISK_VERSION "unknown"
#endif

namespace cbrisk {

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

void assign_ranks(std::vector<RankingEntry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const RankingEntry& a, const RankingEntry& b) {
        if (a.r_a != b.r_a) return a.r_a > b.r_a;
        return a.element < b.element;
    });
    for (std::size_t k = 0; k < entries.size(); ++k) entries[k].priority_rank = static_cast<int>(k + 1);
}

namespace {

std::vector<std::string> breakers_for(const PowerSystem& system, CampaignMode mode, const std::string& element) {
    if (mode == CampaignMode::line_faults) return system.breakers.on_branch(element);
    for (const auto& b : system.buses) {
        if (bus_element_id(b.id) == element) return system.breakers.at_bus(b.id);
    }
    return {};
}

}  // namespace

RankingReport rank_elements(const PowerSystem& system, const CampaignConfig& config, const ScenarioFn& evaluate,
                            const RankingOptions& options) {
    validate_config(config);
    const auto start = std::chrono::steady_clock::now();
    const std::vector<std::string> elements = campaign_elements(system, config.mode);
    if (elements.empty()) throw ValidationError("system has no elements to rank in this mode");

    const std::size_t per_element = config.mode == CampaignMode::deterministic_lll ? 1 : config.n_samples;
    const std::size_t total = elements.size() * per_element;
    std::vector<ScenarioOutcome> outcomes(total);

    const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(options.threads), total));
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::mutex progress_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= total || failed) return;
            const std::string& element = elements[task / per_element];
            try {
                const ScenarioSample sample = make_scenario(config, system.bus_count(), element, task % per_element);
                outcomes[task] = evaluate(sample);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
                return;
            }
            const std::size_t finished = ++done;
            if (options.progress) {
                std::lock_guard lock(progress_mutex);
                options.progress(finished, total);
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);

    RankingReport report;
    report.mode = config.mode;
    report.manifest.code_version = CBRISK_VERSION;
    report.manifest.config = config;

    for (std::size_t e = 0; e < elements.size(); ++e) {
        const std::string& element = elements[e];
        ElementCounters counters;
        std::vector<RiskSample> accepted;
        accepted.reserve(per_element);
        std::string last_reason;
        // Reduction runs in sample-index order whatever the schedule was.
        for (std::size_t i = 0; i < per_element; ++i) {
            const ScenarioOutcome& o = outcomes[e * per_element + i];
            counters.load_clamps += static_cast<std::size_t>(o.sample.load_clamps);
            counters.fct_clamps += o.sample.fct_clamped ? 1 : 0;
            switch (o.status) {
                case ScenarioStatus::rejected_convergence:
                    ++counters.rejected_convergence;
                    last_reason = o.diagnostic;
                    continue;
                case ScenarioStatus::rejected_islanding:
                    ++counters.rejected_islanding;
                    last_reason = o.diagnostic;
                    continue;
                case ScenarioStatus::evaluated: break;
            }
            counters.blowups += o.blowup ? 1 : 0;
            accepted.push_back(o.risk);
        }

        auto& tot = report.manifest.totals;
        tot.rejected_convergence += counters.rejected_convergence;
        tot.rejected_islanding += counters.rejected_islanding;
        tot.blowups += counters.blowups;
        tot.load_clamps += counters.load_clamps;
        tot.fct_clamps += counters.fct_clamps;
        report.manifest.per_element[element] = counters;

        const std::size_t rejected = per_element - accepted.size();
        if (accepted.empty()) {
            report.flagged.push_back({element, breakers_for(system, config.mode, element), rejected, last_reason});
            continue;
        }

        RankingEntry entry;
        entry.element = element;
        entry.breakers = breakers_for(system, config.mode, element);
        const RiskAverage avg = average_risk(accepted);
        entry.r_a = avg.mean;
        entry.std_error = avg.std_error;
        for (const auto& s : accepted) {
            if (!s.pr_instability) continue;
            ++entry.n_unstable;
            ++entry.n_unstable_by_type[static_cast<std::size_t>(s.ftype)];
        }
        entry.instability_probability = instability_probabilities(accepted);
        entry.n_evaluated = accepted.size();
        entry.n_rejected = rejected;
        report.entries.push_back(std::move(entry));
    }
    assign_ranks(report.entries);

    report.stats.threads = threads;
    report.stats.scenarios = total;
    report.stats.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

RankingReport rank_elements(const PowerSystem& system, const CampaignConfig& config, const RankingOptions& options) {
    const ScenarioEvaluator evaluator(system, config);
    return rank_elements(system, config, std::cref(evaluator), options);
}

RankingReport rank_deterministic_lll(const PowerSystem& system, const RankingOptions& options) {
    CampaignConfig config;
    config.mode = CampaignMode::deterministic_lll;
    config.n_samples = 1;
    return rank_elements(system, config, options);
}

}  // namespace cbrisk
