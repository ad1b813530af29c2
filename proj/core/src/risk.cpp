#include "cbrisk/risk.h"

#include <cmath>
#include <vector>

#include "cbrisk/errors.h"

namespace cbrisk {

double tssi(double delta_max_deg) {
    if (!(delta_max_deg >= 0.0)) throw DomainError("tssi: delta_max must be a non-negative angle");
    return (360.0 - delta_max_deg) / (360.0 + delta_max_deg);
}

double severity(double tssi_value) {
    if (!(std::abs(tssi_value) < 1.0)) throw DomainError("severity: |tssi| must be below 1");
    return tssi_value < 0.0 ? -tssi_value : 0.0;
}

int instability_indicator(double delta_max_deg) { return delta_max_deg > 360.0 ? 1 : 0; }

FaultProbability fault_probability_factors(CampaignMode mode, std::size_t n_elements, FaultType type,
                                           const SamplingParams& params) {
    if (mode == CampaignMode::deterministic_lll) return {};
    if (n_elements == 0) throw DomainError("fault_probability: element count must be >= 1");
    const auto k = static_cast<std::size_t>(type);
    if (k >= params.type_pmf.size()) throw DomainError("fault_probability: unknown fault type");
    FaultProbability pr;
    pr.occurrence = 1.0 / static_cast<double>(n_elements);
    pr.location = mode == CampaignMode::line_faults ? 1.0 / params.location_cells : 1.0;
    pr.type = params.type_pmf[k];
    return pr;
}

double fault_probability(CampaignMode mode, std::size_t n_elements, FaultType type, const SamplingParams& params) {
    return fault_probability_factors(mode, n_elements, type, params).product();
}

double sample_risk(double pr_fault, int indicator, double severity_value) {
    return pr_fault * indicator * severity_value;
}

RiskSample make_risk_sample(const FaultProbability& pr, FaultType type, double delta_max_deg) {
    RiskSample s;
    s.pr_occurrence = pr.occurrence;
    s.pr_location = pr.location;
    s.pr_type = pr.type;
    s.ftype = type;
    s.delta_max_deg = delta_max_deg;
    s.pr_instability = instability_indicator(delta_max_deg);
    s.tssi = tssi(delta_max_deg);
    s.severity = severity(s.tssi);
    s.r_i = sample_risk(s.pr_fault(), s.pr_instability, s.severity);
    return s;
}

RiskAverage average_risk(std::span<const double> r) {
    if (r.empty()) throw DomainError("average_risk: no samples");
    const double n = static_cast<double>(r.size());
    double sum = 0.0;
    for (double x : r) sum += x;
    RiskAverage out;
    out.mean = sum / n;
    if (r.size() > 1) {
        double ss = 0.0;
        for (double x : r) ss += (x - out.mean) * (x - out.mean);
        out.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return out;
}

RiskAverage average_risk(std::span<const RiskSample> samples) {
    std::vector<double> r;
    r.reserve(samples.size());
    for (const auto& s : samples) r.push_back(s.r_i);
    return average_risk(r);
}

std::array<double, 4> instability_probabilities(std::span<const RiskSample> samples) {
    if (samples.empty()) throw DomainError("instability_probabilities: no samples");
    std::array<double, 4> counts{};
    for (const auto& s : samples) {
        if (s.pr_instability) counts[static_cast<std::size_t>(s.ftype)] += 1.0;
    }
    for (auto& c : counts) c /= static_cast<double>(samples.size());
    return counts;
}

}  // namespace cbrisk
