#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "cbrisk/faults.h"
#include "cbrisk/sampling.h"

namespace cbrisk {

/// Transient stability severity index, (360 - d) / (360 + d) for the maximum
/// angle separation d in degrees. Throws DomainError for d < 0 or NaN.
double tssi(double delta_max_deg);

/// |tssi| for tssi < 0, zero otherwise. Throws DomainError when |tssi| >= 1.
double severity(double tssi_value);

/// 1 when the separation strictly exceeds 360 degrees.
int instability_indicator(double delta_max_deg);

/// The three probability factors of a sampled fault.
struct FaultProbability {
    double occurrence = 1;
    double location = 1;
    double type = 1;

    double product() const { return (occurrence * location) * type; }
};

/// Line mode: (1/n, 1/cells, pmf[type]); bus mode: (1/n, 1, pmf[type]);
/// deterministic mode: all ones. Throws DomainError when n == 0.
FaultProbability fault_probability_factors(CampaignMode mode, std::size_t n_elements, FaultType type,
                                           const SamplingParams& params = {});

double fault_probability(CampaignMode mode, std::size_t n_elements, FaultType type,
                         const SamplingParams& params = {});

double sample_risk(double pr_fault, int indicator, double severity_value);

struct RiskSample {
    double pr_occurrence = 1;
    double pr_location = 1;
    double pr_type = 1;
    int pr_instability = 0;
    double tssi = 1;
    double severity = 0;
    double r_i = 0;
    FaultType ftype = FaultType::LLL;
    double delta_max_deg = 0;

    double pr_fault() const { return (pr_occurrence * pr_location) * pr_type; }
};

/// Fills every factor of one sample from its probabilities and δ_max.
RiskSample make_risk_sample(const FaultProbability& pr, FaultType type, double delta_max_deg);

struct RiskAverage {
    double mean = 0;
    double std_error = 0;  // sample standard deviation / sqrt(N); 0 when N == 1
};

/// Arithmetic mean of per-sample risks. Throws DomainError when empty.
RiskAverage average_risk(std::span<const double> r);
RiskAverage average_risk(std::span<const RiskSample> samples);

/// Unstable count per fault type over the total sample count, ordered like
/// kAllFaultTypes. Throws DomainError when empty.
std::array<double, 4> instability_probabilities(std::span<const RiskSample> samples);

}  // namespace cbrisk
