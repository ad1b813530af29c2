#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cbrisk/faults.h"
#include "cbrisk/network.h"

namespace cbrisk {

/// Fault-type probabilities, ordered like `kAllFaultTypes` (LG, LLG, LL, LLL).
inline constexpr std::array<double, 4> kFaultTypePmf{0.7, 0.15, 0.1, 0.05};

/// Probability of one fault type under `pmf`.
double fault_type_probability(FaultType type, const std::array<double, 4>& pmf = kFaultTypePmf);

enum class CampaignMode { line_faults, bus_faults, deterministic_lll };

std::string_view to_string(CampaignMode mode);
CampaignMode parse_campaign_mode(std::string_view text);

struct SamplingParams {
    double load_sigma_fraction = 0.1;  // per-bus sigma as a fraction of the forecast mean
    double fct_mean = 0.9;             // s
    double fct_sigma = 0.1;            // s
    std::array<double, 4> type_pmf = kFaultTypePmf;
    int location_cells = 100;          // line positions 1..N_p percent
};

struct CampaignConfig {
    std::size_t n_samples = 2401;
    std::uint64_t seed = 42;
    CampaignMode mode = CampaignMode::line_faults;
    double clamp_fct_min = 0.05;  // s
    double clamp_load_min = 0.0;  // multiplier
    SamplingParams params;
};

/// Throws DomainError unless the configuration is usable (n_samples >= 1,
/// pmf sums to one, non-negative spreads).
void validate_config(const CampaignConfig& config);

/// Reads the JSON keys n_samples, seed, mode, clamp_fct_min, clamp_load_min.
/// Missing keys keep the values already in `base`.
CampaignConfig config_from_json(std::string_view json_text, CampaignConfig base = {});
std::string config_to_json(const CampaignConfig& config);

/// Per-sample random stream. Each sample owns one; nothing is shared.
class SampleStream {
public:
    explicit SampleStream(std::uint64_t seed) : engine_(seed) {}

    double uniform();                          // [0, 1)
    double normal(double mean, double sigma);  // sigma == 0 returns mean without drawing
    int uniform_int(int lo, int hi);           // inclusive

private:
    std::mt19937_64 engine_;
};

/// Counter-based seed for sample `index` of `element`: a pure function of
/// its arguments, so any sample can be regenerated in isolation.
std::uint64_t substream_seed(std::uint64_t seed, std::string_view element, std::uint64_t index);

/// Cochran's sample size ceil(z^2 p (1 - p) / e^2), z the two-sided normal
/// quantile at `confidence`.
std::size_t cochran_size(double confidence, double margin, double p);

/// Inverse-CDF lookup of a fault type for u in [0, 1).
FaultType fault_type_from_uniform(double u, const std::array<double, 4>& pmf = kFaultTypePmf);
FaultType sample_fault_type(SampleStream& rng, const std::array<double, 4>& pmf = kFaultTypePmf);

/// Uniform line number in 1..n_lines.
std::size_t sample_fault_line(SampleStream& rng, std::size_t n_lines);

/// Uniform integer percent in 1..cells.
int sample_fault_location(SampleStream& rng, int cells = 100);

/// Per-bus multipliers X_i / mu_i ~ Normal(1, sigma_fraction), clamped below
/// at `clamp_min`. `clamps`, when given, receives the number of clamped draws.
std::vector<double> sample_loads(SampleStream& rng, std::size_t n_buses, double sigma_fraction, double clamp_min,
                                 int* clamps = nullptr);

double clamp_fct(double raw, double clamp_min);
/// Normal(mean, sigma) clamped below at `clamp_min`.
double sample_fct(SampleStream& rng, double mean, double sigma, double clamp_min, bool* clamped = nullptr);

/// One Monte-Carlo draw conditioned on a faulted element.
struct ScenarioSample {
    std::size_t index = 0;
    std::string element;   // line id or "Bus_NNNN"
    int location_pct = 0;  // 1..100 for line faults, 0 otherwise
    FaultType ftype = FaultType::LLL;
    std::vector<double> load_multipliers;
    double fct_s = 0.9;
    int load_clamps = 0;
    bool fct_clamped = false;

    bool operator==(const ScenarioSample&) const = default;
};

/// Draws fault type, location (line mode), loads and clearing time, in that
/// order, from the substream of (seed, element, index). Deterministic mode
/// returns forecast loads, 0.9 s and a bolted LLL fault without drawing.
ScenarioSample make_scenario(const CampaignConfig& config, std::size_t n_buses, std::string_view element,
                             std::size_t index);

}  // namespace cbrisk
