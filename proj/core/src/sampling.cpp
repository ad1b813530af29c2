#include "cbrisk/sampling.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <json.hpp>

#include "cbrisk/errors.h"

namespace cbrisk {

double fault_type_probability(FaultType type, const std::array<double, 4>& pmf) {
    return pmf[static_cast<std::size_t>(type)];
}

std::string_view to_string(CampaignMode mode) {
    switch (mode) {
        case CampaignMode::line_faults: return "line_faults";
        case CampaignMode::bus_faults: return "bus_faults";
        case CampaignMode::deterministic_lll: return "deterministic_lll";
    }
    return "?";
}

CampaignMode parse_campaign_mode(std::string_view text) {
    for (auto m : {CampaignMode::line_faults, CampaignMode::bus_faults, CampaignMode::deterministic_lll}) {
        if (to_string(m) == text) return m;
    }
    throw DomainError("unknown campaign mode '" + std::string(text) + "'");
}

void validate_config(const CampaignConfig& config) {
    if (config.n_samples < 1) throw DomainError("n_samples must be >= 1");
    const auto& p = config.params;
    const double total = std::accumulate(p.type_pmf.begin(), p.type_pmf.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12 || std::any_of(p.type_pmf.begin(), p.type_pmf.end(), [](double x) {
            return x < 0;
        })) {
        throw DomainError("fault-type probabilities must be non-negative and sum to 1");
    }
    if (p.load_sigma_fraction < 0 || p.fct_sigma < 0) throw DomainError("standard deviations must be >= 0");
    if (p.location_cells < 1) throw DomainError("location_cells must be >= 1");
    if (!(config.clamp_fct_min > 0)) throw DomainError("clamp_fct_min must be positive");
    if (config.clamp_load_min < 0) throw DomainError("clamp_load_min must be >= 0");
}

CampaignConfig config_from_json(std::string_view json_text, CampaignConfig base) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw StructureError(std::string("campaign config is not valid JSON: ") + e.what());
    }
    try {
        if (doc.contains("n_samples")) base.n_samples = doc["n_samples"].get<std::size_t>();
        if (doc.contains("seed")) base.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("mode")) base.mode = parse_campaign_mode(doc["mode"].get<std::string>());
        if (doc.contains("clamp_fct_min")) base.clamp_fct_min = doc["clamp_fct_min"].get<double>();
        if (doc.contains("clamp_load_min")) base.clamp_load_min = doc["clamp_load_min"].get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("campaign config: ") + e.what());
    } catch (const DomainError& e) {
        throw ValidationError(std::string("campaign config: ") + e.what());
    }
    return base;
}

std::string config_to_json(const CampaignConfig& config) {
    nlohmann::ordered_json doc;
    doc["n_samples"] = config.n_samples;
    doc["seed"] = config.seed;
    doc["mode"] = std::string(to_string(config.mode));
    doc["clamp_fct_min"] = config.clamp_fct_min;
    doc["clamp_load_min"] = config.clamp_load_min;
    return doc.dump(2);
}

double SampleStream::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

double SampleStream::normal(double mean, double sigma) {
    if (sigma == 0.0) return mean;
    return std::normal_distribution<double>(mean, sigma)(engine_);
}

int SampleStream::uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::string_view element, std::uint64_t index) {
    return splitmix64(splitmix64(splitmix64(seed) ^ fnv1a(element)) ^ index);
}

std::size_t cochran_size(double confidence, double margin, double p) {
    if (!(confidence > 0 && confidence < 1)) throw DomainError("cochran_size: confidence must be in (0, 1)");
    if (!(margin > 0 && margin < 1)) throw DomainError("cochran_size: margin must be in (0, 1)");
    if (!(p > 0 && p < 1)) throw DomainError("cochran_size: p must be in (0, 1)");
    const boost::math::normal_distribution<double> standard;
    const double z = boost::math::quantile(standard, 1.0 - (1.0 - confidence) / 2.0);
    const double n = z * z * p * (1.0 - p) / (margin * margin);
    return static_cast<std::size_t>(std::ceil(n - 1e-9));
}

FaultType fault_type_from_uniform(double u, const std::array<double, 4>& pmf) {
    double cumulative = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        cumulative += pmf[k];
        if (u < cumulative) return kAllFaultTypes[k];
    }
    return kAllFaultTypes[pmf.size() - 1];
}

FaultType sample_fault_type(SampleStream& rng, const std::array<double, 4>& pmf) {
    return fault_type_from_uniform(rng.uniform(), pmf);
}

std::size_t sample_fault_line(SampleStream& rng, std::size_t n_lines) {
    if (n_lines == 0) throw DomainError("sample_fault_line: system has no lines");
    return static_cast<std::size_t>(rng.uniform_int(1, static_cast<int>(n_lines)));
}

int sample_fault_location(SampleStream& rng, int cells) {
    if (cells < 1) throw DomainError("sample_fault_location: cells must be >= 1");
    return rng.uniform_int(1, cells);
}

std::vector<double> sample_loads(SampleStream& rng, std::size_t n_buses, double sigma_fraction, double clamp_min,
                                 int* clamps) {
    std::vector<double> m(n_buses);
    int clamped = 0;
    for (auto& x : m) {
        x = rng.normal(1.0, sigma_fraction);
        if (x < clamp_min) {
            x = clamp_min;
            ++clamped;
        }
    }
    if (clamps) *clamps = clamped;
    return m;
}

double clamp_fct(double raw, double clamp_min) { return std::max(raw, clamp_min); }

double sample_fct(SampleStream& rng, double mean, double sigma, double clamp_min, bool* clamped) {
    const double raw = rng.normal(mean, sigma);
    if (clamped) *clamped = raw < clamp_min;
    return clamp_fct(raw, clamp_min);
}

ScenarioSample make_scenario(const CampaignConfig& config, std::size_t n_buses, std::string_view element,
                             std::size_t index) {
    ScenarioSample s;
    s.index = index;
    s.element = std::string(element);
    const auto& p = config.params;

    if (config.mode == CampaignMode::deterministic_lll) {
        s.ftype = FaultType::LLL;
        s.load_multipliers.assign(n_buses, 1.0);
        s.fct_s = p.fct_mean;
        return s;
    }

    SampleStream rng(substream_seed(config.seed, element, index));
    s.ftype = sample_fault_type(rng, p.type_pmf);
    if (config.mode == CampaignMode::line_faults) s.location_pct = sample_fault_location(rng, p.location_cells);
    s.load_multipliers = sample_loads(rng, n_buses, p.load_sigma_fraction, config.clamp_load_min, &s.load_clamps);
    s.fct_s = sample_fct(rng, p.fct_mean, p.fct_sigma, config.clamp_fct_min, &s.fct_clamped);
    return s;
}

}  // namespace cbrisk
