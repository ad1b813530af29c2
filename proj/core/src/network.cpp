#include "cbrisk/network.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "cbrisk/errors.h"

namespace cbrisk {

std::size_t PowerSystem::bus_index(BusId id) const {
    for (std::size_t k = 0; k < buses.size(); ++k) {
        if (buses[k].id == id) return k;
    }
    throw ReferenceError("unknown bus " + std::to_string(id));
}

bool PowerSystem::has_bus(BusId id) const {
    return std::any_of(buses.begin(), buses.end(), [id](const BusRecord& b) { return b.id == id; });
}

std::size_t PowerSystem::branch_index(std::string_view id) const {
    for (std::size_t k = 0; k < branches.size(); ++k) {
        if (branches[k].id == id) return k;
    }
    throw ReferenceError("unknown branch " + std::string(id));
}

std::size_t PowerSystem::slack_index() const {
    for (std::size_t k = 0; k < buses.size(); ++k) {
        if (buses[k].kind == BusKind::slack) return k;
    }
    throw ValidationError("system has no slack bus");
}

std::vector<std::size_t> PowerSystem::line_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < branches.size(); ++k) {
        if (branches[k].is_line && branches[k].in_service) out.push_back(k);
    }
    return out;
}

double PowerSystem::total_load_mw() const {
    return system_mva * std::accumulate(buses.begin(), buses.end(), 0.0,
                                        [](double s, const BusRecord& b) { return s + b.p_load; });
}

double PowerSystem::total_load_mvar() const {
    return system_mva * std::accumulate(buses.begin(), buses.end(), 0.0,
                                        [](double s, const BusRecord& b) { return s + b.q_load; });
}

std::string bus_element_id(BusId bus) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "Bus_%04d", bus);
    return buf;
}

std::vector<std::string> BreakerRegistry::at_bus(BusId bus) const {
    std::vector<std::string> out;
    for (const auto& e : entries) {
        if (e.terminal_bus == bus) out.push_back(e.breaker_id);
    }
    return out;
}

std::vector<std::string> BreakerRegistry::on_branch(std::string_view branch_id) const {
    std::vector<std::string> out;
    for (const auto& e : entries) {
        if (e.branch_id == branch_id) out.push_back(e.breaker_id);
    }
    return out;
}

std::vector<BusId> BreakerRegistry::breaker_buses() const {
    std::set<BusId> buses;
    for (const auto& e : entries) buses.insert(e.terminal_bus);
    return {buses.begin(), buses.end()};
}

void validate_network(const PowerSystem& system) {
    if (system.buses.size() < 2) {
        throw ValidationError("system needs at least two buses, found " +
                              std::to_string(system.buses.size()));
    }
    if (system.branches.empty()) throw ValidationError("system has no branches");

    std::set<BusId> ids;
    int slack_count = 0;
    for (const auto& bus : system.buses) {
        if (!ids.insert(bus.id).second) {
            throw ValidationError("duplicate bus id " + std::to_string(bus.id));
        }
        if (bus.kind == BusKind::slack) ++slack_count;
    }
    if (slack_count != 1) {
        throw ValidationError("expected exactly one slack bus, found " + std::to_string(slack_count));
    }

    std::set<std::string> branch_ids;
    for (const auto& br : system.branches) {
        if (!ids.count(br.from_bus) || !ids.count(br.to_bus)) {
            throw ReferenceError("branch " + br.id + " references unknown bus " +
                                 std::to_string(ids.count(br.from_bus) ? br.to_bus : br.from_bus));
        }
        if (br.from_bus == br.to_bus) {
            throw ValidationError("branch " + br.id + " connects bus " +
                                  std::to_string(br.from_bus) + " to itself");
        }
        if (br.x == 0.0) throw ValidationError("branch " + br.id + " has zero series reactance");
        if (!branch_ids.insert(br.id).second) throw ValidationError("duplicate branch id " + br.id);
    }

    // Connectivity over in-service branches.
    std::vector<std::size_t> parent(system.buses.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (const auto& br : system.branches) {
        if (!br.in_service) continue;
        parent[find(system.bus_index(br.from_bus))] = find(system.bus_index(br.to_bus));
    }
    const std::size_t root = find(system.slack_index());
    for (std::size_t k = 0; k < system.buses.size(); ++k) {
        if (find(k) != root) {
            throw ValidationError("bus " + std::to_string(system.buses[k].id) +
                                  " is not connected to the slack bus");
        }
    }

    for (const auto& m : system.machines) {
        if (!system.has_bus(m.bus)) {
            throw ReferenceError("machine references unknown bus " + std::to_string(m.bus));
        }
    }
}

BreakerRegistry build_breaker_registry(const PowerSystem& system) {
    BreakerRegistry reg;
    int next = 1;
    for (std::size_t k : system.line_indices()) {
        const auto& br = system.branches[k];
        reg.entries.push_back({"B" + std::to_string(next++), br.id, br.from_bus});
        reg.entries.push_back({"B" + std::to_string(next++), br.id, br.to_bus});
    }
    return reg;
}

PowerSystem assemble_system(std::string_view cdf_text, std::string_view dynamics_json) {
    PowerSystem system = parse_cdf(cdf_text);
    DynamicsData dyn = load_dynamics(dynamics_json, system);
    system.machines = std::move(dyn.machines);
    system.zero_sequence = std::move(dyn.zero_sequence);
    if (dyn.f0) system.f0 = *dyn.f0;
    system.breakers = build_breaker_registry(system);
    validate_network(system);
    return system;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace cbrisk
