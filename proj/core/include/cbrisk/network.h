#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cbrisk {

using BusId = int;

enum class BusKind { slack, pv, pq };

/// One bus card of an IEEE Common Data Format file.
///
/// Powers and shunts are per-unit on the system base; the MW/MVar
/// conversion happens only when reading or writing files.
struct BusRecord {
    BusId id = 0;
    std::string name;
    BusKind kind = BusKind::pq;
    int cdf_type = 0;  // raw type code 0..3 (0 and 1 are both PQ)
    int area = 1;
    int zone = 1;
    double v_final = 1.0;    // solved magnitude stored in the file, pu
    double angle_final = 0;  // degrees
    double p_load = 0;       // pu
    double q_load = 0;       // pu
    double p_gen = 0;        // pu
    double q_gen = 0;        // pu
    double base_kv = 0;
    double v_set = 0;        // desired volts, pu (0 for PQ buses)
    double q_max = 0;        // MVar or voltage limit, as written in the file
    double q_min = 0;
    double g_shunt = 0;      // pu
    double b_shunt = 0;      // pu
    int remote_bus = 0;

    bool operator==(const BusRecord&) const = default;
};

/// One branch card. `is_line` is true for CDF branch type 0; all other
/// types are transformers, which never host faults or breakers.
struct BranchRecord {
    std::string id;  // e.g. "Line_0006_0013", "Line_0001_0002/2", "Trf_0004_0007"
    BusId from_bus = 0;
    BusId to_bus = 0;
    int area = 1;
    int zone = 1;
    int circuit = 1;
    int cdf_type = 0;
    double r = 0;
    double x = 0;
    double b = 0;  // total line charging, pu
    double rating_a = 0;  // MVA
    double rating_b = 0;
    double rating_c = 0;
    double tap = 1.0;  // off-nominal ratio on the from side
    double shift_deg = 0;
    bool is_line = true;
    bool in_service = true;

    bool operator==(const BranchRecord&) const = default;
};

/// Classical-model machine data from the dynamics sidecar. Values are on the
/// machine MVA base; use the `*_sys` helpers for the system base.
struct MachineDynamics {
    BusId bus = 0;
    double h = 0;         // inertia constant, s
    double xd_prime = 0;  // transient reactance, pu
    double d = 0;         // damping, pu torque / pu speed
    double mva_base = 100;
    bool is_condenser = false;
    double x0 = 0;        // zero-sequence reactance to ground, pu (0 = use xd_prime)
    bool grounded = true; // false blocks the zero-sequence path at this machine

    double h_sys(double system_mva) const { return h * mva_base / system_mva; }
    double d_sys(double system_mva) const { return d * mva_base / system_mva; }
    double xd_prime_sys(double system_mva) const { return xd_prime * system_mva / mva_base; }
    double x0_sys(double system_mva) const {
        return (x0 > 0 ? x0 : xd_prime) * system_mva / mva_base;
    }
};

/// Winding arrangement seen by zero-sequence currents. The first letter
/// pair is the from-side winding.
enum class WindingConnection {
    grounded_wye_delta,  // shunt path at the from bus only
    delta_grounded_wye,  // shunt path at the to bus only
    grounded_wye_grounded_wye,  // series path
    open,                // no zero-sequence path
};

struct ZeroSequenceBranch {
    std::optional<double> r0;
    std::optional<double> x0;
    std::optional<WindingConnection> connection;
};

/// Zero-sequence assumptions. Lines default to R0 = 3 R1, X0 = 3 X1 with no
/// charging; transformers default to grounded-wye on the from side.
struct ZeroSequenceData {
    double line_r_factor = 3.0;
    double line_x_factor = 3.0;
    WindingConnection transformer_default = WindingConnection::grounded_wye_delta;
    std::map<std::string, ZeroSequenceBranch> overrides;
};

struct BreakerEntry {
    std::string breaker_id;
    std::string branch_id;
    BusId terminal_bus = 0;

    bool operator==(const BreakerEntry&) const = default;
};

struct BreakerRegistry {
    std::vector<BreakerEntry> entries;

    /// Breakers whose terminal is `bus`, in registry order.
    std::vector<std::string> at_bus(BusId bus) const;
    /// Breakers on `branch_id`, from-terminal first.
    std::vector<std::string> on_branch(std::string_view branch_id) const;
    /// Buses owning at least one breaker, ascending.
    std::vector<BusId> breaker_buses() const;
};

/// Title card fields kept for round-tripping.
struct CdfHeader {
    std::string date;
    std::string originator;
    int year = 0;
    char season = ' ';
    std::string case_id;

    bool operator==(const CdfHeader&) const = default;
};

struct PowerSystem {
    CdfHeader header;
    std::vector<BusRecord> buses;
    std::vector<BranchRecord> branches;
    std::vector<MachineDynamics> machines;
    BreakerRegistry breakers;
    ZeroSequenceData zero_sequence;
    double system_mva = 100.0;
    double f0 = 60.0;

    std::size_t bus_count() const { return buses.size(); }
    /// Position of bus `id` in `buses`. Throws ReferenceError.
    std::size_t bus_index(BusId id) const;
    bool has_bus(BusId id) const;
    /// Position of branch `id` in `branches`. Throws ReferenceError.
    std::size_t branch_index(std::string_view id) const;
    const BranchRecord& branch(std::string_view id) const { return branches[branch_index(id)]; }
    std::size_t slack_index() const;

    /// In-service transmission lines (N_L), in file order.
    std::vector<std::size_t> line_indices() const;
    std::size_t line_count() const { return line_indices().size(); }

    double total_load_mw() const;
    double total_load_mvar() const;
};

/// Canonical element names used in reports.
std::string bus_element_id(BusId bus);  // "Bus_0006"

/// Parse the bus and branch sections of an IEEE Common Data Format file.
/// Branch ids are derived from the terminal buses; parallel circuits get a
/// "/<circuit>" suffix. The result is validated with `validate_network`.
PowerSystem parse_cdf(std::string_view text);

/// Write `system` back in the fixed-column layout read by `parse_cdf`.
std::string write_cdf(const PowerSystem& system);

/// Structural checks: unique bus ids, one slack, known branch terminals,
/// non-zero reactance, connected graph with at least two buses.
void validate_network(const PowerSystem& system);

struct DynamicsData {
    std::vector<MachineDynamics> machines;
    ZeroSequenceData zero_sequence;
    std::optional<double> f0;
};

/// Read the JSON dynamics sidecar and check it against `system`.
DynamicsData load_dynamics(std::string_view json_text, const PowerSystem& system);

/// Breakers B1..B(2 N_L), assigned in branch order, from-terminal first.
BreakerRegistry build_breaker_registry(const PowerSystem& system);

/// Parse, attach dynamics and breakers, and validate.
PowerSystem assemble_system(std::string_view cdf_text, std::string_view dynamics_json);

/// Read a whole file. Throws InputError when it cannot be opened.
std::string read_text_file(const std::string& path);

}  // namespace cbrisk
