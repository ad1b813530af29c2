#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cbrisk/network.h"
#include "cbrisk/powerflow.h"
#include "cbrisk/ybus.h"

namespace cbrisk {

/// Fault categories, in the order of their occurrence probabilities.
enum class FaultType { LG, LLG, LL, LLL };

inline constexpr FaultType kAllFaultTypes[] = {FaultType::LG, FaultType::LLG, FaultType::LL, FaultType::LLL};

std::string_view to_string(FaultType type);
/// Accepts "LG", "LLG", "LL", "LLL" (case-insensitive). Throws DomainError.
FaultType parse_fault_type(std::string_view text);

struct LineFault {
    std::string line_id;
    double fraction = 0.5;  // distance from the from-bus, 0..1
};

struct BusFault {
    BusId bus = 0;
};

struct FaultSpec {
    std::variant<LineFault, BusFault> target;
    FaultType type = FaultType::LLL;
    Complex zf{};  // fault impedance, pu

    static FaultSpec on_line(std::string line_id, double fraction, FaultType type) {
        return {LineFault{std::move(line_id), fraction}, type, {}};
    }
    static FaultSpec at_bus(BusId bus, FaultType type) { return {BusFault{bus}, type, {}}; }
};

/// A system whose faulted line has been split at the fault location.
struct FaultedSystem {
    PowerSystem system;
    std::size_t fault_node = 0;  // bus index of the fault point in `system`
    bool fictitious = false;     // true when a new bus was created
};

/// Splits `line_id` into segments f*z and (1-f)*z around a new bus, with the
/// charging split in the same proportion. f = 0 or 1 places the fault on the
/// terminal bus instead. Throws DomainError for f outside [0, 1] or a
/// branch that is not an in-service line.
FaultedSystem insert_fault_node(const PowerSystem& system, std::string_view line_id, double fraction);

/// Thevenin impedance, or an explicit open-circuit marker when the node has
/// no path to ground in the sequence network.
struct SequenceImpedance {
    Complex z{};
    bool infinite = false;

    static SequenceImpedance open() { return {{}, true}; }
};

/// Per-bus constant-admittance equivalent of the loads at `op`. Generation at
/// buses without a machine is folded in as negative load.
std::vector<Complex> load_admittances(const PowerSystem& system, const OperatingPoint& op);

/// Bus-indexed sequence network: branches, machines (1/jX'd in positive and
/// negative sequence, grounded zero-sequence reactance in zero sequence) and,
/// for positive/negative sequence, the supplied load admittances.
ComplexMatrix sequence_network(const PowerSystem& system, Sequence sequence,
                               std::span<const Complex> load_admittance = {});

/// Diagonal element of the inverse of `y` at `node`, computed on the
/// connected piece of the network that contains the node.
SequenceImpedance thevenin_impedance(const ComplexMatrix& y, std::size_t node);

SequenceImpedance thevenin_sequence_impedance(const PowerSystem& system, std::size_t node, Sequence sequence,
                                              std::span<const Complex> load_admittance = {});

/// Shunt that represents the fault in the positive-sequence network.
struct FaultShunt {
    Complex y{};
    bool grounded = false;  // bolted: the fault node is held at zero voltage
};

FaultShunt effective_fault_admittance(FaultType type, SequenceImpedance z0, SequenceImpedance z2, Complex zf = {});

/// Positive-sequence network with machine internal nodes appended after the
/// buses (node n_bus + k is machine k).
ComplexMatrix augmented_network(const PowerSystem& system, std::span<const Complex> load_admittance);

/// Network matrices reduced to machine internal nodes.
struct PhaseMatrices {
    ComplexMatrix y_pre;
    ComplexMatrix y_fault;
    ComplexMatrix y_post;
    FaultShunt shunt;
    std::string tripped_branch;
};

/// Which line a bus fault trips: the first in-service line incident to the bus.
std::string bus_fault_host_line(const PowerSystem& system, BusId bus);

/// `system` with `branch_id` removed.
PowerSystem without_branch(const PowerSystem& system, std::string_view branch_id);

/// Throws IslandingError when the in-service branches do not connect every bus.
void check_connected(const PowerSystem& system, std::string_view context);

/// Builds the pre-fault, fault-on and post-fault matrices. Loads become
/// constant admittances at `op`; the post-fault network has the faulted (or,
/// for bus faults, host) line removed. Throws IslandingError when clearing
/// splits the network.
PhaseMatrices build_phase_matrices(const PowerSystem& system, const OperatingPoint& op, const FaultSpec& fault);

}  // namespace cbrisk
