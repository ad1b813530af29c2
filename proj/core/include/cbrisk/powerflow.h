#pragma once

#include <span>
#include <vector>

#include "cbrisk/network.h"
#include "cbrisk/ybus.h"

namespace cbrisk {

struct PowerFlowOptions {
    double tolerance = 1e-8;  // max |dP|, |dQ| in pu
    int max_iterations = 50;
};

/// Solved pre-fault state. Vectors indexed by bus are ordered like
/// `system.buses`; `pg`/`qg` are ordered like `system.machines`.
struct OperatingPoint {
    ComplexVector v;
    std::vector<double> p_load;  // scaled loads, pu
    std::vector<double> q_load;
    std::vector<Complex> s_gen;  // total generation per bus, pu
    std::vector<double> pg;
    std::vector<double> qg;
    bool converged = false;
    double max_mismatch = 0;
    int iterations = 0;
    std::vector<double> trace;  // mismatch before each update

    double total_generation() const;  // pu
    double total_load() const;        // pu
};

/// Newton-Raphson (polar) from a flat start. Loads scale P and Q by the
/// same per-bus multiplier; an empty `load_scale` means all ones. The slack
/// bus absorbs every deviation. Reactive limits are not enforced.
///
/// Throws ConvergenceError carrying the mismatch trace when the tolerance is
/// not reached (a singular Jacobian included), DomainError for bad
/// multipliers.
OperatingPoint solve_power_flow(const PowerSystem& system, std::span<const double> load_scale = {},
                                const PowerFlowOptions& options = {});

/// Classical-model machine state behind X'd.
struct MachineInternal {
    double e_mag = 0;   // pu
    double delta0 = 0;  // rad
    double pm = 0;      // pu, equals pre-fault electrical output
};

/// E = V_t + j X'd I_t for one machine (all on the system base).
MachineInternal internal_emf(Complex v_terminal, Complex i_terminal, double xd_prime);

/// Internal EMFs for every machine in `system.machines`. Throws DomainError
/// when `op` did not converge.
std::vector<MachineInternal> init_machine_internals(const PowerSystem& system, const OperatingPoint& op);

}  // namespace cbrisk
