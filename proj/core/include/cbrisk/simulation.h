#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cbrisk/errors.h"
#include "cbrisk/faults.h"
#include "cbrisk/network.h"
#include "cbrisk/powerflow.h"

namespace cbrisk {

/// Rotor angles (rad) and speed deviations (pu) of every machine.
struct SwingState {
    Eigen::VectorXd delta;
    Eigen::VectorXd omega_dev;
};

/// Machine constants on the system base. An infinite `h` pins a machine's
/// speed (infinite bus).
struct SwingModel {
    Eigen::VectorXd e_mag;
    Eigen::VectorXd pm;
    Eigen::VectorXd h;
    Eigen::VectorXd d;
    double omega_s = 2.0 * std::numbers::pi * 60.0;

    static SwingModel from_system(const PowerSystem& system, const std::vector<MachineInternal>& internals);
    Eigen::Index size() const { return e_mag.size(); }
};

/// Pe_i = sum_j E_i E_j [G_ij cos(d_i - d_j) + B_ij sin(d_i - d_j)].
Eigen::VectorXd electrical_power(const Eigen::VectorXd& e_mag, const ComplexMatrix& y_reduced,
                                 const Eigen::VectorXd& delta);

/// d(delta)/dt = omega_s * omega_dev; d(omega_dev)/dt = (pm - pe - D omega_dev) / 2H.
SwingState swing_derivatives(const SwingState& state, const Eigen::VectorXd& pm, const Eigen::VectorXd& pe,
                             const SwingModel& model);

/// One classic fourth-order Runge-Kutta step of x' = rhs(t, x).
/// Throws BlowupError when any stage is not finite.
template <class Rhs>
Eigen::VectorXd step_rk4(const Eigen::VectorXd& x, double t, double dt, Rhs&& rhs) {
    if (!(dt > 0.0)) throw DomainError("step_rk4: dt must be positive");
    auto check = [t](const Eigen::VectorXd& v) {
        if (!v.allFinite()) throw BlowupError(t, "non-finite state in RK4 stage");
        return v;
    };
    const Eigen::VectorXd k1 = check(rhs(t, x));
    const Eigen::VectorXd k2 = check(rhs(t + 0.5 * dt, x + 0.5 * dt * k1));
    const Eigen::VectorXd k3 = check(rhs(t + 0.5 * dt, x + 0.5 * dt * k2));
    const Eigen::VectorXd k4 = check(rhs(t + dt, x + dt * k3));
    return check(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

struct SimulationOptions {
    double dt = 1e-3;                   // s
    double post_fault_duration = 5.0;   // s after clearing
    double threshold_deg = 360.0;       // instability threshold on the angle spread
    bool early_exit = true;             // stop once the threshold is crossed
    bool record = true;                 // keep the state history
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SwingState> states;
    double fct_s = 0;
    double delta_max_deg = 0;
    bool unstable = false;
    bool terminated_early = false;
    bool blowup = false;
    std::string diagnostic;
};

/// Integrates from equilibrium at `delta0`: y_fault for the first
/// round(fct/dt) steps (at least one), y_post for the rest of the horizon.
/// A numerical blowup ends the run and marks it unstable.
Trajectory simulate(const SwingModel& model, const PhaseMatrices& phases, const Eigen::VectorXd& delta0,
                    double fct_s, const SimulationOptions& options = {});

Trajectory simulate_scenario(const PowerSystem& system, const std::vector<MachineInternal>& internals,
                             const PhaseMatrices& phases, double fct_s, const SimulationOptions& options = {});

/// Largest |delta_i(t) - delta_j(t)| over the recorded history, degrees.
double max_angle_separation(const Trajectory& trajectory);

}  // namespace cbrisk
