#include "cbrisk/simulation.h"

#include <algorithm>
#include <limits>
#include <numbers>

namespace cbrisk {

SwingModel SwingModel::from_system(const PowerSystem& system, const std::vector<MachineInternal>& internals) {
    const auto n = static_cast<Eigen::Index>(system.machines.size());
    if (static_cast<Eigen::Index>(internals.size()) != n) {
        throw DomainError("swing model: machine count does not match internal states");
    }
    SwingModel model;
    model.e_mag.resize(n);
    model.pm.resize(n);
    model.h.resize(n);
    model.d.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& m = system.machines[static_cast<std::size_t>(k)];
        const auto& in = internals[static_cast<std::size_t>(k)];
        model.e_mag(k) = in.e_mag;
        model.pm(k) = in.pm;
        model.h(k) = m.h_sys(system.system_mva);
        model.d(k) = m.d_sys(system.system_mva);
    }
    model.omega_s = 2.0 * std::numbers::pi * system.f0;
    return model;
}

namespace {

// Real and imaginary parts of a reduced matrix, split once per network phase.
struct Conductances {
    Eigen::MatrixXd g;
    Eigen::MatrixXd b;

    // Per-run scratch; a Conductances object is never shared between threads.
    mutable Eigen::ArrayXd c;
    mutable Eigen::ArrayXd s;

    explicit Conductances(const ComplexMatrix& y) : g(y.real()), b(y.imag()) {}

    void power(const Eigen::VectorXd& e, const Eigen::VectorXd& delta, Eigen::VectorXd& pe) const {
        const Eigen::Index n = e.size();
        c = delta.array().cos();
        s = delta.array().sin();
        pe.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double acc = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                const double cos_ij = c(i) * c(j) + s(i) * s(j);
                const double sin_ij = s(i) * c(j) - c(i) * s(j);
                acc += e(j) * (g(i, j) * cos_ij + b(i, j) * sin_ij);
            }
            pe(i) = e(i) * acc;
        }
    }
};

double spread_deg(const Eigen::VectorXd& delta) {
    if (delta.size() == 0) return 0.0;
    return (delta.maxCoeff() - delta.minCoeff()) * 180.0 / std::numbers::pi;
}

}  // namespace

Eigen::VectorXd electrical_power(const Eigen::VectorXd& e_mag, const ComplexMatrix& y_reduced,
                                 const Eigen::VectorXd& delta) {
    if (y_reduced.rows() != e_mag.size() || y_reduced.cols() != e_mag.size() || delta.size() != e_mag.size()) {
        throw DomainError("electrical_power: dimension mismatch");
    }
    Eigen::VectorXd pe;
    Conductances(y_reduced).power(e_mag, delta, pe);
    return pe;
}

SwingState swing_derivatives(const SwingState& state, const Eigen::VectorXd& pm, const Eigen::VectorXd& pe,
                             const SwingModel& model) {
    SwingState out;
    out.delta = model.omega_s * state.omega_dev;
    out.omega_dev = (pm - pe - model.d.cwiseProduct(state.omega_dev)).cwiseQuotient(2.0 * model.h);
    return out;
}

Trajectory simulate(const SwingModel& model, const PhaseMatrices& phases, const Eigen::VectorXd& delta0,
                    double fct_s, const SimulationOptions& options) {
    if (!(fct_s > 0.0)) throw DomainError("simulate: fault clearing time must be positive");
    if (!(options.dt > 0.0)) throw DomainError("simulate: dt must be positive");
    const Eigen::Index n = model.size();
    if (delta0.size() != n || phases.y_fault.rows() != n || phases.y_post.rows() != n) {
        throw DomainError("simulate: dimension mismatch between model and network");
    }

    const Conductances fault_net(phases.y_fault);
    const Conductances post_net(phases.y_post);
    const long fault_steps = std::max(1L, std::lround(fct_s / options.dt));
    const long total_steps = fault_steps + std::lround(options.post_fault_duration / options.dt);

    Trajectory traj;
    traj.fct_s = fct_s;

    Eigen::VectorXd x(2 * n);
    x << delta0, Eigen::VectorXd::Zero(n);
    auto record = [&](double t) {
        if (!options.record) return;
        traj.times.push_back(t);
        traj.states.push_back({x.head(n), x.tail(n)});
    };
    record(0.0);
    traj.delta_max_deg = spread_deg(delta0);

    Eigen::VectorXd pe(n);
    Eigen::VectorXd dx(2 * n);
    const Conductances* net = &fault_net;
    auto rhs = [&](double, const Eigen::VectorXd& state) -> const Eigen::VectorXd& {
        net->power(model.e_mag, state.head(n), pe);
        dx.head(n) = model.omega_s * state.tail(n);
        dx.tail(n) = (model.pm - pe - model.d.cwiseProduct(state.tail(n))).cwiseQuotient(2.0 * model.h);
        return dx;
    };

    try {
        for (long k = 0; k < total_steps; ++k) {
            net = k < fault_steps ? &fault_net : &post_net;
            x = step_rk4(x, static_cast<double>(k) * options.dt, options.dt, rhs);
            const double t = static_cast<double>(k + 1) * options.dt;
            record(t);
            traj.delta_max_deg = std::max(traj.delta_max_deg, spread_deg(x.head(n)));
            if (options.early_exit && traj.delta_max_deg > options.threshold_deg) {
                traj.terminated_early = true;
                break;
            }
        }
    } catch (const BlowupError& e) {
        traj.blowup = true;
        traj.diagnostic = e.what();
        traj.delta_max_deg =
            std::max(traj.delta_max_deg, std::nextafter(options.threshold_deg, std::numeric_limits<double>::infinity()));
    }
    traj.unstable = traj.delta_max_deg > options.threshold_deg;
    return traj;
}

Trajectory simulate_scenario(const PowerSystem& system, const std::vector<MachineInternal>& internals,
                             const PhaseMatrices& phases, double fct_s, const SimulationOptions& options) {
    const SwingModel model = SwingModel::from_system(system, internals);
    Eigen::VectorXd delta0(model.size());
    for (Eigen::Index k = 0; k < model.size(); ++k) delta0(k) = internals[static_cast<std::size_t>(k)].delta0;
    return simulate(model, phases, delta0, fct_s, options);
}

double max_angle_separation(const Trajectory& trajectory) {
    if (trajectory.states.empty()) throw DomainError("max_angle_separation: empty trajectory");
    double best = 0.0;
    for (const auto& s : trajectory.states) best = std::max(best, spread_deg(s.delta));
    return best;
}

}  // namespace cbrisk
