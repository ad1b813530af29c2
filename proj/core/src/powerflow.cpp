#include "cbrisk/powerflow.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cbrisk/errors.h"

namespace cbrisk {

double OperatingPoint::total_generation() const {
    return std::accumulate(s_gen.begin(), s_gen.end(), 0.0, [](double s, Complex g) { return s + g.real(); });
}

double OperatingPoint::total_load() const { return std::accumulate(p_load.begin(), p_load.end(), 0.0); }

OperatingPoint solve_power_flow(const PowerSystem& system, std::span<const double> load_scale,
                                const PowerFlowOptions& options) {
    const std::size_t n = system.bus_count();
    if (!load_scale.empty() && load_scale.size() != n) {
        throw DomainError("load multipliers: expected " + std::to_string(n) + " values, got " +
                          std::to_string(load_scale.size()));
    }
    for (double m : load_scale) {
        if (!(m >= 0.0) || !std::isfinite(m)) throw DomainError("load multipliers must be finite and >= 0");
    }

    const ComplexMatrix y = build_ybus(system);

    OperatingPoint op;
    op.p_load.resize(n);
    op.q_load.resize(n);
    std::vector<double> p_spec(n), q_spec(n), vm(n, 1.0), va(n, 0.0);
    std::vector<Eigen::Index> pvpq, pq;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& bus = system.buses[i];
        const double m = load_scale.empty() ? 1.0 : load_scale[i];
        op.p_load[i] = bus.p_load * m;
        op.q_load[i] = bus.q_load * m;
        p_spec[i] = bus.p_gen - op.p_load[i];
        q_spec[i] = bus.q_gen - op.q_load[i];
        if (bus.kind != BusKind::pq) {
            vm[i] = bus.v_set > 0 ? bus.v_set : (bus.v_final > 0 ? bus.v_final : 1.0);
        }
        if (bus.kind != BusKind::slack) pvpq.push_back(static_cast<Eigen::Index>(i));
        if (bus.kind == BusKind::pq) pq.push_back(static_cast<Eigen::Index>(i));
    }
    const auto npvpq = static_cast<Eigen::Index>(pvpq.size());
    const auto npq = static_cast<Eigen::Index>(pq.size());

    ComplexVector v(n);
    auto refresh_v = [&] {
        for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = std::polar(vm[i], va[i]);
    };
    refresh_v();

    Eigen::VectorXd f(npvpq + npq);
    auto mismatch = [&] {
        const ComplexVector s = v.cwiseProduct((y * v).conjugate());
        for (Eigen::Index k = 0; k < npvpq; ++k) f(k) = s(pvpq[k]).real() - p_spec[pvpq[k]];
        for (Eigen::Index k = 0; k < npq; ++k) f(npvpq + k) = s(pq[k]).imag() - q_spec[pq[k]];
        return f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
    };

    double worst = mismatch();
    op.trace.push_back(worst);
    while (!(worst < options.tolerance)) {
        if (op.iterations >= options.max_iterations || !std::isfinite(worst)) throw ConvergenceError(op.trace);

        // dS/dVa = j diag(V) conj(diag(I) - Y diag(V)); dS/dVm = diag(V) conj(Y diag(V/|V|)) + conj(diag(I)) diag(V/|V|)
        const ComplexVector ibus = y * v;
        const ComplexVector vnorm = v.cwiseQuotient(v.cwiseAbs().cast<Complex>());
        ComplexMatrix ds_dva = -(y * v.asDiagonal()).conjugate();
        ds_dva.diagonal() += ibus.conjugate();
        ds_dva = Complex(0, 1) * (v.asDiagonal() * ds_dva);
        ComplexMatrix ds_dvm = v.asDiagonal() * (y * vnorm.asDiagonal()).conjugate();
        ds_dvm.diagonal() += ibus.conjugate().cwiseProduct(vnorm);

        Eigen::MatrixXd jac(npvpq + npq, npvpq + npq);
        for (Eigen::Index r = 0; r < npvpq; ++r) {
            for (Eigen::Index c = 0; c < npvpq; ++c) jac(r, c) = ds_dva(pvpq[r], pvpq[c]).real();
            for (Eigen::Index c = 0; c < npq; ++c) jac(r, npvpq + c) = ds_dvm(pvpq[r], pq[c]).real();
        }
        for (Eigen::Index r = 0; r < npq; ++r) {
            for (Eigen::Index c = 0; c < npvpq; ++c) jac(npvpq + r, c) = ds_dva(pq[r], pvpq[c]).imag();
            for (Eigen::Index c = 0; c < npq; ++c) jac(npvpq + r, npvpq + c) = ds_dvm(pq[r], pq[c]).imag();
        }

        const Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        // A singular Jacobian means Newton cannot continue: report it as non-convergence.
        if (!lu.isInvertible()) throw ConvergenceError(op.trace);
        const Eigen::VectorXd dx = lu.solve(f);
        for (Eigen::Index k = 0; k < npvpq; ++k) va[pvpq[k]] -= dx(k);
        for (Eigen::Index k = 0; k < npq; ++k) vm[pq[k]] -= dx(npvpq + k);
        refresh_v();
        ++op.iterations;
        worst = mismatch();
        op.trace.push_back(worst);
    }

    op.v = v;
    op.converged = true;
    op.max_mismatch = worst;

    const ComplexVector s_inj = v.cwiseProduct((y * v).conjugate());
    op.s_gen.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        op.s_gen[i] = s_inj(static_cast<Eigen::Index>(i)) + Complex(op.p_load[i], op.q_load[i]);
    }

    op.pg.resize(system.machines.size());
    op.qg.resize(system.machines.size());
    for (std::size_t k = 0; k < system.machines.size(); ++k) {
        const BusId bus = system.machines[k].bus;
        double share_total = 0;
        for (const auto& m : system.machines) {
            if (m.bus == bus) share_total += m.mva_base;
        }
        const Complex s = op.s_gen[system.bus_index(bus)] * (system.machines[k].mva_base / share_total);
        op.pg[k] = s.real();
        op.qg[k] = s.imag();
    }
    return op;
}

MachineInternal internal_emf(Complex v_terminal, Complex i_terminal, double xd_prime) {
    const Complex e = v_terminal + Complex(0, xd_prime) * i_terminal;
    return {std::abs(e), std::arg(e), (v_terminal * std::conj(i_terminal)).real()};
}

std::vector<MachineInternal> init_machine_internals(const PowerSystem& system, const OperatingPoint& op) {
    if (!op.converged) throw DomainError("machine initialisation needs a converged operating point");
    std::vector<MachineInternal> out;
    out.reserve(system.machines.size());
    for (std::size_t k = 0; k < system.machines.size(); ++k) {
        const auto& m = system.machines[k];
        const Complex vt = op.v(static_cast<Eigen::Index>(system.bus_index(m.bus)));
        const Complex it = std::conj(Complex(op.pg[k], op.qg[k]) / vt);
        out.push_back(internal_emf(vt, it, m.xd_prime_sys(system.system_mva)));
    }
    return out;
}

}  // namespace cbrisk
