#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "cbrisk/errors.h"
#include "cbrisk/simulation.h"
#include "test_support.h"

using namespace cbrisk;
using cbrisk::testing::case14;
using cbrisk::testing::Gen;
using cbrisk::testing::random_network;
using cbrisk::testing::Smib;

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

Eigen::VectorXd random_vector(Gen& g, Eigen::Index n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = g.uniform(lo, hi);
    return v;
}

// Potential part of the classical-model energy for a lossless reduced network.
double potential(const SwingModel& m, const ComplexMatrix& y, const Eigen::VectorXd& delta) {
    double w = 0;
    for (Eigen::Index i = 0; i < delta.size(); ++i) {
        w -= m.pm(i) * delta(i);
        for (Eigen::Index j = i + 1; j < delta.size(); ++j) {
            w -= m.e_mag(i) * m.e_mag(j) * y(i, j).imag() * std::cos(delta(i) - delta(j));
        }
    }
    return w;
}

double energy(const SwingModel& m, const ComplexMatrix& y, const SwingState& s) {
    double kinetic = 0;
    for (Eigen::Index i = 0; i < s.delta.size(); ++i) {
        if (std::isfinite(m.h(i))) kinetic += m.h(i) * m.omega_s * s.omega_dev(i) * s.omega_dev(i);
    }
    return kinetic + potential(m, y, s.delta);
}

double brute_force_separation(const Trajectory& t) {
    double best = 0;
    for (const auto& s : t.states) {
        for (Eigen::Index i = 0; i < s.delta.size(); ++i) {
            for (Eigen::Index j = 0; j < s.delta.size(); ++j) {
                best = std::max(best, std::abs(s.delta(i) - s.delta(j)) * kDeg);
            }
        }
    }
    return best;
}

Trajectory run_smib(const Smib& smib, double fct, SimulationOptions opts = {}) {
    return simulate(smib.model(), smib.phases(), smib.initial_angles(), fct, opts);
}

}  // namespace

TEST_SUITE("electrical power") {
    TEST_CASE("single machine with only a self admittance") {
        ComplexMatrix y(1, 1);
        y(0, 0) = Complex(0.3, -2.0);
        const Eigen::VectorXd pe = electrical_power(Eigen::VectorXd::Constant(1, 1.2), y, Eigen::VectorXd::Zero(1));
        CHECK(pe(0) == doctest::Approx(1.2 * 1.2 * 0.3));
    }

    TEST_CASE("equal angles across a lossless tie transfer nothing") {
        ComplexMatrix y(2, 2);
        y << Complex(0.1, -5), Complex(0, 5), Complex(0, 5), Complex(0.1, -5);
        const Eigen::VectorXd e = Eigen::Vector2d(1.1, 1.1);
        const Eigen::VectorXd pe = electrical_power(e, y, Eigen::Vector2d(0.4, 0.4));
        CHECK(pe(0) == doctest::Approx(1.21 * 0.1));
        CHECK(pe(1) == doctest::Approx(1.21 * 0.1));
    }

    TEST_CASE("matches the complex-power oracle on random 5-machine networks") {
        Gen g(31);
        for (int trial = 0; trial < 200; ++trial) {
            const ComplexMatrix y = random_network(g, 5);
            const Eigen::VectorXd e = random_vector(g, 5, 0.9, 1.3);
            const Eigen::VectorXd d = random_vector(g, 5, -3, 3);
            ComplexVector phasor(5);
            for (Eigen::Index i = 0; i < 5; ++i) phasor(i) = std::polar(e(i), d(i));
            const ComplexVector current = y * phasor;
            const Eigen::VectorXd pe = electrical_power(e, y, d);
            for (Eigen::Index i = 0; i < 5; ++i) {
                CHECK(std::abs(pe(i) - (phasor(i) * std::conj(current(i))).real()) < 1e-10);
            }
        }
    }

    TEST_CASE("dimension mismatch") {
        CHECK_THROWS_AS(electrical_power(Eigen::VectorXd::Ones(2), ComplexMatrix::Zero(3, 3), Eigen::VectorXd::Zero(2)),
                        DomainError);
    }
}

TEST_SUITE("swing equation") {
    TEST_CASE("equilibrium has zero derivative") {
        SwingModel m;
        m.e_mag = Eigen::Vector2d(1, 1);
        m.pm = Eigen::Vector2d(0.5, -0.2);
        m.h = Eigen::Vector2d(3, 4);
        m.d = Eigen::Vector2d(1, 1);
        const SwingState s{Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d::Zero()};
        const SwingState d = swing_derivatives(s, m.pm, m.pm, m);
        CHECK(d.delta.norm() == 0.0);
        CHECK(d.omega_dev.norm() == 0.0);
    }

    TEST_CASE("accelerating power of 2H gives unit acceleration") {
        SwingModel m;
        m.e_mag = Eigen::VectorXd::Ones(1);
        m.h = Eigen::VectorXd::Constant(1, 4.0);
        m.d = Eigen::VectorXd::Zero(1);
        m.pm = Eigen::VectorXd::Constant(1, 9.0);
        const SwingState s{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 0.01)};
        const SwingState d = swing_derivatives(s, m.pm, Eigen::VectorXd::Constant(1, 1.0), m);
        CHECK(d.omega_dev(0) == doctest::Approx(1.0));
        CHECK(d.delta(0) == doctest::Approx(m.omega_s * 0.01));
    }

    TEST_CASE("acceleration is minus the energy gradient (central differences)") {
        Gen g(32);
        for (int trial = 0; trial < 100; ++trial) {
            const int n = g.integer(2, 6);
            const ComplexMatrix y = random_network(g, n, true);
            SwingModel m;
            m.e_mag = random_vector(g, n, 0.9, 1.3);
            m.pm = random_vector(g, n, -1, 1);
            m.h = random_vector(g, n, 2, 8);
            m.d = Eigen::VectorXd::Zero(n);
            const SwingState s{random_vector(g, n, -2, 2), random_vector(g, n, -0.01, 0.01)};
            const SwingState d = swing_derivatives(s, m.pm, electrical_power(m.e_mag, y, s.delta), m);
            const double h = 1e-6;
            for (Eigen::Index i = 0; i < n; ++i) {
                Eigen::VectorXd up = s.delta, down = s.delta;
                up(i) += h;
                down(i) -= h;
                const double grad = (potential(m, y, up) - potential(m, y, down)) / (2 * h);
                CHECK(std::abs(d.omega_dev(i) + grad / (2 * m.h(i))) < 1e-8);
            }
        }
    }
}

TEST_SUITE("rk4") {
    TEST_CASE("zero right-hand side leaves the state alone") {
        const Eigen::VectorXd x = Eigen::Vector3d(1, 2, 3);
        const auto next = step_rk4(x, 0.0, 0.01, [](double, const Eigen::VectorXd& v) {
            return Eigen::VectorXd::Zero(v.size()).eval();
        });
        CHECK(next == x);
    }

    TEST_CASE("unit slope advances by dt") {
        const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.25);
        const auto next = step_rk4(x, 0.0, 0.001, [](double, const Eigen::VectorXd&) {
            return Eigen::VectorXd::Ones(1).eval();
        });
        CHECK(next(0) == doctest::Approx(0.251).epsilon(1e-14));
    }

    TEST_CASE("fourth-order accuracy on exponential decay") {
        auto decay = [](double, const Eigen::VectorXd& v) { return (-v).eval(); };
        const Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
        const double err1 = std::abs(step_rk4(x, 0, 0.1, decay)(0) - std::exp(-0.1));
        const double err2 = std::abs(step_rk4(x, 0, 0.05, decay)(0) - std::exp(-0.05));
        // Local error scales as dt^5.
        CHECK(err1 / err2 == doctest::Approx(32.0).epsilon(0.05));
    }

    TEST_CASE("non-finite stages raise a blowup carrying the time") {
        const Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
        try {
            step_rk4(x, 1.25, 0.01, [](double, const Eigen::VectorXd&) {
                return Eigen::VectorXd::Constant(1, std::numeric_limits<double>::quiet_NaN()).eval();
            });
            FAIL("expected BlowupError");
        } catch (const BlowupError& e) {
            CHECK(e.time() == 1.25);
        }
        CHECK_THROWS_AS(step_rk4(x, 0, 0.0, [](double, const Eigen::VectorXd& v) { return v; }), DomainError);
    }
}

TEST_SUITE("single machine against an infinite bus") {
    TEST_CASE("analytic clearing time separates stable from unstable") {
        const Smib smib;
        const double cct = smib.critical_time();
        CHECK(cct > 0.1);
        CHECK(cct < 1.0);
        const Trajectory before = run_smib(smib, cct - 0.02);
        const Trajectory after = run_smib(smib, cct + 0.02);
        CHECK_FALSE(before.unstable);
        CHECK(before.delta_max_deg < 180.0);
        CHECK(after.unstable);
        CHECK(after.terminated_early);
    }

    TEST_CASE("halving the step changes the maximum angle by less than 0.1 degree") {
        const Smib smib;
        SimulationOptions coarse;
        coarse.early_exit = false;
        SimulationOptions fine = coarse;
        fine.dt = 0.5e-3;
        // Clearing times on the coarse grid, so both runs clear at the same instant.
        const double near_critical = std::round((smib.critical_time() - 0.03) * 1e3) * 1e-3;
        for (double fct : {0.05, 0.15, near_critical}) {
            const double a = run_smib(smib, fct, coarse).delta_max_deg;
            const double b = run_smib(smib, fct, fine).delta_max_deg;
            CHECK(std::abs(a - b) < 0.1);
        }
    }

    TEST_CASE("lossless undamped fault-on energy drifts less than 0.1%") {
        Smib smib;
        smib.x_fault = 2.0;
        const Trajectory t = run_smib(smib, 0.6);
        const SwingModel m = smib.model();
        const ComplexMatrix y = smib.phases().y_fault;
        const double w0 = energy(m, y, t.states.front());
        double worst = 0;
        for (std::size_t k = 0; k < t.states.size() && t.times[k] <= 0.6 + 1e-12; ++k) {
            worst = std::max(worst, std::abs(energy(m, y, t.states[k]) - w0));
        }
        CHECK(worst / std::abs(w0) < 1e-3);
    }

    TEST_CASE("maximum angle grows with clearing time before instability") {
        const Smib smib;
        double last = 0;
        for (double fct = 0.01; fct < smib.critical_time() - 0.005; fct += 0.01) {
            const double dmax = run_smib(smib, fct).delta_max_deg;
            CHECK(dmax >= last - 1e-9);
            last = dmax;
        }
    }

    TEST_CASE("trajectory bookkeeping") {
        const Smib smib;
        SimulationOptions opts;
        opts.early_exit = false;
        const Trajectory t = run_smib(smib, 0.1, opts);
        CHECK(t.times.size() == 5101);
        CHECK(t.states.size() == t.times.size());
        for (std::size_t k = 1; k < t.times.size(); ++k) {
            CHECK(t.times[k] - t.times[k - 1] == doctest::Approx(1e-3).epsilon(1e-9));
        }
        CHECK(t.delta_max_deg == doctest::Approx(max_angle_separation(t)).epsilon(1e-15));
        CHECK(t.unstable == (t.delta_max_deg > 360.0));
    }

    TEST_CASE("a one-step fault stays near the pre-fault spread") {
        Smib smib;
        smib.x_post = smib.x_pre;
        const Trajectory t = run_smib(smib, 1e-6);
        CHECK_FALSE(t.unstable);
        // 1 ms of free acceleration leaves a swing of about 0.2 degrees.
        CHECK(t.delta_max_deg > smib.delta0() * kDeg);
        CHECK(t.delta_max_deg < smib.delta0() * kDeg + 0.5);
    }

    TEST_CASE("a non-finite model is a blowup, counted unstable") {
        Smib smib;
        SwingModel m = smib.model();
        m.e_mag(0) = std::numeric_limits<double>::quiet_NaN();
        const Trajectory t = simulate(m, smib.phases(), smib.initial_angles(), 0.1);
        CHECK(t.blowup);
        CHECK(t.unstable);
        CHECK(t.delta_max_deg > 360.0);
        CHECK(t.delta_max_deg < 360.0 + 1e-9);
        CHECK_FALSE(t.diagnostic.empty());
    }

    TEST_CASE("bad arguments") {
        const Smib smib;
        CHECK_THROWS_AS(run_smib(smib, 0.0), DomainError);
        SimulationOptions opts;
        opts.dt = -1;
        CHECK_THROWS_AS(run_smib(smib, 0.1, opts), DomainError);
    }
}

TEST_SUITE("angle separation") {
    TEST_CASE("identical angles give zero") {
        Trajectory t;
        for (int k = 0; k < 5; ++k) t.states.push_back({Eigen::Vector3d::Constant(0.3 * k), Eigen::Vector3d::Zero()});
        CHECK(max_angle_separation(t) == 0.0);
    }

    TEST_CASE("radian conversion") {
        Trajectory t;
        for (double d2 : {0.0, 0.7, 1.5, 1.1}) t.states.push_back({Eigen::Vector2d(0.0, d2), Eigen::Vector2d::Zero()});
        CHECK(max_angle_separation(t) == doctest::Approx(85.9437).epsilon(1e-5));
    }

    TEST_CASE("empty trajectory") { CHECK_THROWS_AS(max_angle_separation(Trajectory{}), DomainError); }
}

TEST_SUITE("14-bus dynamics") {
    TEST_CASE("undisturbed system holds its equilibrium for 5 s") {
        const PowerSystem s = case14();
        const OperatingPoint op = solve_power_flow(s);
        const auto internals = init_machine_internals(s, op);
        PhaseMatrices p = build_phase_matrices(s, op, FaultSpec::at_bus(4, FaultType::LLL));
        p.y_fault = p.y_pre;
        p.y_post = p.y_pre;
        SimulationOptions opts;
        opts.post_fault_duration = 5.0;
        const Trajectory t = simulate_scenario(s, internals, p, 1e-3, opts);
        double drift = 0;
        for (const auto& st : t.states) {
            for (std::size_t k = 0; k < internals.size(); ++k) {
                drift = std::max(drift, std::abs(st.delta(static_cast<Eigen::Index>(k)) - internals[k].delta0) * kDeg);
            }
        }
        CHECK(drift < 0.01);
    }

    TEST_CASE("separation equals the exhaustive pair search") {
        const PowerSystem s = case14();
        const OperatingPoint op = solve_power_flow(s);
        const auto internals = init_machine_internals(s, op);
        for (auto t : kAllFaultTypes) {
            const PhaseMatrices p = build_phase_matrices(s, op, FaultSpec::on_line("Line_0002_0003", 0.3, t));
            const Trajectory traj = simulate_scenario(s, internals, p, 0.4);
            CHECK(max_angle_separation(traj) == doctest::Approx(brute_force_separation(traj)).epsilon(1e-15));
            CHECK(traj.delta_max_deg == doctest::Approx(brute_force_separation(traj)).epsilon(1e-15));
            CHECK(traj.unstable == (traj.delta_max_deg > 360.0));
        }
    }

    TEST_CASE("swing model converts machine data to the system base") {
        const PowerSystem s = case14();
        const OperatingPoint op = solve_power_flow(s);
        const SwingModel m = SwingModel::from_system(s, init_machine_internals(s, op));
        CHECK(m.h(0) == doctest::Approx(5.148 * 6.15));
        CHECK(m.d(1) == doctest::Approx(2.0 * 0.6));
        CHECK(m.omega_s == doctest::Approx(2 * std::numbers::pi * 60));
        CHECK_THROWS_AS(SwingModel::from_system(s, {}), DomainError);
    }
}
