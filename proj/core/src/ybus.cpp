#include "cbrisk/ybus.h"

#include <cmath>
#include <numbers>

#include "cbrisk/errors.h"

namespace cbrisk {

void stamp_branch(ComplexMatrix& y, std::size_t from, std::size_t to, Complex z_series, double b_total,
                  Complex tap) {
    const Complex ys = 1.0 / z_series;
    const Complex ysh(0.0, b_total / 2.0);
    y(from, from) += (ys + ysh) / std::norm(tap);
    y(to, to) += ys + ysh;
    y(from, to) -= ys / std::conj(tap);
    y(to, from) -= ys / tap;
}

namespace {

void stamp_zero_sequence(ComplexMatrix& y, const PowerSystem& system, const BranchRecord& br,
                         std::size_t from, std::size_t to) {
    const auto& zs = system.zero_sequence;
    const auto ov = zs.overrides.find(br.id);
    const ZeroSequenceBranch* over = ov == zs.overrides.end() ? nullptr : &ov->second;

    if (br.is_line) {
        const double r0 = over && over->r0 ? *over->r0 : br.r * zs.line_r_factor;
        const double x0 = over && over->x0 ? *over->x0 : br.x * zs.line_x_factor;
        stamp_branch(y, from, to, {r0, x0}, 0.0, 1.0);
        return;
    }

    const Complex z0(over && over->r0 ? *over->r0 : br.r, over && over->x0 ? *over->x0 : br.x);
    const auto conn = over && over->connection ? *over->connection : zs.transformer_default;
    switch (conn) {
        case WindingConnection::grounded_wye_delta: y(from, from) += 1.0 / z0; break;
        case WindingConnection::delta_grounded_wye: y(to, to) += 1.0 / z0; break;
        case WindingConnection::grounded_wye_grounded_wye: stamp_branch(y, from, to, z0, 0.0, br.tap); break;
        case WindingConnection::open: break;
    }
}

}  // namespace

ComplexMatrix build_ybus(const PowerSystem& system, Sequence sequence) {
    const auto n = static_cast<Eigen::Index>(system.bus_count());
    ComplexMatrix y = ComplexMatrix::Zero(n, n);

    for (const auto& br : system.branches) {
        if (!br.in_service) continue;
        if (br.r == 0.0 && br.x == 0.0) {
            throw SingularElementError("branch " + br.id + " has zero series impedance");
        }
        if (br.x == 0.0) throw SingularElementError("branch " + br.id + " has zero series reactance");
        const auto from = system.bus_index(br.from_bus);
        const auto to = system.bus_index(br.to_bus);
        if (sequence == Sequence::zero) {
            stamp_zero_sequence(y, system, br, from, to);
            continue;
        }
        double shift = br.shift_deg * std::numbers::pi / 180.0;
        if (sequence == Sequence::negative) shift = -shift;
        stamp_branch(y, from, to, {br.r, br.x}, br.b, std::polar(br.tap, shift));
    }

    if (sequence != Sequence::zero) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto& bus = system.buses[k];
            y(k, k) += Complex(bus.g_shunt, bus.b_shunt);
        }
    }
    return y;
}

}  // namespace cbrisk
