#include "cbrisk/faults.h"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "cbrisk/errors.h"
#include "cbrisk/kron.h"

namespace cbrisk {

std::string_view to_string(FaultType type) {
    switch (type) {
        case FaultType::LG: return "LG";
        case FaultType::LLG: return "LLG";
        case FaultType::LL: return "LL";
        case FaultType::LLL: return "LLL";
    }
    return "?";
}

FaultType parse_fault_type(std::string_view text) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    for (auto t : kAllFaultTypes) {
        if (to_string(t) == upper) return t;
    }
    throw DomainError("unknown fault type '" + std::string(text) + "' (expected LG, LLG, LL or LLL)");
}

FaultedSystem insert_fault_node(const PowerSystem& system, std::string_view line_id, double fraction) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw DomainError("fault location " + std::to_string(fraction) + " outside [0, 1]");
    }
    const std::size_t k = system.branch_index(line_id);
    const BranchRecord& line = system.branches[k];
    if (!line.is_line) throw DomainError("branch " + line.id + " is a transformer and cannot host a fault");
    if (!line.in_service) throw DomainError("line " + line.id + " is out of service");

    if (fraction == 0.0) return {system, system.bus_index(line.from_bus), false};
    if (fraction == 1.0) return {system, system.bus_index(line.to_bus), false};

    FaultedSystem out{system, system.bus_count(), true};
    PowerSystem& aug = out.system;

    BusRecord node;
    node.id = 1 + std::max_element(system.buses.begin(), system.buses.end(), [](const auto& a, const auto& b) {
                      return a.id < b.id;
                  })->id;
    node.name = "FAULT";
    node.kind = BusKind::pq;
    node.base_kv = system.buses[system.bus_index(line.from_bus)].base_kv;
    aug.buses.push_back(node);

    BranchRecord near = line;
    near.id = line.id + "#a";
    near.to_bus = node.id;
    near.r = line.r * fraction;
    near.x = line.x * fraction;
    near.b = line.b * fraction;

    BranchRecord far = line;
    far.id = line.id + "#b";
    far.from_bus = node.id;
    far.r = line.r * (1.0 - fraction);
    far.x = line.x * (1.0 - fraction);
    far.b = line.b * (1.0 - fraction);

    aug.branches[k] = near;
    aug.branches.insert(aug.branches.begin() + static_cast<std::ptrdiff_t>(k) + 1, far);

    auto& overrides = aug.zero_sequence.overrides;
    if (auto it = overrides.find(line.id); it != overrides.end()) {
        const ZeroSequenceBranch whole = it->second;
        auto scaled = [&](double f) {
            ZeroSequenceBranch s = whole;
            if (s.r0) *s.r0 *= f;
            if (s.x0) *s.x0 *= f;
            return s;
        };
        overrides.erase(it);
        overrides[near.id] = scaled(fraction);
        overrides[far.id] = scaled(1.0 - fraction);
    }
    return out;
}

std::vector<Complex> load_admittances(const PowerSystem& system, const OperatingPoint& op) {
    const std::size_t n = system.bus_count();
    std::vector<Complex> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const BusId id = system.buses[i].id;
        const bool has_machine =
            std::any_of(system.machines.begin(), system.machines.end(), [id](const auto& m) { return m.bus == id; });
        Complex s(op.p_load[i], op.q_load[i]);
        if (!has_machine) s -= op.s_gen[i];
        y[i] = std::conj(s) / std::norm(op.v(static_cast<Eigen::Index>(i)));
    }
    return y;
}

ComplexMatrix sequence_network(const PowerSystem& system, Sequence sequence, std::span<const Complex> load_admittance) {
    ComplexMatrix y = build_ybus(system, sequence);
    const double mva = system.system_mva;
    for (const auto& m : system.machines) {
        const auto k = static_cast<Eigen::Index>(system.bus_index(m.bus));
        if (sequence == Sequence::zero) {
            if (m.grounded) y(k, k) += 1.0 / Complex(0.0, m.x0_sys(mva));
        } else {
            y(k, k) += 1.0 / Complex(0.0, m.xd_prime_sys(mva));
        }
    }
    if (sequence != Sequence::zero) {
        for (std::size_t i = 0; i < load_admittance.size(); ++i) {
            y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += load_admittance[i];
        }
    }
    return y;
}

SequenceImpedance thevenin_impedance(const ComplexMatrix& y, std::size_t node) {
    const auto n = static_cast<std::size_t>(y.rows());
    if (node >= n) throw DomainError("thevenin_impedance: node out of range");

    // Connected piece containing `node`.
    std::vector<std::size_t> members{node};
    std::vector<bool> seen(n, false);
    seen[node] = true;
    for (std::size_t head = 0; head < members.size(); ++head) {
        const auto i = static_cast<Eigen::Index>(members[head]);
        for (std::size_t j = 0; j < n; ++j) {
            if (!seen[j] && (y(i, static_cast<Eigen::Index>(j)) != Complex{} ||
                             y(static_cast<Eigen::Index>(j), i) != Complex{})) {
                seen[j] = true;
                members.push_back(j);
            }
        }
    }
    std::sort(members.begin(), members.end());

    const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
    bool grounded = false;
    for (auto i : members) {
        if (std::abs(y.row(static_cast<Eigen::Index>(i)).sum()) > 1e-9 * scale) {
            grounded = true;
            break;
        }
    }
    if (!grounded) return SequenceImpedance::open();

    const auto m = static_cast<Eigen::Index>(members.size());
    ComplexMatrix sub(m, m);
    Eigen::Index pos = 0;
    for (Eigen::Index a = 0; a < m; ++a) {
        if (members[a] == node) pos = a;
        for (Eigen::Index b = 0; b < m; ++b) {
            sub(a, b) = y(static_cast<Eigen::Index>(members[a]), static_cast<Eigen::Index>(members[b]));
        }
    }
    const Eigen::FullPivLU<ComplexMatrix> lu(sub);
    if (!lu.isInvertible()) return SequenceImpedance::open();
    ComplexVector e = ComplexVector::Zero(m);
    e(pos) = 1.0;
    return {lu.solve(e)(pos), false};
}

SequenceImpedance thevenin_sequence_impedance(const PowerSystem& system, std::size_t node, Sequence sequence,
                                              std::span<const Complex> load_admittance) {
    return thevenin_impedance(sequence_network(system, sequence, load_admittance), node);
}

FaultShunt effective_fault_admittance(FaultType type, SequenceImpedance z0, SequenceImpedance z2, Complex zf) {
    SequenceImpedance eff;
    switch (type) {
        case FaultType::LLL: eff = {zf, false}; break;
        case FaultType::LL: eff = z2.infinite ? SequenceImpedance::open() : SequenceImpedance{z2.z + zf, false}; break;
        case FaultType::LG:
            eff = (z0.infinite || z2.infinite) ? SequenceImpedance::open()
                                                : SequenceImpedance{z0.z + z2.z + 3.0 * zf, false};
            break;
        case FaultType::LLG: {
            const SequenceImpedance ground = z0.infinite ? SequenceImpedance::open()
                                                         : SequenceImpedance{z0.z + 3.0 * zf, false};
            if (z2.infinite && ground.infinite) {
                eff = SequenceImpedance::open();
            } else if (z2.infinite) {
                eff = ground;
            } else if (ground.infinite) {
                eff = z2;
            } else {
                const Complex sum = z2.z + ground.z;
                eff = {sum == Complex{} ? Complex{} : z2.z * ground.z / sum, false};
            }
            break;
        }
    }
    if (eff.infinite) return {};
    if (eff.z == Complex{}) return {{}, true};
    return {1.0 / eff.z, false};
}

ComplexMatrix augmented_network(const PowerSystem& system, std::span<const Complex> load_admittance) {
    const auto nb = static_cast<Eigen::Index>(system.bus_count());
    const auto nm = static_cast<Eigen::Index>(system.machines.size());
    ComplexMatrix y = ComplexMatrix::Zero(nb + nm, nb + nm);
    y.topLeftCorner(nb, nb) = build_ybus(system, Sequence::positive);
    for (std::size_t i = 0; i < load_admittance.size(); ++i) {
        y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += load_admittance[i];
    }
    for (Eigen::Index k = 0; k < nm; ++k) {
        const auto& m = system.machines[static_cast<std::size_t>(k)];
        const auto b = static_cast<Eigen::Index>(system.bus_index(m.bus));
        const Complex ym = 1.0 / Complex(0.0, m.xd_prime_sys(system.system_mva));
        y(b, b) += ym;
        y(nb + k, nb + k) += ym;
        y(b, nb + k) -= ym;
        y(nb + k, b) -= ym;
    }
    return y;
}

std::string bus_fault_host_line(const PowerSystem& system, BusId bus) {
    for (auto k : system.line_indices()) {
        const auto& br = system.branches[k];
        if (br.from_bus == bus || br.to_bus == bus) return br.id;
    }
    throw ReferenceError("bus " + std::to_string(bus) + " has no in-service line");
}

PowerSystem without_branch(const PowerSystem& system, std::string_view branch_id) {
    PowerSystem out = system;
    out.branches.erase(out.branches.begin() + static_cast<std::ptrdiff_t>(system.branch_index(branch_id)));
    return out;
}

void check_connected(const PowerSystem& system, std::string_view context) {
    const std::size_t n = system.bus_count();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (const auto& br : system.branches) {
        if (br.in_service) parent[find(system.bus_index(br.from_bus))] = find(system.bus_index(br.to_bus));
    }
    const std::size_t root = find(system.slack_index());
    std::vector<BusId> cut;
    for (std::size_t i = 0; i < n; ++i) {
        if (find(i) != root) cut.push_back(system.buses[i].id);
    }
    if (cut.empty()) return;
    for (const auto& m : system.machines) {
        if (std::find(cut.begin(), cut.end(), m.bus) != cut.end()) {
            throw IslandingError(std::string(context) + ": machine at bus " + std::to_string(m.bus) + " islanded");
        }
    }
    throw IslandingError(std::string(context) + ": bus " + std::to_string(cut.front()) + " islanded");
}

namespace {

std::vector<std::size_t> machine_nodes(std::size_t n_bus, std::size_t n_machines) {
    std::vector<std::size_t> keep(n_machines);
    std::iota(keep.begin(), keep.end(), n_bus);
    return keep;
}

}  // namespace

PhaseMatrices build_phase_matrices(const PowerSystem& system, const OperatingPoint& op, const FaultSpec& fault) {
    const std::size_t nb = system.bus_count();
    const std::size_t nm = system.machines.size();
    const std::vector<Complex> loads = load_admittances(system, op);

    PhaseMatrices out;
    out.y_pre = kron_reduce(augmented_network(system, loads), machine_nodes(nb, nm));

    FaultedSystem faulted;
    if (const auto* lf = std::get_if<LineFault>(&fault.target)) {
        if (!system.branch(lf->line_id).in_service) {
            out.y_fault = out.y_pre;
            out.y_post = out.y_pre;
            return out;
        }
        faulted = insert_fault_node(system, lf->line_id, lf->fraction);
        out.tripped_branch = lf->line_id;
    } else {
        const BusId bus = std::get<BusFault>(fault.target).bus;
        faulted = {system, system.bus_index(bus), false};
        out.tripped_branch = bus_fault_host_line(system, bus);
    }

    std::vector<Complex> aug_loads = loads;
    aug_loads.resize(faulted.system.bus_count(), Complex{});

    SequenceImpedance z0 = SequenceImpedance::open();
    SequenceImpedance z2 = SequenceImpedance::open();
    if (fault.type != FaultType::LLL) {
        z2 = thevenin_sequence_impedance(faulted.system, faulted.fault_node, Sequence::negative, aug_loads);
        if (fault.type != FaultType::LL) {
            z0 = thevenin_sequence_impedance(faulted.system, faulted.fault_node, Sequence::zero);
        }
    }
    out.shunt = effective_fault_admittance(fault.type, z0, z2, fault.zf);

    const std::size_t nf = faulted.system.bus_count();
    ComplexMatrix yf = augmented_network(faulted.system, aug_loads);
    const auto node = static_cast<Eigen::Index>(faulted.fault_node);
    if (out.shunt.grounded) {
        // A bolted node sits at zero voltage: drop its row and column.
        const auto total = yf.rows();
        std::vector<Eigen::Index> idx;
        for (Eigen::Index i = 0; i < total; ++i) {
            if (i != node) idx.push_back(i);
        }
        ComplexMatrix sub(total - 1, total - 1);
        for (Eigen::Index a = 0; a < total - 1; ++a) {
            for (Eigen::Index b = 0; b < total - 1; ++b) sub(a, b) = yf(idx[a], idx[b]);
        }
        out.y_fault = kron_reduce(sub, machine_nodes(nf - 1, nm));
    } else {
        yf(node, node) += out.shunt.y;
        out.y_fault = kron_reduce(yf, machine_nodes(nf, nm));
    }

    const PowerSystem post = without_branch(system, out.tripped_branch);
    check_connected(post, "clearing " + out.tripped_branch);
    out.y_post = kron_reduce(augmented_network(post, loads), machine_nodes(nb, nm));
    return out;
}

}  // namespace cbrisk
