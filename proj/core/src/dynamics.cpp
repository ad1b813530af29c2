#include <json.hpp>

#include "cbrisk/errors.h"
#include "cbrisk/network.h"

namespace cbrisk {

namespace {

using nlohmann::json;

WindingConnection parse_connection(const std::string& s) {
    if (s == "yg_d") return WindingConnection::grounded_wye_delta;
    if (s == "d_yg") return WindingConnection::delta_grounded_wye;
    if (s == "yg_yg") return WindingConnection::grounded_wye_grounded_wye;
    if (s == "open") return WindingConnection::open;
    throw ValidationError("unknown winding connection '" + s + "' (expected yg_d, d_yg, yg_yg or open)");
}

double number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ValidationError(where + ": missing '" + key + "'");
    if (!obj[key].is_number()) throw ValidationError(where + ": '" + key + "' must be a number");
    return obj[key].get<double>();
}

}  // namespace

DynamicsData load_dynamics(std::string_view json_text, const PowerSystem& system) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw StructureError(std::string("dynamics sidecar is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("machines") || !doc["machines"].is_array()) {
        throw StructureError("dynamics sidecar needs a 'machines' array");
    }

    DynamicsData out;
    if (doc.contains("f0")) {
        out.f0 = number(doc, "f0", "dynamics");
        if (*out.f0 <= 0) throw ValidationError("dynamics: f0 must be positive");
    }

    std::size_t index = 0;
    for (const auto& m : doc["machines"]) {
        const std::string where = "machine #" + std::to_string(index++);
        MachineDynamics md;
        const double bus = number(m, "bus", where);
        md.bus = static_cast<BusId>(bus);
        if (!system.has_bus(md.bus)) {
            throw ReferenceError(where + " references unknown bus " + std::to_string(md.bus));
        }
        md.h = number(m, "h", where);
        md.xd_prime = number(m, "xd_prime", where);
        md.d = m.contains("d") ? number(m, "d", where) : 0.0;
        md.mva_base = m.contains("mva_base") ? number(m, "mva_base", where) : system.system_mva;
        md.is_condenser = m.value("is_condenser", false);
        md.x0 = m.contains("x0") ? number(m, "x0", where) : 0.0;
        md.grounded = m.value("grounded", true);

        if (md.h <= 0) throw ValidationError(where + " (bus " + std::to_string(md.bus) + "): h must be > 0");
        if (md.xd_prime <= 0) {
            throw ValidationError(where + " (bus " + std::to_string(md.bus) + "): xd_prime must be > 0");
        }
        if (md.d < 0) throw ValidationError(where + " (bus " + std::to_string(md.bus) + "): d must be >= 0");
        if (md.mva_base <= 0) {
            throw ValidationError(where + " (bus " + std::to_string(md.bus) + "): mva_base must be > 0");
        }
        if (md.x0 < 0) throw ValidationError(where + " (bus " + std::to_string(md.bus) + "): x0 must be >= 0");
        out.machines.push_back(md);
    }
    if (out.machines.empty()) throw ValidationError("dynamics sidecar lists no machines");

    if (doc.contains("zero_sequence")) {
        const auto& zs = doc["zero_sequence"];
        auto& data = out.zero_sequence;
        if (zs.contains("line_r_factor")) data.line_r_factor = number(zs, "line_r_factor", "zero_sequence");
        if (zs.contains("line_x_factor")) data.line_x_factor = number(zs, "line_x_factor", "zero_sequence");
        if (zs.contains("transformer_default")) {
            data.transformer_default = parse_connection(zs["transformer_default"].get<std::string>());
        }
        if (zs.contains("branches")) {
            for (const auto& [branch_id, entry] : zs["branches"].items()) {
                const auto k = system.branch_index(branch_id);  // throws ReferenceError
                ZeroSequenceBranch ov;
                const std::string where = "zero_sequence." + branch_id;
                if (entry.contains("r0")) ov.r0 = number(entry, "r0", where);
                if (entry.contains("x0")) {
                    ov.x0 = number(entry, "x0", where);
                    if (*ov.x0 == 0.0) throw ValidationError(where + ": x0 must be non-zero");
                }
                if (entry.contains("connection")) {
                    if (system.branches[k].is_line) {
                        throw ValidationError(where + ": winding connection given for a line");
                    }
                    ov.connection = parse_connection(entry["connection"].get<std::string>());
                }
                data.overrides[branch_id] = ov;
            }
        }
    }
    return out;
}

}  // namespace cbrisk
