#include "cbrisk/report.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "cbrisk/errors.h"

#ifndef CBRISK_VERSION
#define CBRISK_VERSION "unknown"
#endif

namespace cbrisk {

using nlohmann::ordered_json;

std::string library_version() { return CBRISK_VERSION; }

std::string format_percent(double fraction) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", 100.0 * fraction);
    return buf;
}

std::vector<ReportRow> report_rows(const RankingReport& report) {
    std::vector<ReportRow> rows;
    rows.reserve(report.entries.size());
    for (const auto& e : report.entries) {
        rows.push_back({e.priority_rank, e.element, e.breakers, format_percent(e.r_a), format_percent(e.std_error),
                        e.n_unstable, e.n_unstable_by_type});
    }
    return rows;
}

namespace {

std::string join_breakers(const std::vector<std::string>& breakers) {
    if (breakers.empty()) return "-";
    std::string out;
    for (const auto& b : breakers) {
        if (!out.empty()) out += ';';
        out += b;
    }
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

int to_int(const std::string& s, std::size_t line) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, "expected an integer, got '" + s + "'");
    }
}

ordered_json counters_json(const ElementCounters& c) {
    ordered_json j;
    j["rejected_convergence"] = c.rejected_convergence;
    j["rejected_islanding"] = c.rejected_islanding;
    j["blowups"] = c.blowups;
    j["load_clamps"] = c.load_clamps;
    j["fct_clamps"] = c.fct_clamps;
    return j;
}

}  // namespace

std::string rows_to_csv(const std::vector<ReportRow>& rows) {
    std::ostringstream out;
    out << kReportCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.priority_rank << ',' << r.element << ',' << join_breakers(r.breakers) << ',' << r.r_a_percent << ','
            << r.stderr_percent << ',' << r.n_unstable;
        for (int n : r.n_by_type) out << ',' << n;
        out << '\n';
    }
    return out.str();
}

std::vector<ReportRow> parse_report_csv(std::string_view text) {
    std::vector<ReportRow> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            if (line != kReportCsvHeader) throw ParseError(1, "unexpected report header");
            continue;
        }
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 10) throw ParseError(line_no, "expected 10 fields, got " + std::to_string(f.size()));
        ReportRow r;
        r.priority_rank = to_int(f[0], line_no);
        r.element = f[1];
        if (f[2] != "-") r.breakers = split(f[2], ';');
        r.r_a_percent = f[3];
        r.stderr_percent = f[4];
        r.n_unstable = to_int(f[5], line_no);
        for (std::size_t k = 0; k < 4; ++k) r.n_by_type[k] = to_int(f[6 + k], line_no);
        rows.push_back(std::move(r));
    }
    if (line_no == 0) throw ParseError(0, "empty report");
    return rows;
}

std::string rows_to_json(const std::vector<ReportRow>& rows) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json j;
        j["priority_rank"] = r.priority_rank;
        j["element"] = r.element;
        j["breakers"] = r.breakers;
        j["r_a_percent"] = r.r_a_percent;
        j["stderr_percent"] = r.stderr_percent;
        j["n_unstable"] = r.n_unstable;
        j["n_lg"] = r.n_by_type[0];
        j["n_llg"] = r.n_by_type[1];
        j["n_ll"] = r.n_by_type[2];
        j["n_lll"] = r.n_by_type[3];
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

std::vector<ReportRow> rows_from_json(std::string_view text) {
    std::vector<ReportRow> rows;
    try {
        for (const auto& j : ordered_json::parse(text)) {
            ReportRow r;
            r.priority_rank = j.at("priority_rank").get<int>();
            r.element = j.at("element").get<std::string>();
            r.breakers = j.at("breakers").get<std::vector<std::string>>();
            r.r_a_percent = j.at("r_a_percent").get<std::string>();
            r.stderr_percent = j.at("stderr_percent").get<std::string>();
            r.n_unstable = j.at("n_unstable").get<int>();
            r.n_by_type = {j.at("n_lg").get<int>(), j.at("n_llg").get<int>(), j.at("n_ll").get<int>(),
                           j.at("n_lll").get<int>()};
            rows.push_back(std::move(r));
        }
    } catch (const ordered_json::exception& e) {
        throw StructureError(std::string("report rows: ") + e.what());
    }
    return rows;
}

std::string report_csv(const RankingReport& report) { return rows_to_csv(report_rows(report)); }

std::string report_json(const RankingReport& report) {
    ordered_json doc;
    doc["mode"] = std::string(to_string(report.mode));
    ordered_json entries = ordered_json::array();
    for (const auto& e : report.entries) {
        ordered_json j;
        j["priority_rank"] = e.priority_rank;
        j["element"] = e.element;
        j["breakers"] = e.breakers;
        j["r_a"] = e.r_a;
        j["r_a_percent"] = 100.0 * e.r_a;
        j["stderr"] = e.std_error;
        j["stderr_percent"] = 100.0 * e.std_error;
        j["n_unstable"] = e.n_unstable;
        j["n_lg"] = e.n_unstable_by_type[0];
        j["n_llg"] = e.n_unstable_by_type[1];
        j["n_ll"] = e.n_unstable_by_type[2];
        j["n_lll"] = e.n_unstable_by_type[3];
        j["p_lg_unstable"] = e.instability_probability[0];
        j["p_llg_unstable"] = e.instability_probability[1];
        j["p_ll_unstable"] = e.instability_probability[2];
        j["p_lll_unstable"] = e.instability_probability[3];
        j["n_evaluated"] = e.n_evaluated;
        j["n_rejected"] = e.n_rejected;
        entries.push_back(std::move(j));
    }
    doc["entries"] = std::move(entries);

    ordered_json flagged = ordered_json::array();
    for (const auto& f : report.flagged) {
        flagged.push_back({{"element", f.element},
                           {"breakers", f.breakers},
                           {"n_rejected", f.n_rejected},
                           {"reason", f.reason}});
    }
    doc["flagged"] = std::move(flagged);

    const auto& m = report.manifest;
    ordered_json manifest;
    manifest["code_version"] = m.code_version;
    manifest["config"] = ordered_json::parse(config_to_json(m.config));
    manifest["seed"] = m.config.seed;
    manifest["negative_draw_policy"] = "clamp";
    manifest["totals"] = counters_json(m.totals);
    ordered_json per = ordered_json::object();
    for (const auto& [element, c] : m.per_element) per[element] = counters_json(c);
    manifest["per_element"] = std::move(per);
    doc["manifest"] = std::move(manifest);
    return doc.dump(2) + "\n";
}

std::string run_stats_json(const RankingReport& report) {
    ordered_json doc;
    doc["code_version"] = report.manifest.code_version;
    doc["wall_clock_s"] = report.stats.wall_clock_s;
    doc["threads"] = report.stats.threads;
    doc["scenarios"] = report.stats.scenarios;
    return doc.dump(2) + "\n";
}

std::string top_table(const RankingReport& report, std::size_t n) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-5s %-20s %-14s %12s %10s\n", "rank", "element", "breakers", "R_A (%)",
                  "unstable");
    out << buf;
    for (std::size_t k = 0; k < std::min(n, report.entries.size()); ++k) {
        const auto& e = report.entries[k];
        std::snprintf(buf, sizeof buf, "%-5d %-20s %-14s %12s %10d\n", e.priority_rank, e.element.c_str(),
                      join_breakers(e.breakers).c_str(), format_percent(e.r_a).c_str(), e.n_unstable);
        out << buf;
    }
    if (!report.flagged.empty()) out << report.flagged.size() << " element(s) flagged, see JSON report\n";
    return out.str();
}

std::string trajectory_csv(const Trajectory& trajectory, const std::vector<BusId>& machine_buses) {
    std::ostringstream out;
    out << "t_s";
    for (std::size_t k = 0; k < machine_buses.size(); ++k) {
        out << ",delta_deg_" << machine_buses[k];
        if (std::count(machine_buses.begin(), machine_buses.end(), machine_buses[k]) > 1) out << '_' << k;
    }
    out << '\n';
    char buf[64];
    constexpr double to_deg = 180.0 / std::numbers::pi;
    for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6f", trajectory.times[i]);
        out << buf;
        const auto& d = trajectory.states[i].delta;
        for (Eigen::Index k = 0; k < d.size(); ++k) {
            std::snprintf(buf, sizeof buf, ",%.9g", d(k) * to_deg);
            out << buf;
        }
        out << '\n';
    }
    std::snprintf(buf, sizeof buf, "%.9g", trajectory.delta_max_deg);
    out << "# delta_max_deg=" << buf << '\n';
    out << "# unstable=" << (trajectory.unstable ? "true" : "false") << '\n';
    out << "# terminated_early=" << (trajectory.terminated_early ? "true" : "false") << '\n';
    if (trajectory.blowup) out << "# blowup=" << trajectory.diagnostic << '\n';
    return out.str();
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write file: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("failed writing file: " + path);
}

}  // namespace cbrisk
