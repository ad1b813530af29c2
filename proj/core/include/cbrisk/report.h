#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "cbrisk/ranking.h"
#include "cbrisk/simulation.h"

namespace cbrisk {

std::string library_version();

inline constexpr std::string_view kReportCsvHeader =
    "priority_rank,element,breakers,r_a_percent,stderr_percent,n_unstable,n_lg,n_llg,n_ll,n_lll";

/// 100 * fraction with four significant digits.
std::string format_percent(double fraction);

/// One ranked row as written to the CSV report.
struct ReportRow {
    int priority_rank = 0;
    std::string element;
    std::vector<std::string> breakers;
    std::string r_a_percent;
    std::string stderr_percent;
    int n_unstable = 0;
    std::array<int, 4> n_by_type{};  // LG, LLG, LL, LLL

    bool operator==(const ReportRow&) const = default;
};

std::vector<ReportRow> report_rows(const RankingReport& report);

std::string rows_to_csv(const std::vector<ReportRow>& rows);
/// Throws ParseError on a malformed line or header.
std::vector<ReportRow> parse_report_csv(std::string_view text);

std::string rows_to_json(const std::vector<ReportRow>& rows);
std::vector<ReportRow> rows_from_json(std::string_view text);

std::string report_csv(const RankingReport& report);
/// Full-precision entries, flagged elements and the manifest.
std::string report_json(const RankingReport& report);
/// Non-reproducible run facts (wall clock, workers).
std::string run_stats_json(const RankingReport& report);

/// Top `n` rows as a fixed-width table.
std::string top_table(const RankingReport& report, std::size_t n = 5);

/// `t_s,delta_deg_<bus>...` rows in degrees, then comment lines with
/// delta_max_deg, unstable and terminated_early.
std::string trajectory_csv(const Trajectory& trajectory, const std::vector<BusId>& machine_buses);

/// Throws InputError when the path cannot be written.
void write_text_file(const std::string& path, std::string_view content);

}  // namespace cbrisk
