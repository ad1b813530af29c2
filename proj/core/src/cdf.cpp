// IEEE Common Data Format reader/writer. Column ranges follow the published
// card layout (1-based, inclusive).

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <utility>

#include "cbrisk/errors.h"
#include "cbrisk/network.h"

namespace cbrisk {

namespace {

struct Span {
    int first;
    int last;
};

// Title card
constexpr Span kTitleDate{2, 9};
constexpr Span kTitleOriginator{11, 30};
constexpr Span kTitleMva{32, 37};
constexpr Span kTitleYear{39, 42};
constexpr Span kTitleSeason{44, 44};
constexpr Span kTitleCase{46, 73};

// Bus card
constexpr Span kBusNumber{1, 4};
constexpr Span kBusName{6, 17};
constexpr Span kBusArea{19, 20};
constexpr Span kBusZone{21, 23};
constexpr Span kBusType{25, 26};
constexpr Span kBusVolts{28, 33};
constexpr Span kBusAngle{34, 40};
constexpr Span kBusLoadMw{41, 49};
constexpr Span kBusLoadMvar{50, 59};
constexpr Span kBusGenMw{60, 67};
constexpr Span kBusGenMvar{68, 75};
constexpr Span kBusBaseKv{77, 83};
constexpr Span kBusDesiredV{85, 90};
constexpr Span kBusMax{91, 98};
constexpr Span kBusMin{99, 106};
constexpr Span kBusG{107, 114};
constexpr Span kBusB{115, 122};
constexpr Span kBusRemote{124, 127};

// Branch card
constexpr Span kBrFrom{1, 4};
constexpr Span kBrTo{6, 9};
constexpr Span kBrArea{11, 12};
constexpr Span kBrZone{13, 14};
constexpr Span kBrCircuit{17, 17};
constexpr Span kBrType{19, 19};
constexpr Span kBrR{20, 29};
constexpr Span kBrX{30, 40};
constexpr Span kBrB{41, 50};
constexpr Span kBrRating1{51, 55};
constexpr Span kBrRating2{57, 61};
constexpr Span kBrRating3{63, 67};
constexpr Span kBrTap{77, 82};
constexpr Span kBrShift{84, 90};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string_view column(std::string_view line, Span span) {
    const auto first = static_cast<std::size_t>(span.first - 1);
    if (first >= line.size()) return {};
    const auto len = static_cast<std::size_t>(span.last - span.first + 1);
    return line.substr(first, std::min(len, line.size() - first));
}

class CardReader {
public:
    CardReader(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

    double real(Span span, const char* name, bool required = false) const {
        const auto text = trim(column(line_, span));
        if (text.empty()) {
            if (required) fail(name, "is blank");
            return 0.0;
        }
        double value = 0;
        const auto* begin = text.data();
        if (*begin == '+') ++begin;
        const auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            fail(name, "'" + std::string(text) + "' is not a number");
        }
        return value;
    }

    int integer(Span span, const char* name, bool required = false) const {
        const auto text = trim(column(line_, span));
        if (text.empty()) {
            if (required) fail(name, "is blank");
            return 0;
        }
        int value = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            fail(name, "'" + std::string(text) + "' is not an integer");
        }
        return value;
    }

    std::string text(Span span) const { return std::string(trim(column(line_, span))); }

    [[noreturn]] void fail(const char* name, const std::string& why) const {
        throw ParseError(line_no_, std::string(name) + " " + why);
    }

private:
    std::string_view line_;
    std::size_t line_no_;
};

struct Line {
    std::string_view text;
    std::size_t number;
};

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 1;
    while (!text.empty()) {
        auto eol = text.find('\n');
        auto line = text.substr(0, eol);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back({line, number++});
        if (eol == std::string_view::npos) break;
        text.remove_prefix(eol + 1);
    }
    return lines;
}

bool is_terminator(std::string_view line) {
    const auto t = trim(line);
    return t.size() >= 3 && t.substr(0, 3) == "-99" &&
           std::all_of(t.begin() + 1, t.end(), [](char c) { return c == '9'; });
}

bool starts_with(std::string_view line, std::string_view prefix) {
    return trim(line).substr(0, prefix.size()) == prefix;
}

BusRecord parse_bus(const Line& line, double mva) {
    const CardReader card(line.text, line.number);
    BusRecord bus;
    bus.id = card.integer(kBusNumber, "bus number (1-4)", true);
    bus.name = card.text(kBusName);
    bus.area = card.integer(kBusArea, "area (19-20)");
    bus.zone = card.integer(kBusZone, "loss zone (21-23)");
    bus.cdf_type = card.integer(kBusType, "bus type (25-26)");
    switch (bus.cdf_type) {
        case 0:
        case 1: bus.kind = BusKind::pq; break;
        case 2: bus.kind = BusKind::pv; break;
        case 3: bus.kind = BusKind::slack; break;
        default:
            throw ParseError(line.number, "bus type (25-26) must be 0..3, got " +
                                              std::to_string(bus.cdf_type));
    }
    bus.v_final = card.real(kBusVolts, "final voltage (28-33)");
    bus.angle_final = card.real(kBusAngle, "final angle (34-40)");
    bus.p_load = card.real(kBusLoadMw, "load MW (41-49)") / mva;
    bus.q_load = card.real(kBusLoadMvar, "load MVAR (50-59)") / mva;
    bus.p_gen = card.real(kBusGenMw, "generation MW (60-67)") / mva;
    bus.q_gen = card.real(kBusGenMvar, "generation MVAR (68-75)") / mva;
    bus.base_kv = card.real(kBusBaseKv, "base KV (77-83)");
    bus.v_set = card.real(kBusDesiredV, "desired volts (85-90)");
    bus.q_max = card.real(kBusMax, "maximum (91-98)");
    bus.q_min = card.real(kBusMin, "minimum (99-106)");
    bus.g_shunt = card.real(kBusG, "shunt G (107-114)");
    bus.b_shunt = card.real(kBusB, "shunt B (115-122)");
    bus.remote_bus = card.integer(kBusRemote, "remote bus (124-127)");
    return bus;
}

BranchRecord parse_branch(const Line& line) {
    const CardReader card(line.text, line.number);
    BranchRecord br;
    br.from_bus = card.integer(kBrFrom, "tap bus number (1-4)", true);
    br.to_bus = card.integer(kBrTo, "Z bus number (6-9)", true);
    br.area = card.integer(kBrArea, "area (11-12)");
    br.zone = card.integer(kBrZone, "loss zone (13-14)");
    br.circuit = card.integer(kBrCircuit, "circuit (17)");
    if (br.circuit == 0) br.circuit = 1;
    br.cdf_type = card.integer(kBrType, "branch type (19)");
    if (br.cdf_type < 0 || br.cdf_type > 4) {
        throw ParseError(line.number, "branch type (19) must be 0..4, got " + std::to_string(br.cdf_type));
    }
    br.is_line = br.cdf_type == 0;
    br.r = card.real(kBrR, "resistance (20-29)");
    br.x = card.real(kBrX, "reactance (30-40)", true);
    br.b = card.real(kBrB, "line charging (41-50)");
    br.rating_a = card.real(kBrRating1, "rating 1 (51-55)");
    br.rating_b = card.real(kBrRating2, "rating 2 (57-61)");
    br.rating_c = card.real(kBrRating3, "rating 3 (63-67)");
    br.tap = card.real(kBrTap, "turns ratio (77-82)");
    if (br.tap == 0.0) br.tap = 1.0;
    br.shift_deg = card.real(kBrShift, "phase shift (84-90)");
    return br;
}

void assign_branch_ids(std::vector<BranchRecord>& branches) {
    std::map<std::pair<BusId, BusId>, int> pair_count;
    auto key = [](const BranchRecord& b) {
        return std::minmax(b.from_bus, b.to_bus);
    };
    for (const auto& b : branches) ++pair_count[key(b)];
    for (auto& b : branches) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s_%04d_%04d", b.is_line ? "Line" : "Trf", b.from_bus, b.to_bus);
        b.id = buf;
        if (pair_count[key(b)] > 1) b.id += "/" + std::to_string(b.circuit);
    }
}

// --- writer helpers ---

void put(std::string& line, Span span, std::string_view text, bool right_justify) {
    const auto width = static_cast<std::size_t>(span.last - span.first + 1);
    if (text.size() > width) {
        throw ValidationError("value '" + std::string(text) + "' does not fit columns " +
                              std::to_string(span.first) + "-" + std::to_string(span.last));
    }
    if (line.size() < static_cast<std::size_t>(span.last)) line.resize(span.last, ' ');
    const std::size_t offset = right_justify ? width - text.size() : 0;
    line.replace(span.first - 1 + offset, text.size(), text);
}

std::string fit_real(double value, Span span) {
    const int width = span.last - span.first + 1;
    char buf[48];
    for (int precision = 17; precision >= 1; --precision) {
        const int n = std::snprintf(buf, sizeof buf, "%.*g", precision, value);
        if (n <= width) {
            return std::string(buf, n);
        }
    }
    throw ValidationError("value " + std::to_string(value) + " does not fit columns " +
                          std::to_string(span.first) + "-" + std::to_string(span.last));
}

void put_real(std::string& line, Span span, double value) { put(line, span, fit_real(value, span), true); }

void put_int(std::string& line, Span span, int value) { put(line, span, std::to_string(value), true); }

}  // namespace

PowerSystem parse_cdf(std::string_view text) {
    const auto lines = split_lines(text);
    auto it = std::find_if(lines.begin(), lines.end(), [](const Line& l) { return !trim(l.text).empty(); });
    if (it == lines.end()) throw StructureError("empty CDF input");

    PowerSystem system;
    {
        const CardReader title(it->text, it->number);
        if (starts_with(it->text, "BUS DATA")) throw StructureError("missing title card before BUS DATA");
        system.header.date = title.text(kTitleDate);
        system.header.originator = title.text(kTitleOriginator);
        system.system_mva = title.real(kTitleMva, "MVA base (32-37)", true);
        if (system.system_mva <= 0) throw ParseError(it->number, "MVA base (32-37) must be positive");
        system.header.year = title.integer(kTitleYear, "year (39-42)");
        const auto season = title.text(kTitleSeason);
        system.header.season = season.empty() ? ' ' : season.front();
        system.header.case_id = title.text(kTitleCase);
        ++it;
    }

    auto read_section = [&](std::string_view header, auto&& parse_record) {
        it = std::find_if(it, lines.end(), [&](const Line& l) { return starts_with(l.text, header); });
        if (it == lines.end()) throw StructureError("missing '" + std::string(header) + " FOLLOWS' section");
        const std::size_t header_line = it->number;
        for (++it; it != lines.end(); ++it) {
            if (is_terminator(it->text)) {
                ++it;
                return;
            }
            if (trim(it->text).empty()) continue;
            parse_record(*it);
        }
        throw StructureError("section '" + std::string(header) + "' starting at line " +
                             std::to_string(header_line) + " has no -999 terminator");
    };

    read_section("BUS DATA", [&](const Line& l) { system.buses.push_back(parse_bus(l, system.system_mva)); });
    read_section("BRANCH DATA", [&](const Line& l) { system.branches.push_back(parse_branch(l)); });
    assign_branch_ids(system.branches);

    validate_network(system);
    return system;
}

std::string write_cdf(const PowerSystem& system) {
    std::string out;
    const double mva = system.system_mva;
    {
        std::string line(73, ' ');
        put(line, kTitleDate, system.header.date, false);
        put(line, kTitleOriginator, system.header.originator, false);
        put_real(line, kTitleMva, mva);
        if (system.header.year != 0) put_int(line, kTitleYear, system.header.year);
        put(line, kTitleSeason, std::string(1, system.header.season), false);
        put(line, kTitleCase, system.header.case_id, false);
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + "\n";
    }

    char buf[96];
    std::snprintf(buf, sizeof buf, "BUS DATA FOLLOWS                            %zu ITEMS\n", system.buses.size());
    out += buf;
    for (const auto& bus : system.buses) {
        std::string line(127, ' ');
        put_int(line, kBusNumber, bus.id);
        put(line, kBusName, bus.name, false);
        put_int(line, kBusArea, bus.area);
        put_int(line, kBusZone, bus.zone);
        put_int(line, kBusType, bus.cdf_type);
        put_real(line, kBusVolts, bus.v_final);
        put_real(line, kBusAngle, bus.angle_final);
        put_real(line, kBusLoadMw, bus.p_load * mva);
        put_real(line, kBusLoadMvar, bus.q_load * mva);
        put_real(line, kBusGenMw, bus.p_gen * mva);
        put_real(line, kBusGenMvar, bus.q_gen * mva);
        put_real(line, kBusBaseKv, bus.base_kv);
        put_real(line, kBusDesiredV, bus.v_set);
        put_real(line, kBusMax, bus.q_max);
        put_real(line, kBusMin, bus.q_min);
        put_real(line, kBusG, bus.g_shunt);
        put_real(line, kBusB, bus.b_shunt);
        put_int(line, kBusRemote, bus.remote_bus);
        out += line + "\n";
    }
    out += "-999\n";

    std::snprintf(buf, sizeof buf, "BRANCH DATA FOLLOWS                         %zu ITEMS\n",
                  system.branches.size());
    out += buf;
    for (const auto& br : system.branches) {
        std::string line(90, ' ');
        put_int(line, kBrFrom, br.from_bus);
        put_int(line, kBrTo, br.to_bus);
        put_int(line, kBrArea, br.area);
        put_int(line, kBrZone, br.zone);
        put_int(line, kBrCircuit, br.circuit);
        put_int(line, kBrType, br.cdf_type);
        put_real(line, kBrR, br.r);
        put_real(line, kBrX, br.x);
        put_real(line, kBrB, br.b);
        put_real(line, kBrRating1, br.rating_a);
        put_real(line, kBrRating2, br.rating_b);
        put_real(line, kBrRating3, br.rating_c);
        put_real(line, kBrTap, br.tap == 1.0 && br.is_line ? 0.0 : br.tap);
        put_real(line, kBrShift, br.shift_deg);
        out += line + "\n";
    }
    out += "-999\n";
    out += "END OF DATA\n";
    return out;
}

}  // namespace cbrisk
