#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cbrisk/network.h"
#include "cbrisk_cli/app.h"
#include "test_support.h"

using namespace cbrisk;
using cbrisk::testing::data_path;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "cbrisk");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "cbrisk_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) { return read_text_file(p.string()); }

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

}  // namespace

TEST_SUITE("command line") {
    TEST_CASE("help and version exit cleanly") {
        CHECK(run_cli({"--help"}).code == 0);
        CHECK(run_cli({"rank-lines", "--help"}).code == 0);
        CHECK(run_cli({}).code == cli::kInputError);
        CHECK(run_cli({"rank-lines", "--system", "x"}).code == cli::kInputError);
    }

    TEST_CASE("missing files are input errors") {
        const Result r = run_cli({"validate", "--system", "/no/such/case.cdf"});
        CHECK(r.code == cli::kInputError);
        CHECK(r.err.find("/no/such/case.cdf") != std::string::npos);
    }

    TEST_CASE("validate and powerflow on the shipped case") {
        const Result v = run_cli({"validate", "--system", data_path("case14.cdf"), "--dyn", data_path("dyn14.json")});
        CHECK(v.code == 0);
        CHECK(v.out.find("14 buses") != std::string::npos);
        const Result p = run_cli({"powerflow", "--system", data_path("case14.cdf")});
        CHECK(p.code == 0);
        CHECK(p.out.find("converged") != std::string::npos);
    }

    TEST_CASE("a dangling bus names the bus") {
        PowerSystem s = cbrisk::testing::case14_network_only();
        BusRecord extra = s.buses.back();
        extra.id = 15;
        extra.name = "Bus 15";
        s.buses.push_back(extra);
        const fs::path p = scratch_dir() / "dangling.cdf";
        write_file(p, write_cdf(s));
        const Result r = run_cli({"validate", "--system", p.string()});
        CHECK(r.code == cli::kInputError);
        CHECK(r.err.find("bus 15") != std::string::npos);
    }

    TEST_CASE("an unsolvable base case exits with the power-flow code") {
        PowerSystem s = cbrisk::testing::case14_network_only();
        for (auto& b : s.buses) {
            b.p_load *= 12;
            b.q_load *= 12;
        }
        const fs::path p = scratch_dir() / "heavy.cdf";
        write_file(p, write_cdf(s));
        const Result r = run_cli({"powerflow", "--system", p.string()});
        CHECK(r.code == cli::kPowerFlowFailed);
        const Result c = run_cli({"rank-buses-det", "--system", p.string(), "--dyn", data_path("dyn14.json"), "--out",
                                  (scratch_dir() / "heavy").string()});
        CHECK(c.code == cli::kPowerFlowFailed);
    }

    TEST_CASE("deterministic ranking is reproducible") {
        const fs::path a = scratch_dir() / "det_a";
        const fs::path b = scratch_dir() / "det_b";
        const std::vector<std::string> base{"rank-buses-det", "--system", data_path("case14.cdf"), "--dyn",
                                            data_path("dyn14.json")};
        auto args_a = base;
        args_a.insert(args_a.end(), {"--out", a.string(), "--threads", "1"});
        auto args_b = base;
        args_b.insert(args_b.end(), {"--out", b.string(), "--threads", "3"});
        const Result ra = run_cli(args_a);
        const Result rb = run_cli(args_b);
        REQUIRE(ra.code == 0);
        REQUIRE(rb.code == 0);
        CHECK(slurp(a.string() + ".csv") == slurp(b.string() + ".csv"));
        CHECK(slurp(a.string() + ".json") == slurp(b.string() + ".json"));
        CHECK(fs::exists(a.string() + ".run.json"));
        CHECK(ra.out.find("Bus_0002") != std::string::npos);
    }

    TEST_CASE("simulate-one writes a trajectory") {
        const fs::path stem = scratch_dir() / "traj";
        const Result r = run_cli({"simulate-one", "--system", data_path("case14.cdf"), "--dyn", data_path("dyn14.json"),
                                  "--line", "Line_0006_0013", "--type", "LG", "--fct", "0.1", "--out", stem.string(),
                                  "--full-horizon"});
        REQUIRE(r.code == 0);
        const std::string csv = slurp(stem.string() + ".csv");
        CHECK(csv.rfind("t_s,delta_deg_1,delta_deg_2,delta_deg_3,delta_deg_6,delta_deg_8\n", 0) == 0);
        CHECK(csv.find("# unstable=false") != std::string::npos);
        std::size_t rows = 0;
        std::istringstream in(csv);
        for (std::string line; std::getline(in, line);) rows += !line.empty() && line[0] != '#' && line[0] != 't';
        CHECK(rows == 5101);

        CHECK(run_cli({"simulate-one", "--system", data_path("case14.cdf"), "--dyn", data_path("dyn14.json"), "--out",
                       stem.string()})
                  .code == cli::kInputError);
        CHECK(run_cli({"simulate-one", "--system", data_path("case14.cdf"), "--dyn", data_path("dyn14.json"), "--bus",
                       "4", "--type", "XYZ", "--out", stem.string()})
                  .code == cli::kInputError);
    }
}
