#include <doctest.h>

#include <atomic>
#include <map>
#include <set>
#include <string>

#include "cbrisk/errors.h"
#include "cbrisk/ranking.h"
#include "cbrisk/scenario.h"
#include "test_support.h"

using namespace cbrisk;
using cbrisk::testing::case14;

namespace {

// Unstable with a fixed maximum separation on chosen elements, else stable.
ScenarioFn fixed_outcomes(const std::map<std::string, double>& delta_by_element, std::size_t n_elements,
                          CampaignMode mode) {
    return [=](const ScenarioSample& s) {
        ScenarioOutcome out;
        out.sample = s;
        const auto it = delta_by_element.find(s.element);
        const double d = it == delta_by_element.end() ? 100.0 : it->second;
        out.risk = make_risk_sample(fault_probability_factors(mode, n_elements, s.ftype), s.ftype, d);
        return out;
    };
}

CampaignConfig small_config(CampaignMode mode, std::size_t n) {
    CampaignConfig c;
    c.mode = mode;
    c.n_samples = n;
    return c;
}

}  // namespace

TEST_SUITE("ranking") {
    TEST_CASE("elements are ranked by risk, ties broken by id") {
        const PowerSystem s = case14();
        const auto elements = campaign_elements(s, CampaignMode::line_faults);
        REQUIRE(elements.size() == 16);
        const std::map<std::string, double> deltas{
            {elements[3], 500.0}, {elements[7], 720.0}, {elements[1], 500.0}};
        const RankingReport r = rank_elements(s, small_config(CampaignMode::line_faults, 20),
                                              fixed_outcomes(deltas, 16, CampaignMode::line_faults));
        REQUIRE(r.entries.size() == 16);
        CHECK(r.entries[0].element == elements[7]);
        // Equal deltas: the random fault types decide, so just check ordering.
        for (std::size_t k = 1; k < r.entries.size(); ++k) {
            CHECK(r.entries[k - 1].r_a >= r.entries[k].r_a);
            if (r.entries[k - 1].r_a == r.entries[k].r_a) CHECK(r.entries[k - 1].element < r.entries[k].element);
            CHECK(r.entries[k].priority_rank == static_cast<int>(k + 1));
        }
        CHECK(r.entries[0].n_unstable == 20);
        CHECK(r.entries[0].instability_probability[0] + r.entries[0].instability_probability[1] +
                  r.entries[0].instability_probability[2] + r.entries[0].instability_probability[3] ==
              doctest::Approx(1.0));
        CHECK(r.entries.back().r_a == 0.0);
        CHECK(r.flagged.empty());
    }

    TEST_CASE("assign_ranks") {
        std::vector<RankingEntry> e(4);
        e[0].element = "b";
        e[0].r_a = 0.1;
        e[1].element = "a";
        e[1].r_a = 0.1;
        e[2].element = "c";
        e[2].r_a = 0.3;
        e[3].element = "d";
        assign_ranks(e);
        CHECK(e[0].element == "c");
        CHECK(e[1].element == "a");
        CHECK(e[2].element == "b");
        CHECK(e[3].element == "d");
        for (int k = 0; k < 4; ++k) CHECK(e[static_cast<std::size_t>(k)].priority_rank == k + 1);
    }

    TEST_CASE("rejections are counted, all-rejected elements are flagged") {
        const PowerSystem s = case14();
        const auto elements = campaign_elements(s, CampaignMode::bus_faults);
        REQUIRE(elements.size() == 12);
        const std::string dead = elements[2];
        const std::string half = elements[5];
        ScenarioFn fn = [&](const ScenarioSample& smp) {
            ScenarioOutcome out;
            out.sample = smp;
            if (smp.element == dead) {
                out.status = ScenarioStatus::rejected_islanding;
            } else if (smp.element == half && smp.index % 2 == 0) {
                out.status = ScenarioStatus::rejected_convergence;
            } else {
                out.risk = make_risk_sample(fault_probability_factors(CampaignMode::bus_faults, 12, smp.ftype),
                                            smp.ftype, 400.0);
            }
            return out;
        };
        const RankingReport r = rank_elements(s, small_config(CampaignMode::bus_faults, 10), fn);
        CHECK(r.entries.size() == 11);
        REQUIRE(r.flagged.size() == 1);
        CHECK(r.flagged[0].element == dead);
        CHECK(r.flagged[0].n_rejected == 10);
        CHECK_FALSE(r.flagged[0].breakers.empty());
        for (const auto& e : r.entries) {
            if (e.element == half) {
                CHECK(e.n_evaluated == 5);
                CHECK(e.n_rejected == 5);
                CHECK(e.n_unstable == 5);
            }
        }
        CHECK(r.manifest.per_element.at(half).rejected_convergence == 5);
        CHECK(r.manifest.per_element.at(dead).rejected_islanding == 10);
        CHECK(r.manifest.totals.rejected_convergence == 5);
        CHECK(r.manifest.totals.rejected_islanding == 10);
    }

    TEST_CASE("worker exceptions propagate") {
        const PowerSystem s = case14();
        ScenarioFn fn = [](const ScenarioSample& smp) -> ScenarioOutcome {
            if (smp.index == 3) throw NumericalError("boom");
            ScenarioOutcome out;
            out.sample = smp;
            return out;
        };
        RankingOptions opt;
        opt.threads = 3;
        CHECK_THROWS_AS(rank_elements(s, small_config(CampaignMode::line_faults, 5), fn, opt), NumericalError);
    }

    TEST_CASE("results do not depend on the worker count") {
        const PowerSystem s = case14();
        const CampaignConfig c = small_config(CampaignMode::line_faults, 3);
        RankingOptions one, four;
        one.threads = 1;
        four.threads = 4;
        std::atomic<std::size_t> last{0};
        four.progress = [&](std::size_t done, std::size_t total) {
            CHECK(done <= total);
            last = done;
        };
        const RankingReport a = rank_elements(s, c, one);
        const RankingReport b = rank_elements(s, c, four);
        CHECK(a.entries == b.entries);
        CHECK(a.manifest.per_element == b.manifest.per_element);
        CHECK(b.stats.threads == 4);
        CHECK(b.stats.scenarios == 48);
        CHECK(last == 48);
    }

    TEST_CASE("deterministic bus faults cover every breaker bus once") {
        const PowerSystem s = case14();
        const RankingReport r = rank_deterministic_lll(s);
        REQUIRE(r.entries.size() == 12);
        std::set<std::string> names;
        std::set<std::string> breakers;
        for (const auto& e : r.entries) {
            names.insert(e.element);
            CHECK(e.n_evaluated == 1);
            CHECK(e.r_a >= 0);
            CHECK(e.r_a < 1);
            CHECK((e.r_a > 0) == (e.n_unstable == 1));
            for (const auto& b : e.breakers) breakers.insert(b);
        }
        CHECK(names.size() == 12);
        CHECK(breakers.size() == 32);
        CHECK(r.mode == CampaignMode::deterministic_lll);
        // Buses 1 and 2 sit next to the large machines; their faults are the severe ones.
        CHECK(r.entries[0].element == "Bus_0002");
        CHECK(r.entries[1].element == "Bus_0001");
    }

    TEST_CASE("line campaign covers every line with two breakers") {
        const PowerSystem s = case14();
        const RankingReport r = rank_elements(s, small_config(CampaignMode::line_faults, 2));
        REQUIRE(r.entries.size() == 16);
        std::set<std::string> breakers;
        for (const auto& e : r.entries) {
            CHECK(e.breakers.size() == 2);
            CHECK(e.n_evaluated + e.n_rejected == 2);
            CHECK(e.r_a < 4.4e-4);
            for (const auto& b : e.breakers) breakers.insert(b);
        }
        CHECK(breakers.size() == 32);
        CHECK(r.manifest.config.n_samples == 2);
    }
}
