#include <doctest.h>

#include <cmath>
#include <vector>

#include "cbrisk/errors.h"
#include "cbrisk/risk.h"
#include "test_support.h"

using namespace cbrisk;
using cbrisk::testing::Gen;

TEST_SUITE("severity index") {
    TEST_CASE("tssi values") {
        CHECK(tssi(360) == 0.0);
        CHECK(tssi(0) == 1.0);
        CHECK(tssi(540) == doctest::Approx(-0.2));
        CHECK_THROWS_AS(tssi(-1), DomainError);
        CHECK_THROWS_AS(tssi(std::nan("")), DomainError);
    }

    TEST_CASE("severity") {
        CHECK(severity(-0.2) == doctest::Approx(0.2));
        CHECK(severity(0.5) == 0.0);
        CHECK(severity(-0.0102) == doctest::Approx(0.0102));
        CHECK_THROWS_AS(severity(1.0), DomainError);
        CHECK_THROWS_AS(severity(-1.0), DomainError);
    }

    TEST_CASE("instability indicator is strict") {
        CHECK(instability_indicator(360.0) == 0);
        CHECK(instability_indicator(360.1) == 1);
        CHECK(instability_indicator(90) == 0);
        CHECK(instability_indicator(std::nextafter(360.0, 400.0)) == 1);
    }

    TEST_CASE("tssi of -0.0102 is a maximum separation of about 367.4 degrees") {
        const double d = 360.0 * (1 + 0.0102) / (1 - 0.0102);
        CHECK(d == doctest::Approx(367.42).epsilon(1e-4));
        CHECK(tssi(d) == doctest::Approx(-0.0102));
    }
}

TEST_SUITE("fault probability") {
    TEST_CASE("line mode") {
        CHECK(fault_probability(CampaignMode::line_faults, 16, FaultType::LLL) == doctest::Approx(3.125e-5));
        CHECK(fault_probability(CampaignMode::line_faults, 16, FaultType::LG) == doctest::Approx(4.375e-4));
    }

    TEST_CASE("bus mode has no location factor") {
        const auto f = fault_probability_factors(CampaignMode::bus_faults, 12, FaultType::LLG);
        CHECK(f.location == 1.0);
        CHECK(f.occurrence == doctest::Approx(1.0 / 12));
        CHECK(f.product() == doctest::Approx(0.15 / 12));
    }

    TEST_CASE("deterministic mode is certain") {
        CHECK(fault_probability(CampaignMode::deterministic_lll, 12, FaultType::LLL) == 1.0);
        CHECK_THROWS_AS(fault_probability(CampaignMode::line_faults, 0, FaultType::LG), DomainError);
        CHECK_THROWS_AS(fault_probability(CampaignMode::line_faults, 16, static_cast<FaultType>(7)), DomainError);
    }

    TEST_CASE("sample risk is a product") {
        CHECK(sample_risk(3.125e-5, 1, 0.2) == doctest::Approx(6.25e-6));
        CHECK(sample_risk(0.3, 0, 0.9) == 0.0);
        CHECK(sample_risk(1, 1, 0.0102) == doctest::Approx(0.0102));
    }
}

TEST_SUITE("aggregation") {
    TEST_CASE("average risk") {
        const std::vector<double> zeros(10, 0.0);
        const RiskAverage z = average_risk(zeros);
        CHECK(z.mean == 0.0);
        CHECK(z.std_error == 0.0);
        const std::vector<double> two{0.01, 0.03};
        const RiskAverage a = average_risk(two);
        CHECK(a.mean == doctest::Approx(0.02));
        CHECK(a.std_error == doctest::Approx(0.01));
        CHECK_THROWS_AS(average_risk(std::vector<double>{}), DomainError);
        CHECK(average_risk(std::vector<double>{0.5}).std_error == 0.0);
    }

    TEST_CASE("instability probabilities use the total count") {
        std::vector<RiskSample> s(2401);
        for (int k = 0; k < 10; ++k) {
            s[static_cast<std::size_t>(k)] = make_risk_sample({}, FaultType::LG, 400);
        }
        const auto p = instability_probabilities(s);
        CHECK(p[0] == doctest::Approx(10.0 / 2401));
        CHECK(p[1] == 0.0);

        std::vector<RiskSample> stable(5, make_risk_sample({}, FaultType::LL, 100));
        for (double x : instability_probabilities(stable)) CHECK(x == 0.0);

        std::vector<RiskSample> all(7, make_risk_sample({}, FaultType::LG, 500));
        const auto q = instability_probabilities(all);
        CHECK(q == std::array<double, 4>{1, 0, 0, 0});
        CHECK_THROWS_AS(instability_probabilities(std::vector<RiskSample>{}), DomainError);
    }

    TEST_CASE("randomised samples keep every invariant") {
        Gen g(41);
        std::vector<RiskSample> samples;
        std::array<int, 4> unstable{};
        for (int k = 0; k < 20000; ++k) {
            const auto type = static_cast<FaultType>(g.integer(0, 3));
            const auto pr = fault_probability_factors(CampaignMode::line_faults, 16, type);
            const double d = g.coin(0.05) ? 360.0 : g.uniform(0, 900);
            const RiskSample s = make_risk_sample(pr, type, d);
            CHECK((s.severity > 0) == (s.pr_instability == 1));
            CHECK((s.tssi < 0) == (s.delta_max_deg > 360));
            CHECK((s.pr_instability == 1) == (s.delta_max_deg > 360));
            CHECK(s.r_i >= 0);
            CHECK(s.r_i < s.pr_fault());
            CHECK(s.r_i == sample_risk(s.pr_fault(), s.pr_instability, s.severity));
            CHECK(s.r_i < 4.4e-4);
            unstable[static_cast<std::size_t>(type)] += s.pr_instability;
            samples.push_back(s);
        }
        const auto p = instability_probabilities(samples);
        int total = 0;
        for (int u : unstable) total += u;
        CHECK(p[0] + p[1] + p[2] + p[3] == doctest::Approx(total / 20000.0).epsilon(1e-14));
    }
}
