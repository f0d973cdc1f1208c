#include "apm/theorems.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <map>
#include <string>

using namespace apm;

namespace {

std::map<std::string, TheoremCheck> by_id(const TheoremReport& report) {
    std::map<std::string, TheoremCheck> m;
    for (const auto& c : report.checks) m[c.id] = c;
    return m;
}

} // namespace

TEST_CASE("suite registers all twenty checks in catalog order") {
    CHECK(check_catalog().size() == 20);
    const auto report = run_suite(fixtures::flat_product());
    REQUIRE(report.checks.size() == 20);
    for (std::size_t i = 0; i < report.checks.size(); ++i)
        CHECK(report.checks[i].id == check_catalog()[i].first);
}

TEST_CASE("flat product passes every check") {
    const auto report = run_suite(fixtures::flat_product());
    CHECK(!report.any_fail);
    for (const auto& c : report.checks) {
        CAPTURE(c.id);
        CHECK(c.status == CheckStatus::Pass);
        CHECK(c.max_residual <= c.tolerance);
    }
}

TEST_CASE("nonintegrable example: class-conditional checks all engage and pass") {
    const auto report = run_suite(fixtures::biinvariant_w3());
    CHECK(!report.any_fail);
    const auto checks = by_id(report);
    for (const auto& id :
         {"eq3-F-props", "eq8-A", "eq13-ricci", "eq11-12", "thm2.1-eq15", "cor2.2-rho",
          "cor2.2-nP", "cor2.2-nP2", "thm3.2-h-welldef", "thm3.3-eq17", "thm4.2-assoc-w3",
          "eq27-Ftilde", "thm4.3-eq29", "eq35-Q", "thm5.1-invariance"}) {
        CAPTURE(id);
        CHECK(checks.at(id).status == CheckStatus::Pass);
    }
    // S and L are nonzero here, so their conditional checks must be vacuous.
    CHECK(checks.at("thm5.2-S0").status == CheckStatus::Vacuous);
    CHECK(checks.at("thm5.3-eq46").status == CheckStatus::Vacuous);
    CHECK(checks.at("cor5.4").status == CheckStatus::Vacuous);
    // Curvature here is not of Kaehler type.
    CHECK(checks.at("rem2.1-kaehlerR").status == CheckStatus::Vacuous);
}

TEST_CASE("warped product: class-conditional checks are vacuous, unconditional ones pass") {
    const auto report = run_suite(fixtures::warped_product());
    CHECK(!report.any_fail);
    const auto checks = by_id(report);
    for (const auto& id :
         {"eq3-F-props", "eq8-A", "eq13-ricci", "thm3.2-h-welldef", "thm3.3-eq17",
          "thm4.2-assoc-w3"}) {
        CAPTURE(id);
        CHECK(checks.at(id).status == CheckStatus::Pass);
    }
    for (const auto& id : {"eq11-12", "thm2.1-eq15", "cor2.2-rho", "cor2.2-nP", "cor2.2-nP2",
                           "rem2.1-kaehlerR", "cor3.4", "eq27-Ftilde", "thm4.3-eq29", "eq35-Q",
                           "thm5.1-invariance", "thm5.2-S0", "thm5.3-eq46", "cor5.4"}) {
        CAPTURE(id);
        CHECK(checks.at(id).status == CheckStatus::Vacuous);
    }
}

TEST_CASE("no check reports pass with residual above tolerance") {
    for (const auto& spec : {fixtures::flat_product(), fixtures::warped_product(),
                             fixtures::sphere_block(), fixtures::biinvariant_w3(),
                             fixtures::heisenberg_like()}) {
        const auto report = run_suite(spec);
        for (const auto& c : report.checks) {
            CAPTURE(spec.name + "/" + c.id);
            if (c.status == CheckStatus::Pass) CHECK(c.max_residual <= c.tolerance);
        }
    }
}

TEST_CASE("suite is deterministic for a fixed seed") {
    SuiteConfig config;
    config.seed = 99;
    const auto a = run_suite(fixtures::sphere_block(), config);
    const auto b = run_suite(fixtures::sphere_block(), config);
    REQUIRE(a.checks.size() == b.checks.size());
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
        CHECK(a.checks[i].status == b.checks[i].status);
        CHECK(a.checks[i].max_residual == b.checks[i].max_residual);
    }
}

TEST_CASE("check filter runs the requested subset only") {
    SuiteConfig config;
    config.only = {"thm2.1-eq15"};
    const auto report = run_suite(fixtures::warped_product(), config);
    REQUIRE(report.checks.size() == 1);
    CHECK(report.checks[0].id == "thm2.1-eq15");
    CHECK(report.checks[0].status == CheckStatus::Vacuous);
    CHECK(!report.any_fail);

    config.only = {"no-such-check"};
    CHECK_THROWS_AS(run_suite(fixtures::warped_product(), config), SpecError);
}
