#include "apm/classify.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace apm;

TEST_CASE("flat product belongs to every class with zero residuals") {
    const auto report = classify(fixtures::flat_product());
    CHECK(report.w0_pass);
    CHECK(report.w3_pass);
    CHECK(report.w12_pass);
    CHECK(report.residual_w0 == 0.0);
    CHECK(report.residual_w3 == 0.0);
    CHECK(report.residual_nij == 0.0);
    CHECK(report.forms_agree);
    CHECK(report.nbar_agrees_w3);
}

TEST_CASE("warped product is integrable but not in the nonintegrable class") {
    const auto report = classify(fixtures::warped_product());
    CHECK(!report.w0_pass);
    CHECK(report.w12_pass);
    CHECK(!report.w3_pass);
    CHECK(report.residual_w3 > 1e-3);
    CHECK(report.residual_nbar > 10 * report.tolerance);
    CHECK(report.forms_agree);
    CHECK(report.nbar_agrees_w3);
}

TEST_CASE("bi-invariant example is a genuine nonintegrable-class member") {
    const auto report = classify(fixtures::biinvariant_w3());
    CHECK(report.w3_pass);
    CHECK(!report.w0_pass);
    CHECK(!report.w12_pass);
    CHECK(report.residual_w3 < report.tolerance);
    CHECK(report.residual_w0 > 0.1);
    CHECK(report.forms_agree);
    CHECK(report.nbar_agrees_w3);
}

TEST_CASE("two-step nilpotent example is integrable") {
    const auto report = classify(fixtures::heisenberg_like());
    CHECK(report.w12_pass);
    CHECK(!report.w3_pass);
    CHECK(!report.w0_pass);
    CHECK(report.forms_agree);
    CHECK(report.nbar_agrees_w3);
}

TEST_CASE("class inclusion: membership in both side classes forces the parallel class") {
    for (const auto& spec :
         {fixtures::flat_product(), fixtures::warped_product(), fixtures::sphere_block(),
          fixtures::biinvariant_w3(), fixtures::heisenberg_like()}) {
        const auto report = classify(spec);
        if (report.w0_pass) {
            CHECK(report.w3_pass);
            CHECK(report.w12_pass);
        }
        if (report.w12_pass && report.w3_pass) CHECK(report.w0_pass);
    }
}

TEST_CASE("nijenhuis antisymmetry is exact") {
    const auto spec = fixtures::warped_product();
    const auto frame = frame_at(spec, std::vector<double>{0.3, 0.1, -0.2, 0.5});
    const auto conn = levi_civita(frame);
    const auto nij = nijenhuis(frame, conn);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int u = 0; u < 4; ++u) CHECK(nij(i, j, u) == -nij(j, i, u));
}

TEST_CASE("symmetrized tensor vanishes exactly on the nonintegrable example") {
    const auto spec = fixtures::biinvariant_w3();
    const auto frame = frame_at(spec, std::vector<double>{0, 0, 0, 0});
    const auto conn = levi_civita(frame);
    const auto nb = nbar(frame, conn);
    CHECK(nb.max_abs() < 1e-14);
    const auto nij = nijenhuis(frame, conn);
    CHECK(nij.max_abs() > 1.0); // hand value: 4 on the (2,3)->1 component
    CHECK(nij(1, 2, 0) == doctest::Approx(4.0));
}

TEST_CASE("classification rejects invalid specs") {
    auto bad = fixtures::chart(
        "bad", 4, {"1", "0", "0", "0", "0", "1", "0", "0", "0", "0", "1", "0", "0", "0", "0", "1"},
        {"1", "0", "0", "0", "0", "1", "0", "0", "0", "0", "1", "0", "0", "0", "0", "-1"});
    CHECK_THROWS_AS(classify(bad), SpecError);
}
