#include "apm/specfile.hpp"

#include "apm/associated.hpp"

#include "fixtures.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

using namespace apm;

namespace {

std::string specs_dir() { return APM_SPECS_DIR; }
std::string golden_dir() { return APM_GOLDEN_DIR; }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("shipped spec files load, validate and classify as documented") {
    struct Expectation {
        const char* file;
        bool w0, w12, w3;
    };
    const Expectation table[] = {
        {"flat_product.json", true, true, true},
        {"warped_product.json", false, true, false},
        {"sphere_block.json", false, true, false},
        {"biinvariant_w3.json", false, false, true},
        {"heisenberg_like.json", false, true, false},
        {"searched_w3.json", false, false, true},
        {"biinvariant_w3_d6.json", false, false, true},
    };
    for (const auto& row : table) {
        CAPTURE(row.file);
        const auto spec = load_spec_file(specs_dir() + "/" + row.file);
        CHECK(validate_spec(spec).pass);
        const auto report = classify(spec);
        CHECK(report.w0_pass == row.w0);
        CHECK(report.w12_pass == row.w12);
        CHECK(report.w3_pass == row.w3);
    }
}

TEST_CASE("spec serialization round trips") {
    for (const char* file : {"flat_product.json", "sphere_block.json", "biinvariant_w3.json",
                             "searched_w3.json"}) {
        const auto spec = load_spec_file(specs_dir() + "/" + std::string(file));
        const std::string once = spec_to_json(spec);
        const auto reloaded = parse_spec_json(once, spec.name);
        CHECK(spec_to_json(reloaded) == once);
        CHECK(reloaded.dim() == spec.dim());
        CHECK(reloaded.is_lie() == spec.is_lie());
    }
}

TEST_CASE("strict schema rejections") {
    CHECK_THROWS_AS(parse_spec_json("{"), SpecError);
    CHECK_THROWS_AS(parse_spec_json(R"json({"dim": 4, "backend": "chart", "metric": [], "structure": [], "surprise": 1})json"),
                    SpecError);
    CHECK_THROWS_AS(parse_spec_json(R"json({"dim": 3, "backend": "chart", "metric": [], "structure": []})json"),
                    SpecError);
    CHECK_THROWS_AS(parse_spec_json(R"json({"dim": 4, "backend": "nope", "metric": [], "structure": []})json"),
                    SpecError);
    // duplicate structure-constant record
    CHECK_THROWS_AS(parse_spec_json(R"json({
        "dim": 4, "backend": "lie_group",
        "structure_constants": [
            {"k": 3, "i": 1, "j": 2, "value": 1.0},
            {"k": 3, "i": 1, "j": 2, "value": 2.0}
        ],
        "metric": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]],
        "structure": [[1,0,0,0],[0,1,0,0],[0,0,-1,0],[0,0,0,-1]]})json"),
                    SpecError);
    // i >= j record
    CHECK_THROWS_AS(parse_spec_json(R"json({
        "dim": 4, "backend": "lie_group",
        "structure_constants": [{"k": 3, "i": 2, "j": 1, "value": 1.0}],
        "metric": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]],
        "structure": [[1,0,0,0],[0,1,0,0],[0,0,-1,0],[0,0,0,-1]]})json"),
                    SpecError);
    // conflicting mirror entry
    CHECK_THROWS_AS(parse_spec_json(R"json({
        "dim": 4, "backend": "chart",
        "metric": [["1","0","0","0"],["7","1","0","0"],["","","1","0"],["","","","1"]],
        "structure": [["1","0","0","0"],["0","1","0","0"],["0","0","-1","0"],["0","0","0","-1"]]})json"),
                    SpecError);
    // expression error carries entry coordinates
    try {
        parse_spec_json(R"json({
            "dim": 4, "backend": "chart",
            "metric": [["1","0","0","0"],["","1","0","0"],["","","qq(x1)","0"],["","","","1"]],
            "structure": [["1","0","0","0"],["0","1","0","0"],["0","0","-1","0"],["0","0","0","-1"]]})json");
        CHECK(false);
    } catch (const SpecError& err) {
        CHECK(std::string(err.what()).find("(3,3)") != std::string::npos);
    }
}

TEST_CASE("reports are byte-identical across runs for fixed inputs") {
    const auto spec = load_spec_file(specs_dir() + "/warped_product.json");
    SuiteConfig config;
    config.seed = 5;
    config.points = 6;
    const ReportMeta meta{5, 0};
    const std::string a = report_to_json(run_suite(spec, config), meta);
    const std::string b = report_to_json(run_suite(spec, config), meta);
    CHECK(a == b);
}

TEST_CASE("text and json reports carry identical verdicts") {
    const auto spec = load_spec_file(specs_dir() + "/biinvariant_w3.json");
    const auto report = run_suite(spec);
    const std::string text = report_to_text(report);
    const std::string json_str = report_to_json(report, {0, 0});
    const auto doc = nlohmann::json::parse(json_str);
    for (const auto& check : doc["theorems"]) {
        const std::string id = check["id"].get<std::string>();
        const std::string status = check["status"].get<std::string>();
        // Every text line mentioning the check id shows the same status token.
        const auto at = text.find("  " + id);
        REQUIRE(at != std::string::npos);
        const auto line_end = text.find('\n', at);
        const std::string line = text.substr(at, line_end - at);
        CHECK(line.find(status) != std::string::npos);
    }
}

TEST_CASE("golden status tables for the shipped families") {
    for (const char* name :
         {"flat_product", "warped_product", "biinvariant_w3", "searched_w3"}) {
        CAPTURE(name);
        const auto spec = load_spec_file(specs_dir() + "/" + std::string(name) + ".json");
        const auto report = run_suite(spec);
        const auto golden =
            nlohmann::json::parse(slurp(golden_dir() + "/" + std::string(name) + ".statuses.json"));
        REQUIRE(golden.is_object());
        CHECK(golden.size() == report.checks.size());
        for (const auto& check : report.checks) {
            CAPTURE(check.id);
            REQUIRE(golden.contains(check.id));
            CHECK(golden[check.id].get<std::string>() == to_string(check.status));
        }
    }
}

TEST_CASE("the Lie form vanishes on every nonintegrable-class example") {
    for (const char* name : {"flat_product", "biinvariant_w3", "searched_w3", "biinvariant_w3_d6"}) {
        CAPTURE(name);
        const auto spec = load_spec_file(specs_dir() + "/" + std::string(name) + ".json");
        for (const auto& pt : sample_points(spec, 5, 3)) {
            const auto frame = frame_at(spec, pt);
            const auto conn = levi_civita(frame);
            const auto curv = curvature_package(frame, conn);
            CHECK(curv.theta.max_abs() < spec.identity_tol());
        }
    }
}

TEST_CASE("parallel verdicts transfer to the associated manifold on every example") {
    for (const char* name : {"flat_product", "warped_product", "sphere_block", "heisenberg_like",
                             "biinvariant_w3", "searched_w3"}) {
        CAPTURE(name);
        const auto spec = load_spec_file(specs_dir() + "/" + std::string(name) + ".json");
        for (const auto& pt : sample_points(spec, 5, 4)) {
            const auto frame = frame_at(spec, pt);
            const auto conn = levi_civita(frame);
            const auto curv = curvature_package(frame, conn);
            const auto assoc = associated_package(frame, conn, curv);
            const double scale = std::max({curv.F.max_abs(), assoc.F_tilde.max_abs(), 1e-30});
            const bool base_parallel = curv.F.max_abs() / scale <= spec.tol.classification;
            const bool assoc_parallel = assoc.F_tilde.max_abs() / scale <= spec.tol.classification;
            CHECK(base_parallel == assoc_parallel);
        }
    }
}

TEST_CASE("vacuity discipline: hypothesis-failing checks never report pass") {
    // Warped product fails the class hypothesis; all conditional checks must
    // be vacuous rather than pass, whatever their residuals do.
    const auto spec = load_spec_file(specs_dir() + "/warped_product.json");
    const auto report = run_suite(spec);
    for (const auto& check : report.checks) {
        if (check.id == "eq3-F-props" || check.id == "eq8-A" || check.id == "eq13-ricci" ||
            check.id == "thm3.2-h-welldef" || check.id == "thm3.3-eq17" ||
            check.id == "thm4.2-assoc-w3")
            continue;
        CAPTURE(check.id);
        CHECK(check.status == CheckStatus::Vacuous);
    }
}
