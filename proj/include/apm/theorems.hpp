#pragma once

#include "apm/associated.hpp"
#include "apm/classify.hpp"
#include "apm/manifold.hpp"

#include <string>
#include <vector>

namespace apm {

enum class CheckStatus { Pass, Fail, Vacuous };

const char* to_string(CheckStatus status);

/// One registered identity check. `status` is vacuous exactly when the
/// hypothesis fails; it is pass exactly when the hypothesis holds and the
/// residual meets the tolerance. The residual is reported even for vacuous
/// checks, as information rather than a claim.
struct TheoremCheck {
    std::string id;
    std::string reference;
    CheckStatus status = CheckStatus::Vacuous;
    double max_residual = 0.0;
    double tolerance = 0.0;
    int samples = 0;
    std::uint64_t seed = 0;
    std::string note;
};

struct SuiteConfig {
    int points = -1; // < 0: backend default (20 chart points, 1 invariant-frame point)
    int tuples = 50;
    std::uint64_t seed = 0;
    std::vector<std::string> only; // empty = run everything
};

struct TheoremReport {
    std::string spec_name;
    std::uint64_t seed = 0;
    int points = 0;
    ClassificationReport classification;
    std::vector<TheoremCheck> checks;
    bool any_fail = false;
};

/// All registered check ids with their reference strings, in suite order.
const std::vector<std::pair<std::string, std::string>>& check_catalog();

TheoremReport run_suite(const ManifoldSpec& spec, const SuiteConfig& config = {});

} // namespace apm
