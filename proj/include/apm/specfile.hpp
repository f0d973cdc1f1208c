#pragma once

#include "apm/classify.hpp"
#include "apm/manifold.hpp"
#include "apm/theorems.hpp"

#include <string>

namespace apm {

inline constexpr const char* kToolVersion = "apm 0.1.0";

/// Parse a manifold description document (strict schema: unknown keys are
/// rejected, duplicate structure-constant records are rejected, odd
/// dimensions are rejected). `fallback_name` is used when the document
/// carries no name.
ManifoldSpec parse_spec_json(const std::string& text, const std::string& fallback_name = "spec");

ManifoldSpec load_spec_file(const std::string& path);

/// Canonical serialization; loading the output reproduces the spec, and a
/// fixed spec always serializes to identical bytes.
std::string spec_to_json(const ManifoldSpec& spec);
void write_spec_file(const ManifoldSpec& spec, const std::string& path);

struct ReportMeta {
    std::uint64_t seed = 0;
    long timing_ms = 0; // 0 unless timing was requested
};

std::string classification_to_json(const std::string& spec_name, const ClassificationReport& report,
                                   const ReportMeta& meta);
std::string classification_to_text(const std::string& spec_name, const ClassificationReport& report);

std::string report_to_json(const TheoremReport& report, const ReportMeta& meta);
std::string report_to_text(const TheoremReport& report);

} // namespace apm
