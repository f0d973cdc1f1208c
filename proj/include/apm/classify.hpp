#pragma once

#include "apm/geometry.hpp"
#include "apm/manifold.hpp"

#include <cstdint>

namespace apm {

/// Per-class residuals (scale-normalized by the largest |F| component) and
/// verdicts at the classification tolerance. Membership is ANDed over
/// sampled points; the report keeps the worst case.
struct ClassificationReport {
    double residual_w0 = 0.0;   // max |F|, normalized
    double residual_w3 = 0.0;   // max |cyclic sum of F|, normalized
    double residual_w3_alt = 0.0; // same with the first slot P-twisted
    double residual_nbar = 0.0; // max |Nbar|, normalized
    double residual_nij = 0.0;  // max |Nijenhuis|, normalized
    bool w0_pass = false;
    bool w3_pass = false;
    bool w12_pass = false;      // integrable class, Nijenhuis test
    bool forms_agree = false;   // the two cyclic-sum membership forms decide alike
    bool nbar_agrees_w3 = false;
    double tolerance = 0.0;
    int points_sampled = 0;
    std::uint64_t seed = 0;
};

struct SampleConfig {
    int points = 20;
    std::uint64_t seed = 0;
    double tolerance = -1.0; // < 0: use the spec's classification tolerance
};

/// Symmetrized nonintegrability tensor (1,2); its vanishing characterizes
/// the nonintegrable basic class. Verifies its structure-twist symmetries
/// as a side effect and throws on violation.
TensorComponents nbar(const PointFrame& frame, const ConnectionAtPoint& conn);

/// Nijenhuis tensor of P as (1,2) components, antisymmetric in the two
/// arguments by construction; its vanishing characterizes integrability.
TensorComponents nijenhuis(const PointFrame& frame, const ConnectionAtPoint& conn);

ClassificationReport classify(const ManifoldSpec& spec, const SampleConfig& config = {});

} // namespace apm
