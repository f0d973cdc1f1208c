#pragma once

#include "apm/manifold.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace apm {

enum class SearchTarget { W0Sanity, W3, SZero, LZero };

SearchTarget parse_target(const std::string& name); // "w0" | "w3" | "s-zero" | "l-zero"
const char* to_string(SearchTarget target);

/// Parameter-space description for synthesizing invariant-frame examples.
/// The decoded spec satisfies bracket antisymmetry, P^2 = id, tr P = 0 and
/// metric compatibility by construction; the Jacobi identity and the class
/// condition are driven to zero by the optimizer.
struct SearchProblem {
    int dim = 4;
    SearchTarget target = SearchTarget::W3;
    double floor_f2 = 0.1;       // required ||F||^2 (hinge-enforced lower bound)
    double weight_jacobi = 1.0;
    double weight_class = 1.0;
    double weight_floor = 10.0;
    double weight_target = 1.0;  // s-zero / l-zero extras
    bool fd_gradient = false;    // finite-difference gradient refinement stage
    int starts = 0;              // 0 = derive from budget
};

struct PenaltyTerms {
    double jacobi = 0.0;   // max |Jacobi residual|
    double class_w3 = 0.0; // max |cyclic sum of F|
    double compat = 0.0;   // max |P^T g P - g| (zero by construction)
    double f2 = 0.0;       // ||F||^2
    double floor_gap = 0.0;
    double target_extra = 0.0; // ||T|| or ||L|| for the optional targets
    double objective = 0.0;
};

struct SearchResult {
    LieGroupSpec best_spec;
    PenaltyTerms terms;
    long iterations = 0; // objective evaluations spent
    std::uint64_t seed = 0;
    bool converged = false;
    int best_start = -1;
};

/// Number of raw parameters for a given dimension.
int param_count(int dim);

/// Exact-constraint decoding of a raw parameter vector.
LieGroupSpec decode(std::span<const double> params, int dim);

/// Canonical parameter extraction; decode(encode(decode(p))) reproduces
/// decode(p), and encode inverts decode exactly on the principal branch of
/// the rotation angles.
std::vector<double> encode(const LieGroupSpec& spec);

PenaltyTerms evaluate_penalties(const LieGroupSpec& spec, const SearchProblem& problem);

/// Multi-start derivative-free minimization (coordinate descent with
/// adaptive per-coordinate steps), optional finite-difference gradient
/// polish. Deterministic in (problem, budget, seed); multi-starts may run
/// concurrently, reduction is by (objective, start index).
SearchResult synthesize(const SearchProblem& problem, long budget, std::uint64_t seed);

} // namespace apm
