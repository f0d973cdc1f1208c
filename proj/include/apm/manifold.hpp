#pragma once

#include "apm/expr.hpp"
#include "apm/tensor.hpp"

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace apm {

/// Tolerance tiers used across the library. Algebraic structure residuals
/// come from pure arithmetic and sit near machine precision; identity checks
/// on the chart backend absorb AD rounding; classification residuals are
/// scale-normalized.
struct Tolerances {
    double algebraic = 1e-10;
    double identity_lie = 1e-9;
    double identity_chart = 1e-8;
    double classification = 1e-7;
};

inline constexpr double kPlaneEps = 1e-10;

/// Coordinate-chart description: metric and structure entries as parsed
/// expressions of x1..xd. The metric array is symmetric by construction
/// (upper triangle shared with the mirrored lower one).
struct ChartSpec {
    int dim = 0;
    std::vector<ExprPtr> g_entries; // dim*dim, row-major
    std::vector<ExprPtr> P_entries; // dim*dim, P^i_j at (i, j)
    std::vector<std::array<double, 2>> sample_box; // per coordinate, default [-1, 1]
};

/// Left-invariant frame on a Lie group: constant structure constants,
/// constant frame metric and structure tensor.
struct LieGroupSpec {
    int dim = 0;
    std::vector<double> bracket; // (i, j, k) -> C^k_ij, antisymmetric in (i, j)
    std::vector<double> g0;      // dim*dim
    std::vector<double> P0;      // dim*dim

    [[nodiscard]] double c(int i, int j, int k) const {
        return bracket[(static_cast<std::size_t>(i) * dim + j) * dim + k];
    }
};

struct ManifoldSpec {
    std::string name;
    std::variant<ChartSpec, LieGroupSpec> backend;
    Tolerances tol;

    [[nodiscard]] bool is_lie() const { return std::holds_alternative<LieGroupSpec>(backend); }
    [[nodiscard]] int dim() const {
        return is_lie() ? std::get<LieGroupSpec>(backend).dim : std::get<ChartSpec>(backend).dim;
    }
    [[nodiscard]] double identity_tol() const {
        return is_lie() ? tol.identity_lie : tol.identity_chart;
    }
};

/// Everything geometry needs at one point, in a working frame: the metric
/// with first and second frame derivatives, the structure tensor with its
/// derivatives, and the frame bracket coefficients. Chart frames carry zero
/// brackets; Lie frames carry zero derivatives. The bracket coefficients are
/// constant in both backends, so their frame derivative is identically zero.
struct PointFrame {
    int dim = 0;
    MetricAtPoint metric;     // g and g_inv
    std::vector<double> dg;   // (a,i,j) -> d_a g_ij
    std::vector<double> d2g;  // (a,b,i,j), exactly symmetric in (a,b)
    std::vector<double> P;    // (i,j) -> P^i_j
    std::vector<double> dP;   // (a,i,j) -> d_a P^i_j
    std::vector<double> d2P;  // (a,b,i,j), exactly symmetric in (a,b)
    std::vector<double> bracket; // (i,j,k) -> C^k_ij

    [[nodiscard]] double p(int i, int j) const { return P[static_cast<std::size_t>(i) * dim + j]; }
    [[nodiscard]] double c(int i, int j, int k) const {
        return bracket[(static_cast<std::size_t>(i) * dim + j) * dim + k];
    }
    [[nodiscard]] double dg_at(int a, int i, int j) const {
        return dg[(static_cast<std::size_t>(a) * dim + i) * dim + j];
    }
    [[nodiscard]] double d2g_at(int a, int b, int i, int j) const {
        return d2g[((static_cast<std::size_t>(a) * dim + b) * dim + i) * dim + j];
    }
    [[nodiscard]] double dp_at(int a, int i, int j) const {
        return dP[(static_cast<std::size_t>(a) * dim + i) * dim + j];
    }
    [[nodiscard]] double d2p_at(int a, int b, int i, int j) const {
        return d2P[((static_cast<std::size_t>(a) * dim + b) * dim + i) * dim + j];
    }
};

struct ValidationItem {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

struct ValidationReport {
    bool pass = false;
    std::vector<ValidationItem> items;
    int points_sampled = 0;
    std::uint64_t seed = 0;
};

/// Build chart spec structures with mirrored metric entries and a default
/// sample box; rejects odd or out-of-range dimensions.
ChartSpec make_chart_spec(int dim, std::vector<ExprPtr> g_upper_or_full,
                          std::vector<ExprPtr> p_entries,
                          std::vector<std::array<double, 2>> sample_box = {});

LieGroupSpec make_lie_spec(int dim, std::vector<double> bracket, std::vector<double> g0,
                           std::vector<double> P0);

/// Full second-order jet of the spec at a point. Validates the almost
/// product invariants there and throws NumericError naming the violated
/// invariant and its residual.
PointFrame frame_at(const ManifoldSpec& spec, std::span<const double> point);

/// Residuals of every structural invariant over a deterministic point sample
/// (charts) or the constant data (Lie groups). Never throws on a failing
/// invariant; failures live in the report.
ValidationReport validate_spec(const ManifoldSpec& spec, int points = 20, std::uint64_t seed = 0);

/// Deterministic evaluation points:the chart backend samples its box, the
/// Lie backend is frame-constant so a single origin point suffices.
std::vector<std::vector<double>> sample_points(const ManifoldSpec& spec, int n, std::uint64_t seed);

} // namespace apm
