#pragma once

#include "apm/manifold.hpp"

#include <string>
#include <vector>

namespace apm::fixtures {

inline ExprPtr c(const std::string& src, int dim) { return parse_expr(src, dim); }

/// Chart metric/structure from entry strings (row-major).
inline ManifoldSpec chart(const std::string& name, int dim, std::vector<std::string> g,
                          std::vector<std::string> p,
                          std::vector<std::array<double, 2>> box = {}) {
    std::vector<ExprPtr> ge, pe;
    for (const auto& s : g) ge.push_back(c(s, dim));
    for (const auto& s : p) pe.push_back(c(s, dim));
    ManifoldSpec spec;
    spec.name = name;
    spec.backend = make_chart_spec(dim, std::move(ge), std::move(pe), std::move(box));
    return spec;
}

/// Flat product metric, P = diag(1,1,-1,-1).
inline ManifoldSpec flat_product() {
    return chart("flat_product", 4,
                 {"1", "0", "0", "0", "0", "1", "0", "0", "0", "0", "1", "0", "0", "0", "0", "1"},
                 {"1", "0", "0", "0", "0", "1", "0", "0", "0", "0", "-1", "0", "0", "0", "0", "-1"});
}

/// Warped product: the second factor scaled by exp(2 x1). Integrable
/// eigendistributions, nonvanishing structure derivative.
inline ManifoldSpec warped_product() {
    return chart("warped_product", 4,
                 {"1", "0", "0", "0", "0", "1", "0", "0", "0", "0", "exp(2*x1)", "0", "0", "0",
                  "0", "exp(2*x1)"},
                 {"1", "0", "0", "0", "0", "1", "0", "0", "0", "0", "-1", "0", "0", "0", "0", "-1"});
}

/// Unit round-sphere block times a flat factor; P alternates eigenvalues
/// across the blocks.
inline ManifoldSpec sphere_block() {
    return chart("sphere_block", 4,
                 {"1", "0", "0", "0", "0", "sin(x1)^2", "0", "0", "0", "0", "1", "0", "0", "0",
                  "0", "1"},
                 {"1", "0", "0", "0", "0", "-1", "0", "0", "0", "0", "1", "0", "0", "0", "0", "-1"},
                 {{{0.4, 1.2}}, {{-1.0, 1.0}}, {{-1.0, 1.0}}, {{-1.0, 1.0}}});
}

inline std::vector<double> brackets_su2_plus_r() {
    const int d = 4;
    std::vector<double> c(static_cast<std::size_t>(d) * d * d, 0.0);
    const auto set = [&](int i, int j, int k, double v) {
        c[(static_cast<std::size_t>(i) * d + j) * d + k] = v;
        c[(static_cast<std::size_t>(j) * d + i) * d + k] = -v;
    };
    set(0, 1, 2, 1.0); // [e1, e2] = e3
    set(1, 2, 0, 1.0); // [e2, e3] = e1
    set(2, 0, 1, 1.0); // [e3, e1] = e2
    return c;
}

/// Compact 4-dimensional group with its bi-invariant metric; the structure
/// tensor mixes the central direction into the first factor. Lands in the
/// nonintegrable basic class with F != 0.
inline ManifoldSpec biinvariant_w3() {
    ManifoldSpec spec;
    spec.name = "biinvariant_w3";
    std::vector<double> g0{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
    std::vector<double> p0{1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1};
    spec.backend = make_lie_spec(4, brackets_su2_plus_r(), std::move(g0), std::move(p0));
    return spec;
}

/// Two-step nilpotent example: [e1, e2] = e3 only.
inline ManifoldSpec heisenberg_like() {
    const int d = 4;
    std::vector<double> c(static_cast<std::size_t>(d) * d * d, 0.0);
    c[(0 * static_cast<std::size_t>(d) + 1) * d + 2] = 1.0;
    c[(1 * static_cast<std::size_t>(d) + 0) * d + 2] = -1.0;
    ManifoldSpec spec;
    spec.name = "heisenberg_like";
    std::vector<double> g0{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
    std::vector<double> p0{1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1};
    spec.backend = make_lie_spec(4, std::move(c), std::move(g0), std::move(p0));
    return spec;
}

/// dim-2 chart with g = diag(1, exp(2 x1)); closed-form connection.
inline ManifoldSpec exp_metric_d2() {
    return chart("exp_metric_d2", 2, {"1", "0", "0", "exp(2*x1)"}, {"1", "0", "0", "-1"});
}

} // namespace apm::fixtures
