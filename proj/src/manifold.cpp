#include "apm/manifold.hpp"

#include "apm/linalg.hpp"
#include "apm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace apm {

namespace {

void check_dim(int dim) {
    if (dim < 2 || dim > kMaxDim)
        throw SpecError("dimension must be in 2.." + std::to_string(kMaxDim) + ", got " +
                        std::to_string(dim));
    if (dim % 2 != 0)
        throw SpecError("dimension must be even (a trace-free involution forces it), got " +
                        std::to_string(dim));
}

/// max |P*P - id|
double involution_residual(std::span<const double> P, int d) {
    const auto pp = mat_mul(P, P, d);
    double worst = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            worst = std::max(worst, std::abs(pp[static_cast<std::size_t>(i) * d + j] - (i == j ? 1.0 : 0.0)));
    return worst;
}

/// max |P^T g P - g|
double compatibility_residual(std::span<const double> P, std::span<const double> g, int d) {
    double worst = 0.0;
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            double s = 0.0;
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    s += P[static_cast<std::size_t>(a) * d + j] * g[static_cast<std::size_t>(a) * d + b] *
                         P[static_cast<std::size_t>(b) * d + k];
            worst = std::max(worst, std::abs(s - g[static_cast<std::size_t>(j) * d + k]));
        }
    return worst;
}

double trace_residual(std::span<const double> P, int d) {
    double tr = 0.0;
    for (int i = 0; i < d; ++i) tr += P[static_cast<std::size_t>(i) * d + i];
    return std::abs(tr);
}

double jacobi_residual(const LieGroupSpec& spec) {
    const int d = spec.dim;
    double worst = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int l = 0; l < d; ++l)
                for (int k = 0; k < d; ++k) {
                    double s = 0.0;
                    for (int m = 0; m < d; ++m) {
                        s += spec.c(i, j, m) * spec.c(m, l, k);
                        s += spec.c(j, l, m) * spec.c(m, i, k);
                        s += spec.c(l, i, m) * spec.c(m, j, k);
                    }
                    worst = std::max(worst, std::abs(s));
                }
    return worst;
}

double antisymmetry_residual(const LieGroupSpec& spec) {
    const int d = spec.dim;
    double worst = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                worst = std::max(worst, std::abs(spec.c(i, j, k) + spec.c(j, i, k)));
    return worst;
}

} // namespace

ChartSpec make_chart_spec(int dim, std::vector<ExprPtr> g_entries, std::vector<ExprPtr> p_entries,
                          std::vector<std::array<double, 2>> sample_box) {
    check_dim(dim);
    const std::size_t n = static_cast<std::size_t>(dim) * dim;
    if (g_entries.size() != n) throw SpecError("chart metric needs dim*dim entries");
    if (p_entries.size() != n) throw SpecError("chart structure needs dim*dim entries");
    ChartSpec spec;
    spec.dim = dim;
    spec.g_entries = std::move(g_entries);
    // Mirror the upper triangle so both halves share one expression tree and
    // evaluate bitwise identically.
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
            spec.g_entries[static_cast<std::size_t>(j) * dim + i] =
                spec.g_entries[static_cast<std::size_t>(i) * dim + j];
    spec.P_entries = std::move(p_entries);
    if (sample_box.empty()) {
        spec.sample_box.assign(static_cast<std::size_t>(dim), {-1.0, 1.0});
    } else {
        if (static_cast<int>(sample_box.size()) != dim)
            throw SpecError("sample_box needs one [lo, hi] pair per coordinate");
        for (const auto& b : sample_box)
            if (!(b[0] < b[1])) throw SpecError("sample_box interval must satisfy lo < hi");
        spec.sample_box = std::move(sample_box);
    }
    return spec;
}

LieGroupSpec make_lie_spec(int dim, std::vector<double> bracket, std::vector<double> g0,
                           std::vector<double> P0) {
    check_dim(dim);
    const std::size_t d = static_cast<std::size_t>(dim);
    if (bracket.size() != d * d * d) throw SpecError("structure constants need dim^3 entries");
    if (g0.size() != d * d || P0.size() != d * d)
        throw SpecError("Lie metric and structure need dim*dim entries");
    LieGroupSpec spec;
    spec.dim = dim;
    spec.bracket = std::move(bracket);
    spec.g0 = std::move(g0);
    spec.P0 = std::move(P0);
    if (antisymmetry_residual(spec) != 0.0)
        throw SpecError("structure constants must be exactly antisymmetric in the lower pair");
    return spec;
}

namespace {

PointFrame frame_at_chart(const ChartSpec& spec, const Tolerances& tol,
                          std::span<const double> point) {
    const int d = spec.dim;
    if (static_cast<int>(point.size()) != d) throw SpecError("point dimension mismatch");
    const std::size_t dd = static_cast<std::size_t>(d) * d;

    std::vector<double> g(dd, 0.0), P(dd, 0.0);
    std::vector<double> dg(dd * d, 0.0), dP(dd * d, 0.0);
    std::vector<double> d2g(dd * d * d, 0.0), d2P(dd * d * d, 0.0);

    const auto store = [&](std::vector<double>& v, std::vector<double>& dv, std::vector<double>& d2v,
                           int i, int j, const Jet2& jet) {
        v[static_cast<std::size_t>(i) * d + j] = jet.value;
        for (int a = 0; a < d; ++a)
            dv[(static_cast<std::size_t>(a) * d + i) * d + j] = jet.grad[static_cast<std::size_t>(a)];
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                d2v[((static_cast<std::size_t>(a) * d + b) * d + i) * d + j] = jet.hess(a, b);
    };

    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            const Jet2 jet = eval_jet2(*spec.g_entries[static_cast<std::size_t>(i) * d + j], point);
            store(g, dg, d2g, i, j, jet);
            if (j != i) store(g, dg, d2g, j, i, jet);
        }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const Jet2 jet = eval_jet2(*spec.P_entries[static_cast<std::size_t>(i) * d + j], point);
            store(P, dP, d2P, i, j, jet);
        }

    const double inv_res = involution_residual(P, d);
    if (inv_res > tol.algebraic)
        throw NumericError("structure invariant P^2 = id violated at point, residual " +
                           std::to_string(inv_res));
    const double comp_res = compatibility_residual(P, g, d);
    if (comp_res > tol.algebraic)
        throw NumericError("compatibility invariant P^T g P = g violated at point, residual " +
                           std::to_string(comp_res));
    const double tr_res = trace_residual(P, d);
    if (tr_res > tol.algebraic)
        throw NumericError("trace-free invariant tr P = 0 violated at point, residual " +
                           std::to_string(tr_res));

    MetricAtPoint metric(d, g); // SPD checked here
    PointFrame frame{d, std::move(metric), std::move(dg), std::move(d2g), std::move(P),
                     std::move(dP), std::move(d2P), std::vector<double>(dd * d, 0.0)};
    return frame;
}

PointFrame frame_at_lie(const LieGroupSpec& spec, const Tolerances& tol) {
    const int d = spec.dim;
    const std::size_t dd = static_cast<std::size_t>(d) * d;

    const double jac = jacobi_residual(spec);
    if (jac > tol.algebraic)
        throw NumericError("Jacobi identity violated, residual " + std::to_string(jac));
    const double inv_res = involution_residual(spec.P0, d);
    if (inv_res > tol.algebraic)
        throw NumericError("structure invariant P^2 = id violated, residual " + std::to_string(inv_res));
    const double comp_res = compatibility_residual(spec.P0, spec.g0, d);
    if (comp_res > tol.algebraic)
        throw NumericError("compatibility invariant P^T g P = g violated, residual " +
                           std::to_string(comp_res));
    const double tr_res = trace_residual(spec.P0, d);
    if (tr_res > tol.algebraic)
        throw NumericError("trace-free invariant tr P = 0 violated, residual " + std::to_string(tr_res));

    MetricAtPoint metric(d, spec.g0);
    PointFrame frame{d,
                     std::move(metric),
                     std::vector<double>(dd * d, 0.0),
                     std::vector<double>(dd * d * d, 0.0),
                     spec.P0,
                     std::vector<double>(dd * d, 0.0),
                     std::vector<double>(dd * d * d, 0.0),
                     spec.bracket};
    return frame;
}

} // namespace

PointFrame frame_at(const ManifoldSpec& spec, std::span<const double> point) {
    if (spec.is_lie()) {
        const auto& lie = std::get<LieGroupSpec>(spec.backend);
        if (!point.empty() && static_cast<int>(point.size()) != lie.dim)
            throw SpecError("point dimension mismatch");
        return frame_at_lie(lie, spec.tol);
    }
    return frame_at_chart(std::get<ChartSpec>(spec.backend), spec.tol, point);
}

std::vector<std::vector<double>> sample_points(const ManifoldSpec& spec, int n, std::uint64_t seed) {
    std::vector<std::vector<double>> points;
    if (spec.is_lie()) {
        points.emplace_back(static_cast<std::size_t>(spec.dim()), 0.0);
        return points;
    }
    const auto& chart = std::get<ChartSpec>(spec.backend);
    SplitRng rng = SplitRng(seed).split(0xB0C5);
    points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) points.push_back(rng.point_in_box(chart.sample_box));
    return points;
}

ValidationReport validate_spec(const ManifoldSpec& spec, int points, std::uint64_t seed) {
    ValidationReport report;
    report.seed = seed;

    double worst_inv = 0.0, worst_comp = 0.0, worst_tr = 0.0;
    double min_eig = std::numeric_limits<double>::infinity();
    std::string eval_failure;

    if (spec.is_lie()) {
        const auto& lie = std::get<LieGroupSpec>(spec.backend);
        report.points_sampled = 1;
        report.items.push_back({"bracket_antisymmetry", antisymmetry_residual(lie), spec.tol.algebraic,
                                false, "C^k_ij + C^k_ji"});
        report.items.push_back({"jacobi_identity", jacobi_residual(lie), spec.tol.algebraic, false,
                                "cyclic sum of C*C"});
        worst_inv = involution_residual(lie.P0, lie.dim);
        worst_comp = compatibility_residual(lie.P0, lie.g0, lie.dim);
        worst_tr = trace_residual(lie.P0, lie.dim);
        min_eig = sym_eigenvalues(lie.g0, lie.dim).front();
    } else {
        const auto& chart = std::get<ChartSpec>(spec.backend);
        const auto pts = sample_points(spec, points, seed);
        report.points_sampled = static_cast<int>(pts.size());
        for (const auto& pt : pts) {
            const int d = chart.dim;
            std::vector<double> g(static_cast<std::size_t>(d) * d, 0.0),
                P(static_cast<std::size_t>(d) * d, 0.0);
            try {
                for (int i = 0; i < d; ++i)
                    for (int j = i; j < d; ++j) {
                        const double v = eval(*chart.g_entries[static_cast<std::size_t>(i) * d + j], pt);
                        g[static_cast<std::size_t>(i) * d + j] = v;
                        g[static_cast<std::size_t>(j) * d + i] = v;
                    }
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        P[static_cast<std::size_t>(i) * d + j] =
                            eval(*chart.P_entries[static_cast<std::size_t>(i) * d + j], pt);
            } catch (const NumericError& err) {
                eval_failure = err.what();
                break;
            }
            worst_inv = std::max(worst_inv, involution_residual(P, d));
            worst_comp = std::max(worst_comp, compatibility_residual(P, g, d));
            worst_tr = std::max(worst_tr, trace_residual(P, d));
            min_eig = std::min(min_eig, sym_eigenvalues(g, d).front());
        }
    }

    report.items.push_back({"P_involution", worst_inv, spec.tol.algebraic, false, "max |P^2 - id|"});
    report.items.push_back({"P_compatibility", worst_comp, spec.tol.algebraic, false,
                            "max |P^T g P - g|"});
    report.items.push_back({"P_traceless", worst_tr, spec.tol.algebraic, false, "|tr P|"});
    report.items.push_back({"g_positive_definite", min_eig > 0.0 ? 0.0 : std::abs(min_eig) + 1.0,
                            spec.tol.algebraic, false,
                            "min eigenvalue " + std::to_string(min_eig)});
    if (!eval_failure.empty())
        report.items.push_back({"expression_domain", 1.0, 0.0, false, eval_failure});

    report.pass = true;
    for (auto& item : report.items) {
        item.pass = item.max_residual <= item.tolerance;
        report.pass = report.pass && item.pass;
    }
    return report;
}

} // namespace apm
