#include "apm/classify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace apm {

namespace {

// (nabla_{Pe_i} P) e_j as (1,2) components: contract the derivative slot with P.
TensorComponents twist_derivative_slot(const TensorComponents& nabla_P, const PointFrame& frame) {
    const int d = frame.dim;
    TensorComponents out(d, {Variance::Co, Variance::Co, Variance::Contra});
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int u = 0; u < d; ++u) {
                double s = 0.0;
                for (int m = 0; m < d; ++m) s += nabla_P(m, j, u) * frame.p(m, i);
                out(i, j, u) = s;
            }
    return out;
}

// (nabla_i P)(P e_j) as (1,2) components: contract the argument slot with P.
TensorComponents twist_argument_slot(const TensorComponents& nabla_P, const PointFrame& frame) {
    const int d = frame.dim;
    TensorComponents out(d, {Variance::Co, Variance::Co, Variance::Contra});
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int u = 0; u < d; ++u) {
                double s = 0.0;
                for (int m = 0; m < d; ++m) s += nabla_P(i, m, u) * frame.p(m, j);
                out(i, j, u) = s;
            }
    return out;
}

} // namespace

TensorComponents nbar(const PointFrame& frame, const ConnectionAtPoint& conn) {
    const int d = frame.dim;
    const CurvatureAtPoint curv = curvature_package(frame, conn);
    const TensorComponents a = twist_argument_slot(curv.nabla_P, frame);   // (nabla_x P) P y
    const TensorComponents b = twist_derivative_slot(curv.nabla_P, frame); // (nabla_{Px} P) y

    TensorComponents out(d, {Variance::Co, Variance::Co, Variance::Contra});
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int u = 0; u < d; ++u)
                out(i, j, u) = a(i, j, u) + b(i, j, u) + a(j, i, u) + b(j, i, u);

    // Structure-twist symmetries hold for every valid input; a violation
    // means the connection or frame data is inconsistent.
    const double tol = 1e-9 * std::max(1.0, out.max_abs());
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int u = 0; u < d; ++u) {
                double pp = 0.0, pa = 0.0, ap = 0.0, pn = 0.0;
                for (int m = 0; m < d; ++m)
                    for (int n = 0; n < d; ++n)
                        pp += out(m, n, u) * frame.p(m, i) * frame.p(n, j);
                for (int m = 0; m < d; ++m) {
                    pa += out(m, j, u) * frame.p(m, i);
                    ap += out(i, m, u) * frame.p(m, j);
                    pn += frame.p(u, m) * out(i, j, m);
                }
                if (std::abs(pp - out(i, j, u)) > tol || std::abs(pa - ap) > tol ||
                    std::abs(ap + pn) > tol)
                    throw NumericError("symmetrized nonintegrability tensor lost its structure-twist symmetry");
            }
    return out;
}

TensorComponents nijenhuis(const PointFrame& frame, const ConnectionAtPoint& conn) {
    const int d = frame.dim;
    const CurvatureAtPoint curv = curvature_package(frame, conn);
    const TensorComponents a = twist_argument_slot(curv.nabla_P, frame);
    const TensorComponents b = twist_derivative_slot(curv.nabla_P, frame);

    TensorComponents out(d, {Variance::Co, Variance::Co, Variance::Contra});
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int u = 0; u < d; ++u) {
                const double m_ij = a(i, j, u) + b(i, j, u);
                const double m_ji = a(j, i, u) + b(j, i, u);
                out(i, j, u) = m_ij - m_ji; // antisymmetric exactly
            }
    return out;
}

ClassificationReport classify(const ManifoldSpec& spec, const SampleConfig& config) {
    const auto validation = validate_spec(spec, config.points, config.seed);
    if (!validation.pass) {
        std::string broken;
        for (const auto& item : validation.items)
            if (!item.pass) broken += (broken.empty() ? "" : ", ") + item.name;
        throw SpecError("spec validation failed: " + broken);
    }

    ClassificationReport report;
    report.tolerance = config.tolerance > 0.0 ? config.tolerance : spec.tol.classification;
    report.seed = config.seed;
    const int d = spec.dim();

    const auto points = sample_points(spec, config.points, config.seed);
    report.points_sampled = static_cast<int>(points.size());

    bool w0 = true, w3 = true, w3_alt = true, w12 = true, nbar_small = true;
    for (const auto& pt : points) {
        const PointFrame frame = frame_at(spec, pt);
        const ConnectionAtPoint conn = levi_civita(frame);
        const CurvatureAtPoint curv = curvature_package(frame, conn);

        const double f_scale = std::max(curv.F.max_abs(), 1e-30);

        const TensorComponents sigma_f = cyclic_sum_3(curv.F, {0, 1, 2});

        // First-slot P-twist of F, then the same cyclic sum.
        TensorComponents f_twisted(d, {Variance::Co, Variance::Co, Variance::Co});
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    double s = 0.0;
                    for (int m = 0; m < d; ++m) s += curv.F(m, j, k) * frame.p(m, i);
                    f_twisted(i, j, k) = s;
                }
        const TensorComponents sigma_f_twisted = cyclic_sum_3(f_twisted, {0, 1, 2});

        const TensorComponents nb = nbar(frame, conn);
        const TensorComponents nij = nijenhuis(frame, conn);

        const double r_w0 = curv.F.max_abs() / f_scale;
        const double r_w3 = sigma_f.max_abs() / f_scale;
        const double r_w3_alt = sigma_f_twisted.max_abs() / f_scale;
        const double r_nbar = nb.max_abs() / f_scale;
        const double r_nij = nij.max_abs() / f_scale;

        report.residual_w0 = std::max(report.residual_w0, r_w0);
        report.residual_w3 = std::max(report.residual_w3, r_w3);
        report.residual_w3_alt = std::max(report.residual_w3_alt, r_w3_alt);
        report.residual_nbar = std::max(report.residual_nbar, r_nbar);
        report.residual_nij = std::max(report.residual_nij, r_nij);

        w0 = w0 && r_w0 <= report.tolerance;
        w3 = w3 && r_w3 <= report.tolerance;
        w3_alt = w3_alt && r_w3_alt <= report.tolerance;
        w12 = w12 && r_nij <= report.tolerance;
        nbar_small = nbar_small && r_nbar <= report.tolerance;
    }

    report.w0_pass = w0;
    report.w3_pass = w3;
    report.w12_pass = w12;
    report.forms_agree = (w3 == w3_alt);
    report.nbar_agrees_w3 = (w3 == nbar_small);
    return report;
}

} // namespace apm
