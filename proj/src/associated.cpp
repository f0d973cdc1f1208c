#include "apm/associated.hpp"

#include "apm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace apm {

namespace {

inline std::size_t i2(int d, int i, int j) { return static_cast<std::size_t>(i) * d + j; }
inline std::size_t i3(int d, int i, int j, int k) {
    return (static_cast<std::size_t>(i) * d + j) * d + k;
}
inline std::size_t i4(int d, int a, int i, int j, int k) {
    return ((static_cast<std::size_t>(a) * d + i) * d + j) * d + k;
}

// T(x,y) = -(nabla_x P) P y - (nabla_y P) P x from a nabla_P array, together
// with its frame derivative.
std::pair<TensorComponents, std::vector<double>> transfer_tensor(const PointFrame& frame,
                                                                 const TensorComponents& nabla_P,
                                                                 std::span<const double> d_nabla_P) {
    const int d = frame.dim;
    TensorComponents T(d, {Variance::Co, Variance::Co, Variance::Contra});
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int u = 0; u < d; ++u) {
                double s = 0.0;
                for (int m = 0; m < d; ++m)
                    s -= nabla_P(i, m, u) * frame.p(m, j) + nabla_P(j, m, u) * frame.p(m, i);
                T(i, j, u) = s;
            }
    std::vector<double> dT(static_cast<std::size_t>(d) * d * d * d, 0.0);
    for (int a = 0; a < d; ++a)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int u = 0; u < d; ++u) {
                    double s = 0.0;
                    for (int m = 0; m < d; ++m)
                        s -= d_nabla_P[i4(d, a, i, m, u)] * frame.p(m, j) +
                             nabla_P(i, m, u) * frame.dp_at(a, m, j) +
                             d_nabla_P[i4(d, a, j, m, u)] * frame.p(m, i) +
                             nabla_P(j, m, u) * frame.dp_at(a, m, i);
                    dT[i4(d, a, i, j, u)] = s;
                }
    return {std::move(T), std::move(dT)};
}

// Q(x,y)z = (nabla_x T)(y,z) - (nabla_y T)(x,z) + T(x,T(y,z)) - T(y,T(x,z))
TensorComponents curvature_correction(const TensorComponents& T, const TensorComponents& nabla_T) {
    const int d = T.dim();
    TensorComponents Q(d, {Variance::Co, Variance::Co, Variance::Co, Variance::Contra});
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int u = 0; u < d; ++u) {
                    double s = nabla_T(i, j, k, u) - nabla_T(j, i, k, u);
                    for (int m = 0; m < d; ++m)
                        s += T(i, m, u) * T(j, k, m) - T(j, m, u) * T(i, k, m);
                    Q(i, j, k, u) = s;
                }
    return Q;
}

} // namespace

FrameJets associated_frame_jets(const PointFrame& frame) {
    const int d = frame.dim;
    const std::size_t dd = static_cast<std::size_t>(d) * d;
    FrameJets jets;
    jets.dim = d;
    jets.G.assign(dd, 0.0);
    jets.dG.assign(dd * d, 0.0);
    jets.d2G.assign(dd * d * d, 0.0);
    jets.P = frame.P;
    jets.dP = frame.dP;
    jets.d2P = frame.d2P;
    jets.bracket = frame.bracket;

    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int m = 0; m < d; ++m) s += frame.metric.g(i, m) * frame.p(m, j);
            jets.G[i2(d, i, j)] = s;
        }
    // The associated metric is symmetric because P is metric-symmetric;
    // mirror the computed upper triangle so downstream code sees it exactly.
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const double v = 0.5 * (jets.G[i2(d, i, j)] + jets.G[i2(d, j, i)]);
            jets.G[i2(d, i, j)] = v;
            jets.G[i2(d, j, i)] = v;
        }

    for (int a = 0; a < d; ++a)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double s = 0.0;
                for (int m = 0; m < d; ++m)
                    s += frame.dg_at(a, i, m) * frame.p(m, j) +
                         frame.metric.g(i, m) * frame.dp_at(a, m, j);
                jets.dG[i3(d, a, i, j)] = s;
            }
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double s = 0.0;
                    for (int m = 0; m < d; ++m)
                        s += frame.d2g_at(a, b, i, m) * frame.p(m, j) +
                             frame.dg_at(a, i, m) * frame.dp_at(b, m, j) +
                             frame.dg_at(b, i, m) * frame.dp_at(a, m, j) +
                             frame.metric.g(i, m) * frame.d2p_at(a, b, m, j);
                    jets.d2G[i4(d, a, b, i, j)] = s;
                }

    const double det = mat_det(jets.G, d);
    if (std::abs(det) <= 1e-12)
        throw NumericError("associated metric is degenerate (|det| = " + std::to_string(std::abs(det)) +
                           ")");
    jets.Ginv = mat_inverse(jets.G, d);
    return jets;
}

TensorComponents phi_tensor(const PointFrame& frame, const CurvatureAtPoint& curv) {
    const int d = frame.dim;
    const auto& F = curv.F;
    TensorComponents phi(d, {Variance::Co, Variance::Co, Variance::Co});
    // Half of F(x,y,Pz) + F(y,Pz,x) - F(Pz,x,y). The last slot of the first
    // two terms and the first slot of the third are twisted by P; this is
    // the combination that reproduces the Levi-Civita difference of the two
    // metrics (checked against the direct connection in the tests).
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                double s = 0.0;
                for (int m = 0; m < d; ++m)
                    s += (F(i, j, m) + F(j, m, i)) * frame.p(m, k) - F(m, i, j) * frame.p(m, k);
                phi(i, j, k) = 0.5 * s;
            }
    return phi;
}

ConnectionAtPoint nabla_tilde_direct(const PointFrame& frame) {
    return connection_from_jets(associated_frame_jets(frame));
}

TensorComponents f_tilde(const PointFrame& frame, const ConnectionAtPoint& conn_tilde) {
    const FrameJets jets = associated_frame_jets(frame);
    return geometry_core(jets, conn_tilde).F;
}

std::pair<TensorComponents, TensorComponents> t_q_tensors(const PointFrame& frame,
                                                          const ConnectionAtPoint& conn,
                                                          const CurvatureAtPoint& curv) {
    auto [T, dT] = transfer_tensor(frame, curv.nabla_P, curv.d_nabla_P);
    const TensorComponents nabla_T = covariant_derivative(T, dT, conn);
    TensorComponents Q = curvature_correction(T, nabla_T);
    return {std::move(T), std::move(Q)};
}

RTildePaths r_tilde_two_paths(const PointFrame& frame, const ConnectionAtPoint& /*conn*/,
                              const CurvatureAtPoint& curv) {
    const int d = frame.dim;
    const FrameJets jets = associated_frame_jets(frame);
    const ConnectionAtPoint conn_tilde = connection_from_jets(jets);
    const GeometryCore core_tilde = geometry_core(jets, conn_tilde);

    RTildePaths out{core_tilde.R,
                    TensorComponents(d, {Variance::Co, Variance::Co, Variance::Co, Variance::Co}),
                    0.0};

    const auto& np = curv.nabla_P;
    const auto& g = frame.metric;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    double s = 0.0;
                    for (int m = 0; m < d; ++m) s += curv.R(i, j, k, m) * frame.p(m, l);
                    s += -curv.nabla_F(i, l, j, k) + curv.nabla_F(j, l, i, k);
                    // + g((nabla_j P)e_k + (nabla_k P)e_j,
                    //     (nabla_i P)P e_l + (nabla_l P)P e_i)
                    // - the same with i and j swapped.
                    for (int a = 0; a < d; ++a)
                        for (int b = 0; b < d; ++b) {
                            const double w = g.g(a, b);
                            if (w == 0.0) continue;
                            double vil = 0.0, vjl = 0.0;
                            for (int m = 0; m < d; ++m) {
                                vil += np(i, m, b) * frame.p(m, l) + np(l, m, b) * frame.p(m, i);
                                vjl += np(j, m, b) * frame.p(m, l) + np(l, m, b) * frame.p(m, j);
                            }
                            s += w * (np(j, k, a) + np(k, j, a)) * vil;
                            s -= w * (np(i, k, a) + np(k, i, a)) * vjl;
                        }
                    out.formula(i, j, k, l) = s;
                }

    double worst = 0.0;
    for (std::size_t n = 0; n < out.direct.data().size(); ++n)
        worst = std::max(worst, std::abs(out.direct.data()[n] - out.formula.data()[n]));
    out.residual = worst;
    return out;
}

std::pair<TensorComponents, TensorComponents> s_l_invariants(const CurvatureAtPoint& curv,
                                                             const TensorComponents& T,
                                                             const TensorComponents& Q) {
    const int d = T.dim();
    TensorComponents S_part(d, {Variance::Co, Variance::Co, Variance::Contra});
    for (std::size_t n = 0; n < T.data().size(); ++n) S_part.data()[n] = 0.5 * T.data()[n];
    TensorComponents L(d, {Variance::Co, Variance::Co, Variance::Co, Variance::Contra});
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int u = 0; u < d; ++u)
                    L(i, j, k, u) = curv.R13[i4(d, i, j, k, u)] + 0.5 * Q(i, j, k, u);
    return {std::move(S_part), std::move(L)};
}

TensorComponents b_tensor(const PointFrame& frame, const CurvatureAtPoint& curv) {
    const int d = frame.dim;
    const auto& np = curv.nabla_P;
    const auto& g = frame.metric;
    TensorComponents B(d, {Variance::Co, Variance::Co, Variance::Co, Variance::Co});
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    double s = 0.0;
                    for (int a = 0; a < d; ++a)
                        for (int b = 0; b < d; ++b) {
                            const double w = g.g(a, b);
                            if (w == 0.0) continue;
                            // (nabla_{Pw} P) P x and (nabla_{Pw} P) P y
                            double tw_i = 0.0, tw_j = 0.0;
                            for (int m = 0; m < d; ++m)
                                for (int n = 0; n < d; ++n) {
                                    const double base = np(m, n, b) * frame.p(m, l);
                                    tw_i += base * frame.p(n, i);
                                    tw_j += base * frame.p(n, j);
                                }
                            s -= w * (np(k, j, a) + np(j, k, a)) * (np(i, l, b) + tw_i);
                            s += w * (np(i, k, a) + np(k, i, a)) * (np(j, l, b) + tw_j);
                        }
                    B(i, j, k, l) = s;
                }
    return B;
}

AssociatedAtPoint associated_package(const PointFrame& frame, const ConnectionAtPoint& conn,
                                     const CurvatureAtPoint& curv) {
    const int d = frame.dim;
    const FrameJets jets = associated_frame_jets(frame);
    ConnectionAtPoint conn_tilde = connection_from_jets(jets);
    GeometryCore core_tilde = geometry_core(jets, conn_tilde);

    TensorComponents g_tilde(d, {Variance::Co, Variance::Co});
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g_tilde(i, j) = jets.G[i2(d, i, j)];

    const auto eig = sym_eigenvalues(jets.G, d);
    int pos = 0, neg = 0;
    for (double e : eig) (e > 0.0 ? pos : neg) += 1;
    if (pos != d / 2 || neg != d / 2)
        throw NumericError("associated metric does not have split signature");

    auto [T, dT] = transfer_tensor(frame, curv.nabla_P, curv.d_nabla_P);
    const TensorComponents nabla_T = covariant_derivative(T, dT, conn);
    TensorComponents Q = curvature_correction(T, nabla_T);

    auto [T_tilde, dT_tilde] = transfer_tensor(frame, core_tilde.nabla_P, core_tilde.d_nabla_P);
    const TensorComponents nabla_T_tilde = covariant_derivative(T_tilde, dT_tilde, conn_tilde);
    TensorComponents Q_tilde = curvature_correction(T_tilde, nabla_T_tilde);

    auto [S_part, L] = s_l_invariants(curv, T, Q);
    TensorComponents L_tilde(d, {Variance::Co, Variance::Co, Variance::Co, Variance::Contra});
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int u = 0; u < d; ++u)
                    L_tilde(i, j, k, u) =
                        core_tilde.R13[i4(d, i, j, k, u)] + 0.5 * Q_tilde(i, j, k, u);

    RTildePaths paths = r_tilde_two_paths(frame, conn, curv);

    AssociatedAtPoint out{std::move(g_tilde),
                          pos,
                          neg,
                          phi_tensor(frame, curv),
                          std::move(core_tilde.F),
                          std::move(T),
                          std::move(Q),
                          std::move(paths.direct),
                          std::move(paths.formula),
                          paths.residual,
                          std::move(S_part),
                          std::move(L),
                          b_tensor(frame, curv),
                          std::move(conn_tilde),
                          std::move(core_tilde.nabla_P),
                          std::move(T_tilde),
                          std::move(Q_tilde),
                          std::move(L_tilde),
                          std::move(core_tilde.R13)};
    return out;
}

} // namespace apm
