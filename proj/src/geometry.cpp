#include "apm/geometry.hpp"

#include "apm/linalg.hpp"
#include "apm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace apm {

namespace {

inline std::size_t i2(int d, int i, int j) { return static_cast<std::size_t>(i) * d + j; }
inline std::size_t i3(int d, int i, int j, int k) {
    return (static_cast<std::size_t>(i) * d + j) * d + k;
}
inline std::size_t i4(int d, int a, int i, int j, int k) {
    return ((static_cast<std::size_t>(a) * d + i) * d + j) * d + k;
}

} // namespace

FrameJets frame_jets(const PointFrame& frame) {
    FrameJets jets;
    jets.dim = frame.dim;
    jets.G.assign(frame.metric.g_data().begin(), frame.metric.g_data().end());
    jets.Ginv.assign(frame.metric.ginv_data().begin(), frame.metric.ginv_data().end());
    jets.dG = frame.dg;
    jets.d2G = frame.d2g;
    jets.P = frame.P;
    jets.dP = frame.dP;
    jets.d2P = frame.d2P;
    jets.bracket = frame.bracket;
    return jets;
}

ConnectionAtPoint connection_from_jets(const FrameJets& jets) {
    const int d = jets.dim;
    ConnectionAtPoint conn;
    conn.dim = d;
    conn.gamma.assign(static_cast<std::size_t>(d) * d * d, 0.0);
    conn.dgamma.assign(static_cast<std::size_t>(d) * d * d * d, 0.0);

    // cg(a,b,c) = G([e_a, e_b], e_c)
    std::vector<double> cg(static_cast<std::size_t>(d) * d * d, 0.0);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c) {
                double s = 0.0;
                for (int m = 0; m < d; ++m) s += jets.bracket[i3(d, a, b, m)] * jets.G[i2(d, m, c)];
                cg[i3(d, a, b, c)] = s;
            }

    // Koszul: 2 G(nabla_i e_j, e_k) =
    //   d_i G_jk + d_j G_ik - d_k G_ij + cg(i,j,k) - cg(j,k,i) + cg(k,i,j)
    std::vector<double> K(static_cast<std::size_t>(d) * d * d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                K[i3(d, i, j, k)] = 0.5 * (jets.dG[i3(d, i, j, k)] + jets.dG[i3(d, j, i, k)] -
                                           jets.dG[i3(d, k, i, j)] + cg[i3(d, i, j, k)] -
                                           cg[i3(d, j, k, i)] + cg[i3(d, k, i, j)]);

    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int u = 0; u < d; ++u) {
                double s = 0.0;
                for (int k = 0; k < d; ++k) s += K[i3(d, i, j, k)] * jets.Ginv[i2(d, k, u)];
                conn.gamma[i3(d, i, j, u)] = s;
            }

    // dGinv_a = -Ginv dG_a Ginv
    std::vector<double> dginv(static_cast<std::size_t>(d) * d * d, 0.0);
    for (int a = 0; a < d; ++a)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double s = 0.0;
                for (int m = 0; m < d; ++m)
                    for (int n = 0; n < d; ++n)
                        s -= jets.Ginv[i2(d, i, m)] * jets.dG[i3(d, a, m, n)] * jets.Ginv[i2(d, n, j)];
                dginv[i3(d, a, i, j)] = s;
            }

    // Frame derivative of K: metric second derivatives plus the bracket part
    // riding on dG (the bracket coefficients themselves are constant).
    for (int a = 0; a < d; ++a)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                for (int u = 0; u < d; ++u) {
                    double s = 0.0;
                    for (int k = 0; k < d; ++k) {
                        double dK = 0.5 * (jets.d2G[i4(d, a, i, j, k)] + jets.d2G[i4(d, a, j, i, k)] -
                                           jets.d2G[i4(d, a, k, i, j)]);
                        double dcg = 0.0;
                        for (int m = 0; m < d; ++m) {
                            dcg += 0.5 * (jets.bracket[i3(d, i, j, m)] * jets.dG[i3(d, a, m, k)] -
                                          jets.bracket[i3(d, j, k, m)] * jets.dG[i3(d, a, m, i)] +
                                          jets.bracket[i3(d, k, i, m)] * jets.dG[i3(d, a, m, j)]);
                        }
                        s += (dK + dcg) * jets.Ginv[i2(d, k, u)] + K[i3(d, i, j, k)] * dginv[i3(d, a, k, u)];
                    }
                    conn.dgamma[i4(d, a, i, j, u)] = s;
                }
            }
    return conn;
}

ConnectionAtPoint levi_civita(const PointFrame& frame) {
    return connection_from_jets(frame_jets(frame));
}

GeometryCore geometry_core(const FrameJets& jets, const ConnectionAtPoint& conn) {
    const int d = jets.dim;
    GeometryCore core{d,
                      conn,
                      std::vector<double>(static_cast<std::size_t>(d) * d * d * d, 0.0),
                      TensorComponents(d, {Variance::Co, Variance::Co, Variance::Co, Variance::Co}),
                      TensorComponents(d, {Variance::Co, Variance::Co, Variance::Contra}),
                      std::vector<double>(static_cast<std::size_t>(d) * d * d * d, 0.0),
                      TensorComponents(d, {Variance::Co, Variance::Co, Variance::Co}),
                      std::vector<double>(static_cast<std::size_t>(d) * d * d * d, 0.0),
                      TensorComponents(d, {Variance::Co, Variance::Co, Variance::Co, Variance::Co})};

    // R(e_i, e_j) e_k = [d_i Gamma_jk - d_j Gamma_ik
    //                    + Gamma_jk Gamma_i. - Gamma_ik Gamma_j. - C_ij Gamma_.k]^u e_u
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int u = 0; u < d; ++u) {
                    double s = conn.dgm(i, j, k, u) - conn.dgm(j, i, k, u);
                    for (int m = 0; m < d; ++m)
                        s += conn.gm(j, k, m) * conn.gm(i, m, u) - conn.gm(i, k, m) * conn.gm(j, m, u) -
                             jets.bracket[i3(d, i, j, m)] * conn.gm(m, k, u);
                    core.R13[i4(d, i, j, k, u)] = s;
                }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    double s = 0.0;
                    for (int m = 0; m < d; ++m) s += core.R13[i4(d, i, j, k, m)] * jets.G[i2(d, m, l)];
                    core.R(i, j, k, l) = s;
                }

    // (nabla_i P)^u_j
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int u = 0; u < d; ++u) {
                double s = jets.dP[i3(d, i, u, j)];
                for (int m = 0; m < d; ++m)
                    s += conn.gm(i, m, u) * jets.P[i2(d, m, j)] - conn.gm(i, j, m) * jets.P[i2(d, u, m)];
                core.nabla_P(i, j, u) = s;
            }

    for (int a = 0; a < d; ++a)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int u = 0; u < d; ++u) {
                    double s = jets.d2P[i4(d, a, i, u, j)];
                    for (int m = 0; m < d; ++m)
                        s += conn.dgm(a, i, m, u) * jets.P[i2(d, m, j)] +
                             conn.gm(i, m, u) * jets.dP[i3(d, a, m, j)] -
                             conn.dgm(a, i, j, m) * jets.P[i2(d, u, m)] -
                             conn.gm(i, j, m) * jets.dP[i3(d, a, u, m)];
                    core.d_nabla_P[i4(d, a, i, j, u)] = s;
                }

    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                double s = 0.0;
                for (int m = 0; m < d; ++m) s += core.nabla_P(i, j, m) * jets.G[i2(d, m, k)];
                core.F(i, j, k) = s;
            }

    for (int a = 0; a < d; ++a)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    double s = 0.0;
                    for (int m = 0; m < d; ++m)
                        s += core.d_nabla_P[i4(d, a, i, j, m)] * jets.G[i2(d, m, k)] +
                             core.nabla_P(i, j, m) * jets.dG[i3(d, a, m, k)];
                    core.dF[i4(d, a, i, j, k)] = s;
                }

    for (int a = 0; a < d; ++a)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    double s = core.dF[i4(d, a, i, j, k)];
                    for (int m = 0; m < d; ++m)
                        s -= conn.gm(a, i, m) * core.F(m, j, k) + conn.gm(a, j, m) * core.F(i, m, k) +
                             conn.gm(a, k, m) * core.F(i, j, m);
                    core.nabla_F(a, i, j, k) = s;
                }
    return core;
}

CurvatureAtPoint curvature_package(const PointFrame& frame, const ConnectionAtPoint& conn) {
    const int d = frame.dim;
    const FrameJets jets = frame_jets(frame);
    GeometryCore core = geometry_core(jets, conn);
    const MetricAtPoint& m = frame.metric;

    CurvatureAtPoint out{std::move(core.R),
                         TensorComponents(d, {Variance::Co, Variance::Co}),
                         0.0,
                         TensorComponents(d, {Variance::Co, Variance::Co}),
                         0.0,
                         0.0,
                         std::move(core.F),
                         std::move(core.nabla_F),
                         TensorComponents(d, {Variance::Co}),
                         0.0,
                         TensorComponents(d, {Variance::Co, Variance::Co, Variance::Co, Variance::Co}),
                         std::move(core.nabla_P),
                         std::move(core.R13),
                         std::move(core.d_nabla_P),
                         std::move(core.dF)};

    // rho(a, b) = g^{ij} R(e_i, e_a, e_b, e_j)
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            double s = 0.0, ss = 0.0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    const double w = m.ginv(i, j);
                    if (w == 0.0) continue;
                    s += w * out.R(i, a, b, j);
                    double rp = 0.0;
                    for (int n = 0; n < d; ++n) rp += out.R(i, a, b, n) * frame.p(n, j);
                    ss += w * rp;
                }
            out.rho(a, b) = s;
            out.rho_star(a, b) = ss;
        }
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            out.tau += m.ginv(a, b) * out.rho(a, b);
            out.tau_star += m.ginv(a, b) * out.rho_star(a, b);
        }

    // tau** = g^{ij} g^{kl} R(e_i, e_k, P e_l, P e_j)
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const double wij = m.ginv(i, j);
            if (wij == 0.0) continue;
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    const double wkl = m.ginv(k, l);
                    if (wkl == 0.0) continue;
                    double s = 0.0;
                    for (int a = 0; a < d; ++a)
                        for (int b = 0; b < d; ++b)
                            s += out.R(i, k, a, b) * frame.p(a, l) * frame.p(b, j);
                    out.tau_star_star += wij * wkl * s;
                }
        }

    // theta(c) = g^{ij} F(e_i, e_j, e_c)
    for (int c = 0; c < d; ++c) {
        double s = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) s += m.ginv(i, j) * out.F(i, j, c);
        out.theta(c) = s;
    }

    // ||nabla P||^2 = g^{ij} g^{kl} g^{mn} F_ikm F_jln
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const double wij = m.ginv(i, j);
            if (wij == 0.0) continue;
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    const double wkl = m.ginv(k, l);
                    if (wkl == 0.0) continue;
                    for (int a = 0; a < d; ++a)
                        for (int b = 0; b < d; ++b)
                            out.norm_nabla_P += wij * wkl * m.ginv(a, b) * out.F(i, k, a) * out.F(j, l, b);
                }
        }

    // A(i,j,k,l) = -g((nabla_i P) e_k, (nabla_j P) e_l) - g((nabla_j P) e_k, (nabla_i P) e_l)
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    double s = 0.0;
                    for (int a = 0; a < d; ++a)
                        for (int b = 0; b < d; ++b) {
                            const double w = m.g(a, b);
                            if (w == 0.0) continue;
                            s -= w * (out.nabla_P(i, k, a) * out.nabla_P(j, l, b) +
                                      out.nabla_P(j, k, a) * out.nabla_P(i, l, b));
                        }
                    out.A(i, j, k, l) = s;
                }
    return out;
}

double ricci_identity_check(const PointFrame& frame, const ConnectionAtPoint& conn, int tuples,
                            std::uint64_t seed) {
    const CurvatureAtPoint curv = curvature_package(frame, conn);
    const int d = frame.dim;
    SplitRng rng = SplitRng(seed).split(0x51CC1);
    double worst = 0.0;
    for (int t = 0; t < tuples; ++t) {
        const auto x = rng.direction(d), y = rng.direction(d), z = rng.direction(d),
                   w = rng.direction(d);
        const auto pz = apply_p(frame, z);
        const auto pw = apply_p(frame, w);
        double nf_xy = 0.0, nf_yx = 0.0;
        for (int a = 0; a < d; ++a)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int k = 0; k < d; ++k) {
                        const double base = curv.nabla_F(a, i, j, k) * z[static_cast<std::size_t>(j)] *
                                            w[static_cast<std::size_t>(k)];
                        nf_xy += base * x[static_cast<std::size_t>(a)] * y[static_cast<std::size_t>(i)];
                        nf_yx += base * y[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(i)];
                    }
        const double rhs =
            tensor4_apply(curv.R, x, y, pz, w) - tensor4_apply(curv.R, x, y, z, pw);
        worst = std::max(worst, std::abs(nf_xy - nf_yx - rhs));
    }
    return worst;
}

double inner(const PointFrame& frame, std::span<const double> x, std::span<const double> y) {
    const int d = frame.dim;
    double s = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            s += frame.metric.g(i, j) * x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
    return s;
}

std::vector<double> apply_p(const PointFrame& frame, std::span<const double> x) {
    const int d = frame.dim;
    std::vector<double> out(static_cast<std::size_t>(d), 0.0);
    for (int u = 0; u < d; ++u) {
        double s = 0.0;
        for (int m = 0; m < d; ++m) s += frame.p(u, m) * x[static_cast<std::size_t>(m)];
        out[static_cast<std::size_t>(u)] = s;
    }
    return out;
}

double tensor4_apply(const TensorComponents& t, std::span<const double> x, std::span<const double> y,
                     std::span<const double> z, std::span<const double> w) {
    const int d = t.dim();
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        if (xi == 0.0) continue;
        for (int j = 0; j < d; ++j) {
            const double yj = y[static_cast<std::size_t>(j)];
            if (yj == 0.0) continue;
            for (int k = 0; k < d; ++k) {
                const double zk = z[static_cast<std::size_t>(k)];
                if (zk == 0.0) continue;
                for (int l = 0; l < d; ++l)
                    s += t(i, j, k, l) * xi * yj * zk * w[static_cast<std::size_t>(l)];
            }
        }
    }
    return s;
}

double sectional(const PointFrame& frame, const CurvatureAtPoint& curv, std::span<const double> x,
                 std::span<const double> y) {
    const double gxx = inner(frame, x, x);
    const double gyy = inner(frame, y, y);
    const double gxy = inner(frame, x, y);
    const double area2 = gxx * gyy - gxy * gxy;
    if (!(area2 > kPlaneEps))
        throw NumericError("sectional curvature: arguments do not span a 2-plane (denominator " +
                           std::to_string(area2) + ")");
    return tensor4_apply(curv.R, x, y, y, x) / area2;
}

double bisectional(const PointFrame& frame, const CurvatureAtPoint& curv, std::span<const double> x,
                   std::span<const double> y) {
    const auto px = apply_p(frame, x);
    const auto py = apply_p(frame, y);
    const double dx = inner(frame, x, x) * inner(frame, x, x) -
                      inner(frame, x, px) * inner(frame, x, px);
    if (!(dx > kPlaneEps))
        throw NumericError("bisectional curvature: first argument is a structure eigenvector");
    const double dy = inner(frame, y, y) * inner(frame, y, y) -
                      inner(frame, y, py) * inner(frame, y, py);
    if (!(dy > kPlaneEps))
        throw NumericError("bisectional curvature: second argument is a structure eigenvector");
    // Numerator ordered so that h(x,x) equals the sectional curvature of the
    // invariant plane (x, Px) under this curvature sign convention.
    return tensor4_apply(curv.R, x, px, py, y) / (std::sqrt(dx) * std::sqrt(dy));
}

TensorComponents covariant_derivative(const TensorComponents& t, std::span<const double> dt,
                                      const ConnectionAtPoint& conn) {
    const int d = t.dim();
    const int r = t.rank();
    std::vector<Variance> var;
    var.reserve(static_cast<std::size_t>(r) + 1);
    var.push_back(Variance::Co);
    for (int s = 0; s < r; ++s) var.push_back(t.variance(s));
    TensorComponents out(d, std::move(var));

    std::array<int, kMaxRank> idx{};
    std::array<int, kMaxRank> src{};
    const std::size_t block = t.data().size();
    for (int a = 0; a < d; ++a) {
        for (std::size_t flat = 0; flat < block; ++flat) {
            std::size_t rem = flat;
            for (int s = r - 1; s >= 0; --s) {
                idx[static_cast<std::size_t>(s)] = static_cast<int>(rem % static_cast<std::size_t>(d));
                rem /= static_cast<std::size_t>(d);
            }
            double s = dt[static_cast<std::size_t>(a) * block + flat];
            for (int slot = 0; slot < r; ++slot) {
                const int i = idx[static_cast<std::size_t>(slot)];
                src = idx;
                if (t.variance(slot) == Variance::Contra) {
                    for (int m = 0; m < d; ++m) {
                        src[static_cast<std::size_t>(slot)] = m;
                        s += conn.gm(a, m, i) * t.at(std::span<const int>(src.data(), static_cast<std::size_t>(r)));
                    }
                } else {
                    for (int m = 0; m < d; ++m) {
                        src[static_cast<std::size_t>(slot)] = m;
                        s -= conn.gm(a, i, m) * t.at(std::span<const int>(src.data(), static_cast<std::size_t>(r)));
                    }
                }
            }
            std::array<int, kMaxRank + 1> oidx{};
            oidx[0] = a;
            for (int s2 = 0; s2 < r; ++s2) oidx[static_cast<std::size_t>(s2) + 1] = idx[static_cast<std::size_t>(s2)];
            out.at(std::span<const int>(oidx.data(), static_cast<std::size_t>(r) + 1)) = s;
        }
    }
    return out;
}

} // namespace apm
