#pragma once

#include "apm/manifold.hpp"
#include "apm/tensor.hpp"

#include <span>
#include <vector>

namespace apm {

/// Levi-Civita connection coefficients in the working frame, together with
/// their frame derivatives (zero on the Lie backend, where everything is
/// frame-constant).
struct ConnectionAtPoint {
    int dim = 0;
    std::vector<double> gamma;  // (i,j,u): coefficient of nabla_{e_i} e_j along e_u
    std::vector<double> dgamma; // (a,i,j,u): frame derivative of gamma

    [[nodiscard]] double gm(int i, int j, int u) const {
        return gamma[(static_cast<std::size_t>(i) * dim + j) * dim + u];
    }
    [[nodiscard]] double dgm(int a, int i, int j, int u) const {
        return dgamma[((static_cast<std::size_t>(a) * dim + i) * dim + j) * dim + u];
    }
};

/// Raw second-order jet of a frame metric plus the structure tensor jet and
/// the frame bracket. This is the engine input; it is built once from g and
/// once from the associated metric, so both connections run through
/// identical code.
struct FrameJets {
    int dim = 0;
    std::vector<double> G, dG, d2G; // metric value and frame derivatives
    std::vector<double> Ginv;       // inverse of G at the point
    std::vector<double> P, dP, d2P; // structure tensor jet
    std::vector<double> bracket;    // (i,j,u) -> C^u_ij
};

/// Connection, curvature and every covariant-derivative array derived from
/// one metric's jets.
struct GeometryCore {
    int dim = 0;
    ConnectionAtPoint conn;
    std::vector<double> R13;       // (i,j,k,u): curvature operator R(e_i,e_j)e_k along e_u
    TensorComponents R;            // (0,4) lowered with the engine metric
    TensorComponents nabla_P;      // (1,2): (i,j,u) = component u of (nabla_i P) e_j
    std::vector<double> d_nabla_P; // (a,i,j,u)
    TensorComponents F;            // (0,3): g((nabla_i P) e_j, e_k)
    std::vector<double> dF;        // (a,i,j,k)
    TensorComponents nabla_F;      // (0,4), derivative slot first
};

FrameJets frame_jets(const PointFrame& frame);
ConnectionAtPoint connection_from_jets(const FrameJets& jets);
GeometryCore geometry_core(const FrameJets& jets, const ConnectionAtPoint& conn);

/// Koszul construction in the working frame; covers coordinate frames
/// (derivative terms) and invariant frames (bracket terms) uniformly.
ConnectionAtPoint levi_civita(const PointFrame& frame);

/// Every pointwise quantity the curvature layer defines.
struct CurvatureAtPoint {
    TensorComponents R;         // (0,4)
    TensorComponents rho;       // (0,2) Ricci
    double tau = 0.0;           // scalar curvature
    TensorComponents rho_star;  // (0,2) associated Ricci
    double tau_star = 0.0;
    double tau_star_star = 0.0;
    TensorComponents F;         // (0,3)
    TensorComponents nabla_F;   // (0,4), derivative slot first
    TensorComponents theta;     // (0,1) Lie form
    double norm_nabla_P = 0.0;
    TensorComponents A;         // (0,4)
    // Working arrays reused by the associated-manifold layer.
    TensorComponents nabla_P;   // (1,2)
    std::vector<double> R13;
    std::vector<double> d_nabla_P;
    std::vector<double> dF;
};

CurvatureAtPoint curvature_package(const PointFrame& frame, const ConnectionAtPoint& conn);

/// Max residual of the curvature / second-covariant-derivative interchange
/// identity over sampled vector quadruples.
double ricci_identity_check(const PointFrame& frame, const ConnectionAtPoint& conn,
                            int tuples = 50, std::uint64_t seed = 0);

/// Sectional curvature of the plane spanned by x and y.
double sectional(const PointFrame& frame, const CurvatureAtPoint& curv,
                 std::span<const double> x, std::span<const double> y);

/// Invariant bisectional curvature of the invariant planes (x, Px), (y, Py);
/// both arguments must be noneigenvectors of P.
double bisectional(const PointFrame& frame, const CurvatureAtPoint& curv,
                   std::span<const double> x, std::span<const double> y);

// Frame-level helpers shared across modules.
double inner(const PointFrame& frame, std::span<const double> x, std::span<const double> y);
std::vector<double> apply_p(const PointFrame& frame, std::span<const double> x);
double tensor4_apply(const TensorComponents& t, std::span<const double> x,
                     std::span<const double> y, std::span<const double> z,
                     std::span<const double> w);

/// Covariant derivative of an arbitrary tensor from its components, their
/// frame derivatives and the connection; the new covariant slot comes first.
TensorComponents covariant_derivative(const TensorComponents& t, std::span<const double> dt,
                                      const ConnectionAtPoint& conn);

} // namespace apm
