#pragma once

#include "apm/geometry.hpp"

namespace apm {

/// Everything attached to the associated metric g~(x,y) = g(x,Py) at one
/// point, including both computation paths for its curvature: the direct
/// path runs the ordinary geometry engine on g~'s jets, the formula path
/// rebuilds the same tensor from base-manifold data only.
struct AssociatedAtPoint {
    TensorComponents g_tilde;  // (0,2)
    int signature_pos = 0;
    int signature_neg = 0;
    TensorComponents phi;              // (0,3) connection difference, lowered with g
    TensorComponents F_tilde;          // (0,3) from the direct connection
    TensorComponents T;                // (1,2)
    TensorComponents Q;                // (1,3)
    TensorComponents R_tilde_direct;   // (0,4)
    TensorComponents R_tilde_formula;  // (0,4)
    double r_tilde_residual = 0.0;
    TensorComponents S_part;           // (1,2): the tensorial half-T part of S
    TensorComponents L;                // (1,3)
    TensorComponents B;                // (0,4)
    // Tilde-side internals consumed by the invariance checks.
    ConnectionAtPoint conn_tilde;
    TensorComponents nabla_tilde_P;    // (1,2)
    TensorComponents T_tilde;          // (1,2)
    TensorComponents Q_tilde;          // (1,3)
    TensorComponents L_tilde;          // (1,3)
    std::vector<double> R13_tilde;     // (i,j,k,u)
};

/// Jets of the associated metric, assembled from the frame by the product
/// rule; feeds the same engine the base metric uses.
FrameJets associated_frame_jets(const PointFrame& frame);

/// Connection difference tensor as (0,3) components lowered with g.
TensorComponents phi_tensor(const PointFrame& frame, const CurvatureAtPoint& curv);

/// Levi-Civita connection of the associated metric, computed from scratch.
ConnectionAtPoint nabla_tilde_direct(const PointFrame& frame);

/// Structure derivative of the associated metric's connection, lowered
/// with the associated metric.
TensorComponents f_tilde(const PointFrame& frame, const ConnectionAtPoint& conn_tilde);

/// The torsion-style transfer tensor T and the curvature correction Q of
/// the transformation nabla -> nabla~.
std::pair<TensorComponents, TensorComponents> t_q_tensors(const PointFrame& frame,
                                                          const ConnectionAtPoint& conn,
                                                          const CurvatureAtPoint& curv);

struct RTildePaths {
    TensorComponents direct;
    TensorComponents formula;
    double residual = 0.0;
};
RTildePaths r_tilde_two_paths(const PointFrame& frame, const ConnectionAtPoint& conn,
                              const CurvatureAtPoint& curv);

/// Invariants of the connection transformation: the tensorial part of S
/// (half of T) and L = R + Q/2 as (1,3) components.
std::pair<TensorComponents, TensorComponents> s_l_invariants(const CurvatureAtPoint& curv,
                                                             const TensorComponents& T,
                                                             const TensorComponents& Q);

/// The quadratic structure-derivative combination entering the zero-L
/// curvature identity.
TensorComponents b_tensor(const PointFrame& frame, const CurvatureAtPoint& curv);

/// One-stop construction of the full associated package.
AssociatedAtPoint associated_package(const PointFrame& frame, const ConnectionAtPoint& conn,
                                     const CurvatureAtPoint& curv);

} // namespace apm
