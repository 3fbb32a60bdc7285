#pragma once

#include "plasmon/geometry.hpp"
#include "plasmon/specfun.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace plasmon {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

enum class OperatorKind { single_layer, np_adjoint, remainder_R, remainder_Q, dk_single_layer, dk_np_adjoint };

std::string to_string(OperatorKind kind);

/// Dense Nystrom matrix acting on nodal density values.
struct BoundaryOperator {
  OperatorKind kind = OperatorKind::single_layer;
  cplx wavenumber{0.0};
  std::string nodes_id;
  CMatrix matrix;
};

// Laplace single layer and NP operator. Log-singular kernels use the
// periodic product rule on the equispaced parameter grid.
RMatrix assemble_S(const NodeSet& nodes);
RMatrix assemble_Kstar(const NodeSet& nodes);

/// Helmholtz single layer and (K^k)* for complex k; k = 0 reproduces Laplace.
struct HelmholtzPair {
  CMatrix S;
  CMatrix Kstar;
};

HelmholtzPair assemble_helmholtz(const NodeSet& nodes, cplx k);
CMatrix assemble_S_omega(const NodeSet& nodes, cplx k);
CMatrix assemble_Kstar_omega(const NodeSet& nodes, cplx k);

/// d/dk of S^k and (K^k)*, used for the volume term of the energy identity.
HelmholtzPair assemble_dk(const NodeSet& nodes, cplx k);

/// Remainder operators of the low-frequency splitting in 2D:
/// S^w = S + tau <.,1> + w^2 ln w R,  (K^w)* = K* + w^2 ln w Q.
struct RemainderPair {
  CMatrix R;
  CMatrix Q;
};

RemainderPair assemble_R_Q(const NodeSet& nodes, double omega);

/// Rank-one operator phi -> c <phi, 1>.
CMatrix constant_pairing(const NodeSet& nodes, cplx c);

struct PotentialValues {
  CVector value;
  std::vector<Eigen::Vector2cd> gradient;
};

/// S^k[phi] (and its gradient) at off-boundary points by direct quadrature.
/// Throws if a point lies within 2x the largest node spacing of the nodes.
PotentialValues eval_potential(const NodeSet& nodes, const CVector& density, cplx k,
                               const std::vector<Vec2>& points, bool want_gradient);

/// Minimum distance from p to the nodes and the allowed evaluation buffer.
double node_distance(const NodeSet& nodes, const Vec2& p);
double evaluation_buffer(const NodeSet& nodes);

/// Trigonometric interpolation of equispaced periodic samples onto
/// factor * N points. The Nyquist mode is split symmetrically.
CVector trig_upsample(const CVector& values, int factor);

/// d/dt of the trigonometric interpolant at the sample points.
CVector spectral_derivative(const CVector& values);

/// Largest singular value of the quadrature-weighted operator
/// W^{1/2} A W^{-1/2} (discrete L2(dsigma) norm).
double weighted_operator_norm(const NodeSet& nodes, const CMatrix& a);

/// Discrete L2(dsigma) inner product sum_j w_j conj(a_j) b_j.
cplx weighted_dot(const NodeSet& nodes, const CVector& a, const CVector& b);

}  // namespace plasmon
