#pragma once

#include "plasmon/layer_ops.hpp"

#include <vector>

namespace plasmon {

/// H* inner product <phi, psi> = -<phi, S~[psi]> on nodal densities.
///
/// phi_eq spans the kernel of K* - 1/2 and is scaled so that its boundary
/// mean is one; c0 = S[phi_eq] is the interior constant for that scaling.
/// When |c0| < 1e-8 (1 + perimeter) the operator S~ sends the H*-normalized
/// phi_0 to the constant 1 and agrees with S on mean-zero densities.
struct GramData {
  RMatrix gram;
  RMatrix s_tilde;
  RVector phi_eq;
  double c0 = 0.0;
  bool patched = false;
  double min_eigenvalue = 0.0;
};

GramData build_gram(const RMatrix& S, const NodeSet& nodes);

/// Eigendecomposition of K* in H*, or the analytic sphere spectrum.
///
/// 2D: columns of `modes` are the H*-orthonormal eigendensities, `dual`
/// holds S~[phi_n]. 3D: densities are spherical-harmonic coefficient
/// vectors, phi_nm = sqrt((2n+1)/R^3) Y_nm, and the matrices stay empty.
struct NPSpectrum {
  int dimension = 2;
  std::vector<double> eigenvalues;
  RMatrix modes;
  RMatrix dual;
  RMatrix check_map;  // trace -> coefficients in the basis S~[phi_n]
  RMatrix gram;
  RMatrix s_tilde;
  RVector weights;
  double c0 = 0.0;           // S[phi] for phi_0 rescaled to boundary mean one
  bool patched = false;
  double phi0_single = 0.0;  // S[phi_0] for the normalized phi_0
  double phi0_mass = 0.0;    // <phi_0, 1>
  double phi0_tilde = 0.0;   // S~[phi_0]
  int degree = 0;
  double radius = 0.0;

  int size() const { return int(eigenvalues.size()); }
};

/// Generalized symmetric solve of the H*-self-adjoint K*. Ordering: lambda_0
/// first, then decreasing |lambda|, ties by ascending value; each mode has
/// its first significant entry positive, except phi_0 which has positive mass.
NPSpectrum np_eigendecomposition(const RMatrix& Kstar, const GramData& gram, const NodeSet& nodes);

/// Assembles S and K* on the nodes and decomposes.
NPSpectrum np_spectrum(const NodeSet& nodes);

/// Sphere of radius R truncated at degree L, in spherical-harmonic order.
NPSpectrum sphere_spectrum(int degree, double radius);

/// phi^(n) = <phi, phi_n>_{H*}.
CVector coeffs_hat(const CVector& density, const NPSpectrum& spec);

/// f^v(n), the coefficients of f in the basis S~[phi_n].
CVector coeffs_check(const CVector& trace, const NPSpectrum& spec);

/// sum_n c_n phi_n.
CVector synthesize(const CVector& coeffs, const NPSpectrum& spec);

double hstar_norm(const CVector& density, const NPSpectrum& spec);

/// ||f||_H = ||S~^{-1} f||_{H*}.
double h_norm(const CVector& trace, const NPSpectrum& spec);

/// Groups eigenvalues with equal |lambda| (within tol) into clusters.
std::vector<int> multiplicity_clusters(const std::vector<double>& eigenvalues, double tol = 1e-7);

}  // namespace plasmon
