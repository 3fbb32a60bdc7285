#pragma once

#include "plasmon/geometry.hpp"
#include "plasmon/layer_ops.hpp"
#include "plasmon/np_spectrum.hpp"
#include "plasmon/sphere.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace plasmon {

/// Dipole source a . grad delta_z near an inclusion of size s, frequency
/// omega = s omega_0. Vectors are 3D; the third entry is ignored in 2D.
struct TransmissionProblem {
  int dimension = 2;
  double scale = 0.01;
  double delta = 1e-2;
  double eps_c = -2.0;
  double eps_m = 1.0;
  double omega0 = 1.0;
  Vec3 dipole_a = Vec3::UnitX();
  Vec3 dipole_z = Vec3(3.0, 0.0, 0.0);
};

/// Parameters after the eps_m = 1 rescaling: eps = eps_c/eps_m,
/// delta/eps_m, exterior wavenumber omega/sqrt(eps_m), source over eps_m.
struct ScaledParameters {
  double eps = 0.0;
  double delta = 0.0;
  double omega = 0.0;
  cplx kc{0.0};
  double source_factor = 1.0;
};

ScaledParameters scaled_parameters(const TransmissionProblem& problem);

/// Everything resolution-dependent that a solve reuses: nodes and Laplace
/// operators on a planar curve, or harmonic degree and the projection rule
/// on the sphere, plus the NP spectrum.
struct Discretization {
  int dimension = 2;
  std::shared_ptr<const BoundaryCurve> curve;
  int resolution = 0;  // N nodes (2D) or degree L (3D)
  NodeSet nodes;
  RMatrix S;
  RMatrix Kstar;
  SphereQuadrature quad;
  RMatrix harmonics;  // quad point x harmonic index
  std::shared_ptr<const NPSpectrum> spectrum;
  std::string id;

  int size() const;
  double sphere_radius() const;
};

Discretization discretize(const BoundaryCurve& curve, int resolution);

/// Thread-safe cache of Helmholtz operator pairs keyed by (curve, N, k).
/// Entries are immutable once inserted.
class OperatorCache {
 public:
  std::shared_ptr<const HelmholtzPair> helmholtz(const Discretization& disc, cplx k);
  std::shared_ptr<const HelmholtzPair> dk(const Discretization& disc, cplx k);
  size_t size() const;

 private:
  std::shared_ptr<const HelmholtzPair> lookup(const std::string& key, const std::function<HelmholtzPair()>& build);

  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const HelmholtzPair>> entries_;
};

/// F_z = -a . grad Gamma^w(x - z) and its normal derivative on the
/// boundary: nodal values in 2D, harmonic coefficients in 3D.
struct DipoleTraces {
  CVector f;
  CVector g;
  double tail = 0.0;  // top-degree coefficient relative to the largest (3D)
};

DipoleTraces dipole_traces(const TransmissionProblem& problem, const Discretization& disc);
DipoleTraces dipole_traces(const Vec3& z, const Vec3& a, double omega, double factor, const Discretization& disc);

struct DipoleValue {
  cplx value;
  Eigen::Vector3cd gradient;
};

/// F_z and its gradient at a point x, for d = 2 or 3.
DipoleValue dipole_field(const Vec3& x, const Vec3& z, const Vec3& a, cplx omega, int dim);

/// Block system [[S^kc, -S^w], [(eps + i delta)(-1/2 + K^kc*), -(1/2 + K^w*)]].
struct LinearSystem {
  CMatrix matrix;
  CVector rhs;
  double condition = 0.0;  // 1-norm estimate from the LU factors
};

LinearSystem assemble_system(const TransmissionProblem& problem, const Discretization& disc,
                             OperatorCache* cache = nullptr);

struct SolutionPair {
  CVector phi;
  CVector psi;
  std::string solver;
  double residual = 0.0;
};

inline constexpr double kDirectResidualTol = 1e-8;
inline constexpr double kDenominatorGuard = 1e-14;

SolutionPair solve_direct(const TransmissionProblem& problem, const Discretization& disc,
                          OperatorCache* cache = nullptr);

/// Quasi-static closed forms built on the NP spectrum.
SolutionPair solve_spectral(const TransmissionProblem& problem, const Discretization& disc);

/// Coefficient-level closed forms. Inputs are f^v and g^ in the given
/// spectrum; outputs are densities (nodal or harmonic coefficients).
SolutionPair solve_spectral_3d(const CVector& fcheck, const CVector& ghat, double eps, double delta,
                               const NPSpectrum& spec);
SolutionPair solve_spectral_2d(const CVector& fcheck, const CVector& ghat, double eps, double delta, double omega,
                               cplx kc, const NPSpectrum& spec);

/// Relative distance of two solutions in H* x H*.
double solution_difference(const SolutionPair& a, const SolutionPair& b, const NPSpectrum& spec);

/// ||grad S^k[phi]||^2 over the interior. 2D: Green's identity on the
/// boundary, int |grad u|^2 = Re B + Re(k^2) int |u|^2 with B = int conj(u) d_nu u|-,
/// where int |u|^2 = -Im B / Im(k^2) for complex k^2 and comes from the
/// d/dk operators otherwise. 3D: radial Gauss-Legendre on each mode.
double gradient_energy(const CVector& phi, cplx k, const Discretization& disc, OperatorCache* cache = nullptr);

/// Interior ground truth for the 2D boundary identity: polar quadrature up
/// to rho_max on an upsampled density, plus a collar estimate.
struct EnergyCheck {
  double boundary = 0.0;
  double interior = 0.0;
  double collar = 0.0;
  double rel_diff = 0.0;
};

EnergyCheck validate_energy(const CVector& phi, cplx k, const Discretization& disc, double rho_max = 0.97,
                            OperatorCache* cache = nullptr);

/// a_n = (d_nu F)^(n) - (1/2 + lambda_n) F^v(n) at frequency omega, and the
/// quasi-static a . grad S[phi_n](z).
struct Coupling {
  cplx an;
  cplx quasi_static;
};

Coupling coupling_an(const Vec3& z, const Vec3& a, int n, const Discretization& disc, double omega);

/// Indices n >= 1 with |lambda_n - lambda(eps)| < tol.
std::vector<int> resonant_modes(const NPSpectrum& spec, double eps, double tol = 1e-6);

/// Index n >= 1 whose eigenvalue is nearest lambda(eps).
int nearest_mode(const NPSpectrum& spec, double eps);

}  // namespace plasmon
