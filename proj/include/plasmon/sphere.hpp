#pragma once

#include "plasmon/specfun.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace plasmon {

using Vec3 = Eigen::Vector3d;

/// Real spherical harmonics, orthonormal on the unit sphere, indexed by
/// n^2 + n + m for -n <= m <= n.
inline int sh_index(int n, int m) { return n * n + n + m; }
inline int sh_count(int degree) { return (degree + 1) * (degree + 1); }

double real_sph_harm(int n, int m, double theta, double phi);
double real_sph_harm(int n, int m, const Vec3& unit);

/// Per-degree eigenvalues of the layer operators on the sphere of radius R.
/// Entry n acts on every Y_nm of that degree.
struct SphereOperators {
  int degree = 0;
  double radius = 1.0;
  cplx wavenumber{0.0};
  std::vector<cplx> S;
  std::vector<cplx> Kstar;
};

inline constexpr int kMinSphereDegree = 4;

/// Diagonal S^k and (K^k)* over degrees 0..L; k = 0 gives
/// -R/(2n+1) and 1/(2(2n+1)). Requires L >= 4, R > 0, |k| R <= 10.
SphereOperators sphere_operators(int degree, double radius, cplx k);

/// Remainder diagonals R_3 = (S^w - S)/w and Q_3 = ((K^w)* - K*)/w^2.
struct SphereRemainder {
  std::vector<cplx> R;
  std::vector<cplx> Q;
};

SphereRemainder sphere_remainder(int degree, double radius, double omega);

/// Tensor rule on the unit sphere: Gauss-Legendre in cos(theta) times the
/// trapezoid rule in phi. Exact for harmonics of degree < 2 n_theta.
struct SphereQuadrature {
  std::vector<Vec3> points;  // unit vectors
  std::vector<double> weights;
};

SphereQuadrature sphere_quadrature(int n_theta, int n_phi);

/// Coefficients c_nm with f(R x) ~ sum c_nm Y_nm(x), by quadrature.
Eigen::VectorXcd project_harmonics(int degree, const SphereQuadrature& quad,
                                   const std::vector<cplx>& samples);

/// Direct surface quadrature of S^k[Y_nm] and (K^k)*[Y_nm] at the boundary
/// point R x, in polar coordinates centred at x where the weakly singular
/// kernels become smooth.
struct SurfaceValues {
  cplx S;
  cplx Kstar;
};

SurfaceValues surface_quadrature_apply(int n, int m, double radius, cplx k, const Vec3& x, int n_theta = 64,
                                       int n_phi = 64);

/// Tail estimate: largest |c_nm| over the top degree of a projected field.
double harmonic_tail(int degree, const Eigen::VectorXcd& coeffs);

}  // namespace plasmon
