#pragma once

#include <complex>
#include <vector>

namespace plasmon {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

/// Upper end of the frequency range where the low-frequency remainder
/// kernels are evaluated.
inline constexpr double kOmegaCeiling = 0.5;

/// Laplace fundamental solution as a function of the distance r > 0:
/// (1/2pi) ln r in 2D, -1/(4 pi r) in 3D.
double laplace_green(double r, int dim);

/// Cylindrical Bessel J_n(z), n in {0, 1}, entire in z.
cplx bessel_j(int n, cplx z);

/// Cylindrical Bessel Y_n(z), n in {0, 1}, principal branch.
cplx bessel_y(int n, cplx z);

/// Hankel function of the first kind H_n^{(1)}(z) = J_n(z) + i Y_n(z).
/// Ascending series for |z| < kHankelCrossover, large-argument expansion
/// beyond it. Throws std::domain_error at z = 0.
cplx hankel1(int n, cplx z);

inline constexpr double kHankelCrossover = 12.0;

/// Radial profile of the outgoing Helmholtz fundamental solution with its
/// first two derivatives in r.
struct RadialGreen {
  cplx value;
  cplx d1;
  cplx d2;
};

/// Gamma^k(r): -(i/4) H_0^{(1)}(k r) in 2D, -e^{ikr}/(4 pi r) in 3D.
/// k = 0 gives the Laplace kernel.
RadialGreen helmholtz_green_radial(double r, cplx k, int dim);

cplx helmholtz_green(double r, cplx k, int dim);

/// tau(k) = (1/2pi)(ln k + gamma - ln 2) - i/4 with the principal logarithm.
/// Accepts any nonzero complex k; tau(omega) is the real-frequency case.
cplx tau_constant(cplx k);

/// Real-frequency tau; rejects omega <= 0.
cplx tau_constant(double omega);

/// Low-frequency remainder kernel K_d^omega(r):
///   d = 2: [Gamma^omega - Gamma - tau] / (omega^2 ln omega)
///   d = 3: [Gamma^omega - Gamma] / omega
/// evaluated from cancellation-free series. omega must lie in (0, 0.5].
cplx remainder_kernel(double r, double omega, int dim);

/// d/dr of remainder_kernel.
cplx remainder_kernel_dr(double r, double omega, int dim);

/// J_0(z) - 1 without cancellation at small z.
cplx bessel_j0_minus_one(cplx z);

/// k_c = -i (omega / sqrt|eps_c|) (1 - i delta / (2 eps_c)). Requires
/// eps_c < 0, delta >= 0, omega > 0.
cplx interior_wavenumber(double omega, double eps_c, double delta);

/// Spherical Bessel j_n and Hankel h_n^{(1)} for orders 0..nmax at z.
struct SphericalBessel {
  std::vector<cplx> j;
  std::vector<cplx> h;
};

SphericalBessel spherical_bessel(int nmax, cplx z);

cplx spherical_j(int n, cplx z);
cplx spherical_h(int n, cplx z);

/// Rescaled spherical functions that stay O(1) as z -> 0:
///   jhat_n = j_n(z) (2n+1)!! / z^n,   hhat_n = h_n(z) z^{n+1} / (2n-1)!!
/// with (-1)!! = 1. Orders 0..nmax+1 are returned.
struct ScaledSphericalBessel {
  std::vector<cplx> jhat;
  std::vector<cplx> hhat;
};

ScaledSphericalBessel scaled_spherical_bessel(int nmax, cplx z);

/// lambda(t) = (t + 1) / (2 (t - 1)).
double plasmon_lambda(double t);

/// Inverse of plasmon_lambda: eps = (2 lambda + 1) / (2 lambda - 1).
double plasmon_epsilon(double lambda);

}  // namespace plasmon
