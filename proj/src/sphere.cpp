#include "plasmon/sphere.hpp"

#include "plasmon/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace plasmon {

namespace {

constexpr cplx kI{0.0, 1.0};

void check_degree(int degree) {
  if (degree < kMinSphereDegree) throw std::invalid_argument("sphere truncation degree must be at least 4");
}

}  // namespace

double real_sph_harm(int n, int m, double theta, double phi) {
  if (n < 0 || std::abs(m) > n) throw std::invalid_argument("real_sph_harm: need |m| <= n");
  const double p = std::sph_legendre(unsigned(n), unsigned(std::abs(m)), theta);
  if (m == 0) return p;
  const double s2 = std::sqrt(2.0);
  return m > 0 ? s2 * p * std::cos(m * phi) : s2 * p * std::sin(-m * phi);
}

double real_sph_harm(int n, int m, const Vec3& unit) {
  const double theta = std::acos(std::clamp(unit.z(), -1.0, 1.0));
  const double phi = std::atan2(unit.y(), unit.x());
  return real_sph_harm(n, m, theta, phi);
}

SphereOperators sphere_operators(int degree, double radius, cplx k) {
  check_degree(degree);
  if (!(radius > 0.0)) throw std::invalid_argument("sphere radius must be positive");
  if (std::abs(k) * radius > 10.0) throw std::invalid_argument("sphere operators need |k| R <= 10");
  SphereOperators ops;
  ops.degree = degree;
  ops.radius = radius;
  ops.wavenumber = k;
  ops.S.resize(degree + 1);
  ops.Kstar.resize(degree + 1);
  const cplx z = k * radius;
  const auto sb = scaled_spherical_bessel(degree, z);
  for (int n = 0; n <= degree; ++n) {
    const double q = 2.0 * n + 1.0;
    ops.S[n] = -kI * radius * sb.jhat[n] * sb.hhat[n] / q;
    ops.Kstar[n] = 0.5 - kI * sb.hhat[n] * (double(n) * sb.jhat[n] - z * z * sb.jhat[n + 1] / (q + 2.0)) / q;
  }
  return ops;
}

SphereRemainder sphere_remainder(int degree, double radius, double omega) {
  if (!(omega > 0.0) || omega > kOmegaCeiling) throw std::domain_error("sphere_remainder: omega outside (0, 0.5]");
  const auto lap = sphere_operators(degree, radius, 0.0);
  const auto hel = sphere_operators(degree, radius, omega);
  SphereRemainder out;
  out.R.resize(degree + 1);
  out.Q.resize(degree + 1);
  for (int n = 0; n <= degree; ++n) {
    out.R[n] = (hel.S[n] - lap.S[n]) / omega;
    out.Q[n] = (hel.Kstar[n] - lap.Kstar[n]) / (omega * omega);
  }
  return out;
}

SphereQuadrature sphere_quadrature(int n_theta, int n_phi) {
  std::vector<double> x, w;
  gauss_legendre(n_theta, x, w);
  SphereQuadrature q;
  for (int i = 0; i < n_theta; ++i) {
    const double st = std::sqrt(std::max(0.0, 1.0 - x[i] * x[i]));
    for (int j = 0; j < n_phi; ++j) {
      const double phi = 2.0 * kPi * j / n_phi;
      q.points.emplace_back(st * std::cos(phi), st * std::sin(phi), x[i]);
      q.weights.push_back(w[i] * 2.0 * kPi / n_phi);
    }
  }
  return q;
}

Eigen::VectorXcd project_harmonics(int degree, const SphereQuadrature& quad, const std::vector<cplx>& samples) {
  if (samples.size() != quad.points.size()) throw std::invalid_argument("project_harmonics: sample count mismatch");
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(sh_count(degree));
  for (size_t q = 0; q < quad.points.size(); ++q) {
    const Vec3& u = quad.points[q];
    const double theta = std::acos(std::clamp(u.z(), -1.0, 1.0));
    const double phi = std::atan2(u.y(), u.x());
    const cplx f = quad.weights[q] * samples[q];
    for (int n = 0; n <= degree; ++n)
      for (int m = -n; m <= n; ++m) c[sh_index(n, m)] += f * real_sph_harm(n, m, theta, phi);
  }
  return c;
}

SurfaceValues surface_quadrature_apply(int n, int m, double radius, cplx k, const Vec3& x, int n_theta, int n_phi) {
  const Vec3 xh = x.normalized();
  const Vec3 ref = std::abs(xh.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  const Vec3 e1 = xh.cross(ref).normalized();
  const Vec3 e2 = xh.cross(e1);
  std::vector<double> u, w;
  gauss_legendre(n_theta, u, w);
  SurfaceValues out{0.0, 0.0};
  for (int i = 0; i < n_theta; ++i) {
    const double th = 0.5 * kPi * (u[i] + 1.0);
    const double wt = 0.5 * kPi * w[i] * 2.0 * kPi / n_phi;
    const double r = 2.0 * radius * std::sin(0.5 * th);
    const cplx e = std::exp(kI * k * r);
    const double c = std::cos(0.5 * th);
    // Gamma(r) R^2 sin(th) and d_nu Gamma(r) R^2 sin(th) with the 1/r singularity cancelled
    const cplx ks = -e * radius * c / (4.0 * kPi);
    const cplx kk = -e * (kI * k * r - 1.0) * c / (8.0 * kPi);
    for (int j = 0; j < n_phi; ++j) {
      const double ph = 2.0 * kPi * j / n_phi;
      const Vec3 y = std::sin(th) * (std::cos(ph) * e1 + std::sin(ph) * e2) + std::cos(th) * xh;
      const double yv = real_sph_harm(n, m, y);
      out.S += wt * ks * yv;
      out.Kstar += wt * kk * yv;
    }
  }
  return out;
}

double harmonic_tail(int degree, const Eigen::VectorXcd& coeffs) {
  double tail = 0.0;
  for (int m = -degree; m <= degree; ++m) tail = std::max(tail, std::abs(coeffs[sh_index(degree, m)]));
  return tail;
}

}  // namespace plasmon
