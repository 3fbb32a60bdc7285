#include "doctest.h"
#include "oracles.hpp"

#include "plasmon/errors.hpp"
#include "plasmon/transmission.hpp"

#include <cmath>
#include <map>
#include <random>

using namespace plasmon;

namespace {

const cplx iu{0.0, 1.0};

CurveParams circle(double r) {
  CurveParams p;
  p.radius = r;
  return p;
}

CurveParams ellipse(double a, double b) {
  CurveParams p;
  p.semi_a = a;
  p.semi_b = b;
  return p;
}

const Discretization& ellipse_disc(int n) {
  static std::map<int, Discretization> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, discretize(make_curve(CurveKind::ellipse, ellipse(2.0, 1.0)), n)).first;
  return it->second;
}

const Discretization& sphere_disc(int L) {
  static std::map<int, Discretization> cache;
  auto it = cache.find(L);
  if (it == cache.end()) it = cache.emplace(L, discretize(make_curve(CurveKind::sphere, circle(1.0)), L)).first;
  return it->second;
}

TransmissionProblem sphere_problem(double eps, double delta, double s) {
  TransmissionProblem p;
  p.dimension = 3;
  p.eps_c = eps;
  p.delta = delta;
  p.scale = s;
  p.dipole_a = Vec3::UnitZ();
  p.dipole_z = Vec3(0.0, 0.0, 3.0);
  return p;
}

TransmissionProblem ellipse_problem(double eps, double delta, double s) {
  TransmissionProblem p;
  p.dimension = 2;
  p.eps_c = eps;
  p.delta = delta;
  p.scale = s;
  p.dipole_a = Vec3::UnitX();
  p.dipole_z = Vec3(3.0, 0.0, 0.0);
  return p;
}

// s with s^2 |ln s| = c delta on (0, e^{-1/2})
double coupled_scale_2d(double target) {
  double lo = 1e-300, hi = std::exp(-0.5);
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    (mid * mid * std::abs(std::log(mid)) < target ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace

TEST_CASE("scaled parameters and validation") {
  auto p = ellipse_problem(-4.0, 0.02, 0.1);
  p.eps_m = 2.0;
  const auto sp = scaled_parameters(p);
  CHECK(sp.eps == doctest::Approx(-2.0));
  CHECK(sp.delta == doctest::Approx(0.01));
  CHECK(sp.omega == doctest::Approx(0.1 / std::sqrt(2.0)));
  CHECK(sp.source_factor == doctest::Approx(0.5));
  CHECK(sp.kc.real() > 0.0);
  CHECK(sp.kc.imag() < 0.0);
  p.scale = 0.6;
  CHECK_THROWS_AS(scaled_parameters(p), ConfigError);
  p.scale = 0.1;
  p.eps_c = 1.0;
  CHECK_THROWS_AS(scaled_parameters(p), ConfigError);
  p.eps_c = -2.0;
  p.dipole_a = Vec3(1.0, 1.0, 0.0);
  CHECK_THROWS_AS(scaled_parameters(p), ConfigError);
}

TEST_CASE("dipole field") {
  const Vec3 a = Vec3(1.0, -2.0, 0.5).normalized();
  const Vec3 z(0.3, 2.0, -1.0), x(0.1, -0.4, 0.7);
  // 3D Laplace limit: F = -a . (x - z) / (4 pi |x - z|^3)
  const Vec3 d = x - z;
  const double ref = -a.dot(d) / (4 * oracle::pi * std::pow(d.norm(), 3));
  CHECK(std::abs(dipole_field(x, z, a, 0.0, 3).value - ref) < 1e-15);
  CHECK(std::abs(dipole_field(x, z, a, 1e-7, 3).value - ref) < 1e-8);
  // 2D: value and gradient against central differences of Gamma^w
  const Vec3 a2 = Vec3(0.6, 0.8, 0.0), z2(2.5, -0.3, 0.0), x2(0.4, 0.2, 0.0);
  const cplx w{0.3, 0.0};
  auto gam = [&](const Vec3& p) { return helmholtz_green(p.norm(), w, 2); };
  auto fz = [&](const Vec3& p) {
    const double h = 1e-5;
    const Vec3 ex(h, 0, 0), ey(0, h, 0);
    const Vec3 q = p - z2;
    return -(a2.x() * (gam(q + ex) - gam(q - ex)) + a2.y() * (gam(q + ey) - gam(q - ey))) / (2 * h);
  };
  const auto v = dipole_field(x2, z2, a2, w, 2);
  CHECK(std::abs(v.value - fz(x2)) < 1e-6 * std::abs(v.value));
  const double h = 1e-4;
  const cplx gx = (fz(x2 + Vec3(h, 0, 0)) - fz(x2 - Vec3(h, 0, 0))) / (2 * h);
  const cplx gy = (fz(x2 + Vec3(0, h, 0)) - fz(x2 - Vec3(0, h, 0))) / (2 * h);
  CHECK(std::abs(v.gradient[0] - gx) < 1e-5 * v.gradient.norm());
  CHECK(std::abs(v.gradient[1] - gy) < 1e-5 * v.gradient.norm());
}

TEST_CASE("dipole traces: symmetry and placement") {
  const auto disc = discretize(make_curve(CurveKind::circle, circle(1.0)), 64);
  const auto tr = dipole_traces(Vec3(3, 0, 0), Vec3::UnitX(), 0.1, 1.0, disc);
  // node j and node N - j are mirror images in x2
  for (int j = 1; j < 32; ++j) {
    CHECK(std::abs(tr.f[j] - tr.f[64 - j]) < 1e-14);
    CHECK(std::abs(tr.g[j] - tr.g[64 - j]) < 1e-14);
  }
  CHECK_THROWS_AS(dipole_traces(Vec3(0.5, 0, 0), Vec3::UnitX(), 0.1, 1.0, disc), ConfigError);
  CHECK_THROWS_AS(dipole_traces(Vec3(1.01, 0, 0), Vec3::UnitX(), 0.1, 1.0, disc), ConfigError);
  const auto& sd = sphere_disc(12);
  CHECK_THROWS_AS(dipole_traces(Vec3(0, 0, 1.01), Vec3::UnitZ(), 0.1, 1.0, sd), ConfigError);
  const auto st = dipole_traces(Vec3(0, 0, 3), Vec3::UnitZ(), 0.1, 1.0, sd);
  CHECK(st.tail < 1e-5);
  // axial source: only m = 0 harmonics
  for (int n = 1; n <= 12; ++n) CHECK(std::abs(st.f[sh_index(n, 1)]) < 1e-14);
}

TEST_CASE("assembled system") {
  const auto& disc = ellipse_disc(128);
  auto p = ellipse_problem(-2.0, 10.0, 0.01);
  const auto sys = assemble_system(p, disc);
  const auto tr = dipole_traces(p, disc);
  CHECK((sys.rhs.head(128) - tr.f).norm() == 0.0);
  CHECK((sys.rhs.tail(128) - tr.g).norm() == 0.0);
  Eigen::BDCSVD<CMatrix> svd(sys.matrix);
  const double cond = svd.singularValues()[0] / svd.singularValues()[255];
  CHECK(cond < 1e4);
  // near resonance the condition number grows like 1/delta
  std::vector<double> lc;
  for (double d : {1e-2, 1e-3, 1e-4}) {
    p.delta = d;
    p.scale = 1e-4 * d;
    Eigen::BDCSVD<CMatrix> s(assemble_system(p, disc).matrix);
    lc.push_back(std::log(s.singularValues()[0] / s.singularValues()[255]));
  }
  const double slope = (lc[2] - lc[0]) / (std::log(1e-4) - std::log(1e-2));
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.1));
}

TEST_CASE("direct solve: residual and rotation equivariance") {
  const auto disc = discretize(make_curve(CurveKind::circle, circle(1.0)), 64);
  auto p = ellipse_problem(-3.0, 0.05, 0.05);
  const auto s0 = solve_direct(p, disc);
  CHECK(s0.residual < 1e-12);
  // rotate (a, z) by 8 node spacings
  const int shift = 8;
  const double beta = 2 * oracle::pi * shift / 64;
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(beta, Vec3::UnitZ()).toRotationMatrix();
  p.dipole_a = rot * p.dipole_a;
  p.dipole_z = rot * p.dipole_z;
  const auto s1 = solve_direct(p, disc);
  for (int j = 0; j < 64; ++j) {
    CHECK(std::abs(s1.phi[(j + shift) % 64] - s0.phi[j]) < 1e-10 * s0.phi.cwiseAbs().maxCoeff());
    CHECK(std::abs(s1.psi[(j + shift) % 64] - s0.psi[j]) < 1e-10 * s0.psi.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("3D closed forms") {
  const auto spec = sphere_spectrum(6, 1.0);
  const int n = spec.size();
  const int i1 = sh_index(1, 0);
  {
    // f = 0, g = phi_1 at the resonant eps = -2
    const double delta = 1e-3;
    const auto sol = solve_spectral_3d(CVector::Zero(n), CVector::Unit(n, i1), -2.0, delta, spec);
    const CVector hat = coeffs_hat(sol.phi, spec);
    CHECK(std::abs(hat[i1] - 3.0 * iu / delta) < 1e-9 / delta);
    CHECK(std::abs(hat[i1]) == doctest::Approx(3.0 / delta));
  }
  {
    // lambda(-3) = 1/4; the denominator tends to (-4)(1/6 - 1/4) = 1/3
    const auto sol = solve_spectral_3d(CVector::Zero(n), CVector::Unit(n, i1), -3.0, 1e-9, spec);
    CHECK(std::abs(coeffs_hat(sol.phi, spec)[i1]) == doctest::Approx(3.0).epsilon(1e-6));
  }
  {
    // f = S[phi_2], g = (1/2 + lambda_2) phi_2 cancels
    const int i2 = sh_index(2, 1);
    const auto sol = solve_spectral_3d(CVector::Unit(n, i2), (0.5 + 0.1) * CVector::Unit(n, i2), -2.0, 0.01, spec);
    CHECK(sol.phi.norm() < 1e-15);
  }
  CHECK_THROWS_AS(solve_spectral_3d(CVector::Zero(n), CVector::Unit(n, i1), -2.0, 0.0, spec), NumericalFailure);
}

TEST_CASE("2D closed forms for phi^(0)") {
  const double omega = 0.1, eps = -2.0, delta = 0.01;
  const cplx kc = interior_wavenumber(omega, eps, delta);
  const cplx tau = tau_constant(omega), tau_c = tau_constant(kc);
  {
    const auto disc = discretize(make_curve(CurveKind::circle, circle(1.0)), 64);
    const auto& spec = *disc.spectrum;
    REQUIRE(spec.patched);
    const CVector f = spec.dual.col(0).cast<cplx>();
    const auto sol = solve_spectral_2d(coeffs_check(f, spec), CVector::Zero(64), eps, delta, omega, kc, spec);
    CHECK(std::abs(coeffs_hat(sol.phi, spec)[0] - 1.0 / tau_c) < 1e-10);
  }
  {
    const auto disc = discretize(make_curve(CurveKind::circle, circle(2.0)), 64);
    const auto& spec = *disc.spectrum;
    REQUIRE_FALSE(spec.patched);
    const double c0 = spec.phi0_single;
    CHECK(spec.phi0_mass == doctest::Approx(1.0 / c0));
    const CVector g = spec.modes.col(0).cast<cplx>();
    const auto sol = solve_spectral_2d(CVector::Zero(64), coeffs_hat(g, spec), eps, delta, omega, kc, spec);
    const cplx ref = -(c0 + tau / c0) / (c0 + tau_c / c0);
    CHECK(std::abs(coeffs_hat(sol.phi, spec)[0] - ref) < 1e-10);
    // stays bounded as delta -> 0 at fixed omega
    for (double d : {1e-3, 1e-5, 1e-7}) {
      const auto s = solve_spectral_2d(CVector::Zero(64), coeffs_hat(g, spec), eps, d,  omega,
                                       interior_wavenumber(omega, eps, d), spec);
      CHECK(std::abs(coeffs_hat(s.phi, spec)[0]) < 2.0);
    }
  }
}

TEST_CASE("quasi-static closed forms solve their own system") {
  const auto sp = solve_spectral(sphere_problem(-2.0, 1e-3, 1e-5), sphere_disc(12));
  CHECK(sp.residual < 1e-12);
  const auto ep = solve_spectral(ellipse_problem(-2.0, 1e-3, 1e-3), ellipse_disc(128));
  CHECK(ep.residual < 1e-9);
}

TEST_CASE("direct and spectral solutions agree in the quasi-static regime") {
  for (double delta : {1e-2, 1e-3, 1e-4}) {
    const double s = 0.01 * delta;
    const auto p = sphere_problem(-2.0, delta, s);
    const auto& disc = sphere_disc(16);
    const double diff = solution_difference(solve_direct(p, disc), solve_spectral(p, disc), *disc.spectrum);
    CHECK_MESSAGE(diff <= 10.0 * s / delta, delta, " ", diff);
  }
  for (double delta : {1e-2, 1e-3}) {
    const double s = coupled_scale_2d(0.01 * delta);
    const auto p = ellipse_problem(-2.0, delta, s);
    const auto& disc = ellipse_disc(128);
    const double diff = solution_difference(solve_direct(p, disc), solve_spectral(p, disc), *disc.spectrum);
    CHECK_MESSAGE(diff <= 10.0 * s * s * std::abs(std::log(s)) / delta, delta, " ", diff);
  }
}

TEST_CASE("energy functional") {
  const auto& disc = ellipse_disc(128);
  const auto& spec = *disc.spectrum;
  CHECK(gradient_energy(CVector::Zero(128), 0.3, disc) == 0.0);
  // Laplace: sum over n >= 1 of (1/2 - lambda_n) |phi^(n)|^2
  std::mt19937 rng(5);
  std::normal_distribution<double> nd;
  CVector c = CVector::Zero(128);
  for (int i = 0; i < 12; ++i) c[i] = cplx(nd(rng), nd(rng));
  const CVector phi = synthesize(c, spec);
  double ref = 0.0;
  for (int i = 1; i < 12; ++i) ref += (0.5 - spec.eigenvalues[i]) * std::norm(c[i]);
  CHECK(gradient_energy(phi, 0.0, disc) == doctest::Approx(ref).epsilon(1e-9));
  // phi_1 with a tiny wavenumber
  const CVector p1 = spec.modes.col(1).cast<cplx>();
  const cplx kc = interior_wavenumber(1e-4, -2.0, 1e-3);
  CHECK(gradient_energy(p1, kc, disc) == doctest::Approx(0.5 - spec.eigenvalues[1]).epsilon(1e-6));
  // complex and real wavenumber routes agree in the loss-free limit
  const cplx k0 = interior_wavenumber(0.2, -2.0, 0.0);
  const cplx k1 = interior_wavenumber(0.2, -2.0, 1e-6);
  CHECK(gradient_energy(phi, k0, disc) == doctest::Approx(gradient_energy(phi, k1, disc)).epsilon(1e-5));
  // phi_0 at small omega: gradient of a nearly constant potential
  const CVector p0 = spec.modes.col(0).cast<cplx>();
  for (double w : {0.1, 0.01}) {
    const double e = gradient_energy(p0, w, disc);
    CHECK(e >= -1e-12);
    CHECK(e <= 10.0 * std::pow(w * std::log(w), 2));
  }
}

TEST_CASE("boundary energy identity against interior quadrature") {
  const auto& disc = ellipse_disc(128);
  const auto& spec = *disc.spectrum;
  std::mt19937 rng(9);
  std::normal_distribution<double> nd;
  CVector c = CVector::Zero(128);
  for (int i = 0; i < 10; ++i) c[i] = cplx(nd(rng), nd(rng));
  const CVector phi = synthesize(c, spec);
  for (cplx k : {cplx(0.0), cplx(0.3), interior_wavenumber(0.2, -2.0, 0.01)}) {
    const auto chk = validate_energy(phi, k, disc);
    CHECK_MESSAGE(chk.rel_diff < 0.02, k, " ", chk.boundary, " ", chk.interior + chk.collar);
  }
  const auto cdisc = discretize(make_curve(CurveKind::circle, circle(1.0)), 64);
  CVector cp(64);
  for (int j = 0; j < 64; ++j) cp[j] = std::cos(3.0 * cdisc.nodes.params[j]) + 0.5;
  CHECK(validate_energy(cp, 0.4, cdisc).rel_diff < 0.02);
}

TEST_CASE("3D energy: radial quadrature against the boundary identity") {
  const auto& disc = sphere_disc(8);
  const auto& spec = *disc.spectrum;
  std::mt19937 rng(2);
  std::normal_distribution<double> nd;
  CVector phi(spec.size());
  for (int i = 0; i < spec.size(); ++i) phi[i] = cplx(nd(rng), nd(rng));
  const CVector hat = coeffs_hat(phi, spec);
  double lap = 0.0;
  for (int i = 1; i < spec.size(); ++i) lap += (0.5 - spec.eigenvalues[i]) * std::norm(hat[i]);
  CHECK(gradient_energy(phi, 0.0, disc) == doctest::Approx(lap).epsilon(1e-12));
  const cplx k = interior_wavenumber(0.3, -2.0, 0.05);
  const auto ops = sphere_operators(8, 1.0, k);
  cplx b{0.0};
  for (int n = 0; n <= 8; ++n)
    for (int m = -n; m <= n; ++m) {
      const int i = sh_index(n, m);
      b += std::conj(ops.S[n] * phi[i]) * (ops.Kstar[n] - 0.5) * phi[i];
    }
  const cplx k2 = k * k;
  const double ref = b.real() - k2.real() * b.imag() / k2.imag();
  CHECK(gradient_energy(phi, k, disc) == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("coupling coefficients") {
  // sphere, phi_10 = sqrt(3) Y_10: a . grad S[phi_10] at z = 2 e_3 is 1 / (4 sqrt(4 pi))
  const auto& sd = sphere_disc(12);
  const int i10 = sh_index(1, 0);
  const auto c = coupling_an(Vec3(0, 0, 2), Vec3::UnitZ(), i10, sd, 1e-6);
  const double ref = 1.0 / (4.0 * std::sqrt(4.0 * oracle::pi));
  CHECK(std::abs(c.quasi_static - ref) < 1e-10);
  CHECK(std::abs(c.an - ref) < 1e-8);
  // order-omega^2 correction on the sphere
  std::vector<double> err;
  for (double w : {0.1, 0.05, 0.025}) err.push_back(std::abs(coupling_an(Vec3(0, 0, 2), Vec3::UnitZ(), i10, sd, w).an - c.quasi_static));
  CHECK(std::log(err[0] / err[2]) / std::log(4.0) >= 1.9);

  // ellipse: the +1/6 mode is x-polarized and couples to a = e_1 at z = (3, 0)
  const auto& disc = ellipse_disc(128);
  const auto modes = resonant_modes(*disc.spectrum, -2.0);
  REQUIRE(modes.size() == 1);
  CHECK(disc.spectrum->eigenvalues[modes[0]] == doctest::Approx(1.0 / 6).epsilon(1e-8));
  CHECK(nearest_mode(*disc.spectrum, -2.0) == modes[0]);
  const auto cx = coupling_an(Vec3(3, 0, 0), Vec3::UnitX(), modes[0], disc, 1e-6);
  CHECK(std::abs(cx.an) > 1e-3);
  CHECK(std::abs(cx.an - cx.quasi_static) < 1e-8);
  // that mode is even in x2, so a = e_2 decouples
  const auto cy = coupling_an(Vec3(3, 0, 0), Vec3::UnitY(), modes[0], disc, 1e-6);
  CHECK(std::abs(cy.an) < 1e-10);
  CHECK(std::abs(cy.quasi_static) < 1e-10);
  CHECK(resonant_modes(*disc.spectrum, -3.0).empty());
}
