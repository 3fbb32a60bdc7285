#include "doctest.h"

#include "plasmon/np_spectrum.hpp"
#include "plasmon/sphere.hpp"

#include <cmath>
#include <random>

using namespace plasmon;

namespace {

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

// Elliptic-coordinate separation: the NP eigenvalues of an a x b ellipse are
// 1/2 and +-(1/2) ((a - b) / (a + b))^n for n >= 1.
std::vector<double> ellipse_oracle(double a, double b, int count) {
  std::vector<double> out{0.5};
  const double q = (a - b) / (a + b);
  for (int n = 1; int(out.size()) < count; ++n) {
    const double l = 0.5 * std::pow(q, n);
    out.push_back(-l);
    out.push_back(l);
  }
  out.resize(count);
  return out;
}

CVector random_density(int n, std::mt19937& rng) {
  std::normal_distribution<double> d;
  CVector v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(d(rng), d(rng));
  return v;
}

}  // namespace

TEST_CASE("c0 and the patch on circles") {
  const auto unit = quadrature_nodes(make_curve(CurveKind::circle, circle(1.0)), 64);
  const auto g1 = build_gram(assemble_S(unit), unit);
  CHECK(std::abs(g1.c0) < 1e-12);
  CHECK(g1.patched);
  const auto big = quadrature_nodes(make_curve(CurveKind::circle, circle(2.0)), 64);
  const auto g2 = build_gram(assemble_S(big), big);
  CHECK(g2.c0 == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK_FALSE(g2.patched);
  // S~ sends the normalized equilibrium density to 1 after the patch
  const RVector t = g1.s_tilde * (g1.phi_eq / unit.perimeter());
  CHECK((t - RVector::Ones(64)).norm() < 1e-12);
}

TEST_CASE("Gram matrix is positive definite") {
  const auto e = quadrature_nodes(make_curve(CurveKind::ellipse, ellipse(2.0, 1.0)), 128);
  const auto g = build_gram(assemble_S(e), e);
  CHECK(g.min_eigenvalue > 0.0);
  CHECK((g.gram - g.gram.transpose()).norm() < 1e-14 * g.gram.norm());
  for (double r : {0.5, 1.0, 3.0}) {
    const auto c = quadrature_nodes(make_curve(CurveKind::circle, circle(r)), 32);
    CHECK(build_gram(assemble_S(c), c).min_eigenvalue > 0.0);
  }
}

TEST_CASE("unit circle spectrum") {
  const auto nodes = quadrature_nodes(make_curve(CurveKind::circle, circle(1.0)), 64);
  const auto spec = np_spectrum(nodes);
  CHECK(spec.patched);
  CHECK(spec.eigenvalues[0] == doctest::Approx(0.5).epsilon(1e-12));
  for (int n = 1; n < spec.size(); ++n) CHECK(std::abs(spec.eigenvalues[n]) < 1e-12);
  CHECK(spec.phi0_mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spec.phi0_tilde == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ellipse spectrum matches the separation oracle") {
  const auto nodes = quadrature_nodes(make_curve(CurveKind::ellipse, ellipse(2.0, 1.0)), 256);
  const auto spec = np_spectrum(nodes);
  const auto ref = ellipse_oracle(2.0, 1.0, 17);
  for (int n = 0; n < 17; ++n) CHECK_MESSAGE(std::abs(spec.eigenvalues[n] - ref[n]) < 1e-8, n);
  const auto ids = multiplicity_clusters(spec.eigenvalues);
  CHECK(ids[1] == ids[2]);
  CHECK(ids[2] != ids[3]);
  CHECK(ids[0] != ids[1]);
}

TEST_CASE("spectral invariants on the ellipse and kite") {
  std::mt19937 rng(7);
  for (auto kind : {CurveKind::ellipse, CurveKind::kite}) {
    const auto nodes = quadrature_nodes(make_curve(kind, ellipse(2.0, 1.0)), 128);
    const auto spec = np_spectrum(nodes);
    const int n = spec.size();
    // orthonormality
    const RMatrix gram = spec.modes.transpose() * spec.gram * spec.modes;
    CHECK((gram - RMatrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-8);
    // ordering and containment
    CHECK(std::abs(spec.eigenvalues[0] - 0.5) < 1e-8);
    for (int i = 1; i < n; ++i) {
      CHECK(std::abs(spec.eigenvalues[i]) < 0.5);
      if (i > 1) CHECK(std::abs(spec.eigenvalues[i]) <= std::abs(spec.eigenvalues[i - 1]) + 1e-9);
    }
    // eigen-residual in the H* norm
    const RMatrix kstar = assemble_Kstar(nodes);
    for (int i = 0; i < n; i += 7) {
      const CVector r = (kstar * spec.modes.col(i) - spec.eigenvalues[i] * spec.modes.col(i)).cast<cplx>();
      CHECK(hstar_norm(r, spec) < 1e-7);
    }
    // self-adjointness for random pairs
    const CMatrix kc = kstar.cast<cplx>();
    for (int t = 0; t < 5; ++t) {
      const CVector a = random_density(n, rng), b = random_density(n, rng);
      const cplx lhs = (kc * a).dot(spec.gram * b);
      const cplx rhs = a.dot(spec.gram * (kc * b));
      CHECK(std::abs(lhs - rhs) <= 1e-8 * hstar_norm(a, spec) * hstar_norm(b, spec));
    }
    CHECK(spec.weights.dot(spec.modes.col(0)) > 0.0);
  }
}

TEST_CASE("scale covariance of the spectrum") {
  const auto base = make_curve(CurveKind::ellipse, ellipse(2.0, 1.0));
  const auto s0 = np_spectrum(quadrature_nodes(base, 128));
  for (double s : {0.5, 0.25, 3.0}) {
    const auto s1 = np_spectrum(quadrature_nodes(base.scaled(s), 128));
    for (int i = 0; i < s0.size(); ++i) CHECK(std::abs(s0.eigenvalues[i] - s1.eigenvalues[i]) < 1e-8);
  }
  const auto c1 = np_spectrum(quadrature_nodes(make_curve(CurveKind::circle, circle(1.0)), 32));
  const auto c2 = np_spectrum(quadrature_nodes(make_curve(CurveKind::circle, circle(2.0)), 32));
  for (int i = 0; i < c1.size(); ++i) CHECK(std::abs(c1.eigenvalues[i] - c2.eigenvalues[i]) < 1e-8);
}

TEST_CASE("discrete eigenvalues converge in N") {
  for (auto kind : {CurveKind::ellipse, CurveKind::kite}) {
    const auto c = make_curve(kind, ellipse(2.0, 1.0));
    const auto a = np_spectrum(quadrature_nodes(c, 128));
    const auto b = np_spectrum(quadrature_nodes(c, 256));
    for (int i = 0; i < 8; ++i) CHECK_MESSAGE(std::abs(a.eigenvalues[i] - b.eigenvalues[i]) <= 1e-8, i);
  }
}

TEST_CASE("hat and check coefficients") {
  std::mt19937 rng(11);
  for (auto kind : {CurveKind::circle, CurveKind::ellipse}) {
    const auto nodes = quadrature_nodes(make_curve(kind, ellipse(2.0, 1.0)), 96);
    const auto spec = np_spectrum(nodes);
    const int n = spec.size();
    const CVector e3 = coeffs_hat(spec.modes.col(3).cast<cplx>(), spec);
    CHECK((e3 - CVector::Unit(n, 3)).norm() < 1e-8);
    const CVector lin = coeffs_hat((spec.modes.col(0) + 2.0 * spec.modes.col(1)).cast<cplx>(), spec);
    CHECK(std::abs(lin[0] - 1.0) < 1e-8);
    CHECK(std::abs(lin[1] - 2.0) < 1e-8);
    CHECK(lin.tail(n - 2).norm() < 1e-8);
    const CVector f2 = coeffs_check(spec.dual.col(2).cast<cplx>(), spec);
    CHECK((f2 - CVector::Unit(n, 2)).norm() < 1e-8);
    const CMatrix S = assemble_S(nodes).cast<cplx>();
    for (int t = 0; t < 20; ++t) {
      const CVector phi = random_density(n, rng);
      const CVector hat = coeffs_hat(phi, spec);
      CHECK(std::abs(hat.norm() - hstar_norm(phi, spec)) < 1e-8 * hstar_norm(phi, spec));
      CHECK((synthesize(hat, spec) - phi).norm() < 1e-8 * phi.norm());
      const CVector tilde = spec.s_tilde.cast<cplx>() * phi;
      CHECK(std::abs(h_norm(tilde, spec) - hstar_norm(phi, spec)) < 1e-8 * hstar_norm(phi, spec));
      // mean-zero densities: S maps H0* onto H0 with the same coefficients
      const CVector phi0 = phi - (spec.weights.cast<cplx>().dot(phi) / spec.phi0_mass) * spec.modes.col(0).cast<cplx>();
      const CVector chk = coeffs_check(S * phi0, spec);
      const CVector h0 = coeffs_hat(phi0, spec);
      CHECK((chk - h0).norm() < 1e-8 * h0.norm());
      CHECK(std::abs(chk[0]) < 1e-8 * h0.norm());
    }
  }
}

TEST_CASE("sphere spectrum") {
  const auto spec = sphere_spectrum(6, 1.5);
  CHECK(spec.size() == sh_count(6));
  for (int n = 0; n <= 6; ++n)
    for (int m = -n; m <= n; ++m) CHECK(spec.eigenvalues[sh_index(n, m)] == 1.0 / (2.0 * (2 * n + 1)));
  CHECK(spec.eigenvalues[1] == doctest::Approx(1.0 / 6));
  const auto ids = multiplicity_clusters(spec.eigenvalues);
  CHECK(std::count(ids.begin(), ids.end(), ids[sh_index(2, 0)]) == 5);
  // ||phi_0||_{H*} = 1 forces S[phi_0] <phi_0, 1> = -1
  CHECK(spec.phi0_single * spec.phi0_mass == doctest::Approx(-1.0));
  std::mt19937 rng(3);
  const CVector d = random_density(spec.size(), rng);
  CHECK((synthesize(coeffs_hat(d, spec), spec) - d).norm() < 1e-13 * d.norm());
  // f = S[phi] gives f^v = phi^
  const auto ops = sphere_operators(6, 1.5, 0.0);
  CVector f(d.size());
  for (int n = 0; n <= 6; ++n)
    for (int m = -n; m <= n; ++m) f[sh_index(n, m)] = ops.S[n] * d[sh_index(n, m)];
  CHECK((coeffs_check(f, spec) - coeffs_hat(d, spec)).norm() < 1e-13 * d.norm());
  CHECK_THROWS(sphere_spectrum(3, 1.0));
}
