#include "plasmon/errors.hpp"
#include "plasmon/harness.hpp"

#include <cmath>
#include <random>

namespace plasmon {

namespace {

using Checks = std::vector<CheckResult>;

void add(Checks& out, const std::string& suite, const std::string& name, double error, double tol) {
  out.push_back({suite, name, error, tol, std::isfinite(error) && error <= tol});
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Wronskians and closed forms; none of them reuse the evaluation path under test.
void specfun_suite(Checks& out) {
  const std::string s = "specfun";
  for (double z : {0.05, 0.7, 3.0, 11.5, 12.5, 25.0}) {
    const cplx w = bessel_j(1, z) * bessel_y(0, z) - bessel_j(0, z) * bessel_y(1, z);
    add(out, s, "cylindrical Wronskian at z=" + std::to_string(z), rel(w, 2.0 / (kPi * z)), 1e-10);
  }
  add(out, s, "hankel continuity across the crossover",
      rel(hankel1(0, kHankelCrossover * (1 - 1e-12)), hankel1(0, kHankelCrossover * (1 + 1e-12))), 1e-10);
  for (double z : {0.3, 2.0, 8.0}) {
    const cplx iu{0.0, 1.0};
    add(out, s, "j0 closed form at z=" + std::to_string(z), rel(spherical_j(0, z), std::sin(z) / z), 1e-12);
    add(out, s, "j1 closed form at z=" + std::to_string(z),
        rel(spherical_j(1, z), std::sin(z) / (z * z) - std::cos(z) / z), 1e-10);
    add(out, s, "h0 closed form at z=" + std::to_string(z), rel(spherical_h(0, z), -iu * std::exp(iu * z) / z), 1e-12);
    for (int n = 1; n <= 8; ++n) {
      const cplx y = (spherical_h(n, z) - spherical_j(n, z)) / iu;
      const cplx ym = (spherical_h(n - 1, z) - spherical_j(n - 1, z)) / iu;
      const cplx w = spherical_j(n, z) * ym - spherical_j(n - 1, z) * y;
      add(out, s, "spherical Wronskian n=" + std::to_string(n) + " z=" + std::to_string(z), rel(w, 1.0 / (z * z)),
          1e-10);
    }
  }
}

void spectrum_suite(Checks& out) {
  const std::string s = "spectrum";
  CurveParams p;
  p.semi_a = 2.0;
  p.semi_b = 1.0;
  const auto curve = make_curve(CurveKind::ellipse, p);
  const auto a = np_spectrum(quadrature_nodes(curve, 256));
  const auto b = np_spectrum(quadrature_nodes(curve, 512));
  add(out, s, "lambda_0 = 1/2", std::abs(a.eigenvalues[0] - 0.5), 1e-8);
  for (int i = 1; i <= 8; ++i) {
    const int n = (i + 1) / 2;
    const double ref = (i % 2 == 1 ? -0.5 : 0.5) * std::pow(1.0 / 3.0, n);
    add(out, s, "ellipse lambda_" + std::to_string(i) + " vs +-(1/2)(1/3)^n", std::abs(a.eigenvalues[i] - ref), 1e-8);
    add(out, s, "ellipse lambda_" + std::to_string(i) + " N=256 vs N=512",
        std::abs(a.eigenvalues[i] - b.eigenvalues[i]), 1e-8);
  }
}

void sphere_suite(Checks& out) {
  const std::string s = "sphere";
  const auto spec = sphere_spectrum(8, 1.0);
  double err = 0.0;
  for (int n = 0; n <= 8; ++n)
    for (int m = -n; m <= n; ++m) err = std::max(err, std::abs(spec.eigenvalues[sh_index(n, m)] - 1.0 / (2.0 * (2 * n + 1))));
  add(out, s, "diagonal eigenvalues 1/(2(2n+1))", err, 0.0);
  const Vec3 x = Vec3(0.3, -0.5, 0.81).normalized();
  for (cplx k : {cplx(0.0), cplx(0.4), cplx(0.4, -0.01)}) {
    const auto ops = sphere_operators(8, 1.0, k);
    for (auto [n, m] : {std::pair{0, 0}, std::pair{1, 0}, std::pair{2, 1}}) {
      const auto q = surface_quadrature_apply(n, m, 1.0, k, x);
      const double y = real_sph_harm(n, m, x);
      const std::string tag = "(" + std::to_string(n) + "," + std::to_string(m) + ") k=" + std::to_string(k.real());
      add(out, s, "surface quadrature S " + tag, std::abs(q.S - ops.S[n] * y), 1e-8);
      add(out, s, "surface quadrature K* " + tag, std::abs(q.Kstar - ops.Kstar[n] * y), 1e-8);
    }
  }
}

// Unit circle: S[e^{in t}] = -e^{in t}/(2|n|), K* = 1/2 on constants and 0
// otherwise, S^k[e^{in t}] = -(i pi / 2) J_n(k) H_n(k) e^{in t}.
void layer_suite(Checks& out) {
  const std::string s = "layer";
  CurveParams p;
  const int N = 64;
  const auto nodes = quadrature_nodes(make_curve(CurveKind::circle, p), N);
  const RMatrix S = assemble_S(nodes), K = assemble_Kstar(nodes);
  for (int n = 0; n <= 8; ++n) {
    RVector c(N);
    for (int j = 0; j < N; ++j) c[j] = std::cos(n * nodes.params[j]);
    const double sn = n == 0 ? 0.0 : -1.0 / (2.0 * n);
    add(out, s, "circle S diagonal n=" + std::to_string(n), (S * c - sn * c).cwiseAbs().maxCoeff(), 1e-12);
    add(out, s, "circle K* diagonal n=" + std::to_string(n),
        (K * c - (n == 0 ? 0.5 : 0.0) * c).cwiseAbs().maxCoeff(), 1e-12);
  }
  const cplx iu{0.0, 1.0};
  for (cplx k : {cplx(0.7), cplx(0.3, -0.02)}) {
    const auto hp = assemble_helmholtz(nodes, k);
    for (int n : {0, 1}) {
      CVector c(N);
      for (int j = 0; j < N; ++j) c[j] = std::cos(n * nodes.params[j]);
      const cplx ref = -(iu * kPi / 2.0) * bessel_j(n, k) * hankel1(n, k);
      add(out, s, "circle S^k diagonal n=" + std::to_string(n) + " k=" + std::to_string(k.real()),
          (hp.S * c - ref * c).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

void c0_suite(Checks& out) {
  const std::string s = "c0";
  CurveParams unit;
  const auto n1 = quadrature_nodes(make_curve(CurveKind::circle, unit), 64);
  const auto g1 = build_gram(assemble_S(n1), n1);
  add(out, s, "unit circle takes the patched branch", g1.patched ? 0.0 : 1.0, 0.0);
  CurveParams two;
  two.radius = 2.0;
  const auto n2 = quadrature_nodes(make_curve(CurveKind::circle, two), 64);
  const auto g2 = build_gram(assemble_S(n2), n2);
  add(out, s, "radius-2 circle c0 = 2 ln 2", std::abs(g2.c0 - 2.0 * std::log(2.0)), 1e-8);
  add(out, s, "radius-2 circle is unpatched", g2.patched ? 1.0 : 0.0, 0.0);
}

void energy_suite(Checks& out) {
  const std::string s = "energy";
  CurveParams p;
  p.semi_a = 2.0;
  p.semi_b = 1.0;
  for (auto kind : {CurveKind::ellipse, CurveKind::circle}) {
    const auto disc = discretize(make_curve(kind, p), 128);
    const auto& spec = *disc.spectrum;
    std::mt19937 rng(17);
    std::normal_distribution<double> nd;
    CVector phi;
    if (kind == CurveKind::ellipse) {
      CVector c = CVector::Zero(spec.size());
      for (int i = 0; i < 10; ++i) c[i] = cplx(nd(rng), nd(rng));
      phi = synthesize(c, spec);
    } else {
      // the circle's eigenspaces are degenerate, so use a smooth trigonometric density
      phi.resize(disc.size());
      for (int j = 0; j < disc.size(); ++j)
        phi[j] = 0.5 + std::cos(3.0 * disc.nodes.params[j]) + cplx(0.0, 0.3) * std::sin(disc.nodes.params[j]);
    }
    for (cplx k : {cplx(0.0), cplx(0.3), interior_wavenumber(0.2, -2.0, 0.01)}) {
      double err;
      try {
        err = validate_energy(phi, k, disc).rel_diff;
      } catch (const NumericalFailure&) {
        err = std::numeric_limits<double>::infinity();
      }
      add(out, s, to_string(kind) + " boundary identity vs interior quadrature k=(" + std::to_string(k.real()) + "," +
                      std::to_string(k.imag()) + ")",
          err, 0.02);
    }
  }
}

void transmission_suite(Checks& out) {
  const std::string s = "transmission";
  const cplx iu{0.0, 1.0};
  const auto spec = sphere_spectrum(6, 1.0);
  const int n = spec.size(), i1 = sh_index(1, 0);
  const double delta = 1e-3;
  const auto sol = solve_spectral_3d(CVector::Zero(n), CVector::Unit(n, i1), -2.0, delta, spec);
  add(out, s, "sphere f=0 g=phi_1 eps=-2: phi^(1) = 3i/delta", rel(coeffs_hat(sol.phi, spec)[i1], 3.0 * iu / delta), 1e-10);

  CurveParams unit;
  const auto disc = discretize(make_curve(CurveKind::circle, unit), 64);
  const auto& cs = *disc.spectrum;
  const double omega = 0.1;
  const cplx kc = interior_wavenumber(omega, -2.0, 0.01);
  const auto s2 = solve_spectral_2d(coeffs_check(cs.dual.col(0).cast<cplx>(), cs), CVector::Zero(64), -2.0, 0.01,
                                    omega, kc, cs);
  add(out, s, "unit circle patched phi^(0) = 1/tau(k_c)", rel(coeffs_hat(s2.phi, cs)[0], 1.0 / tau_constant(kc)), 1e-10);

  CurveParams p;
  p.semi_a = 2.0;
  p.semi_b = 1.0;
  const auto ed = discretize(make_curve(CurveKind::ellipse, p), 128);
  TransmissionProblem tp;
  tp.delta = 10.0;
  tp.scale = 0.01;
  const auto sys = assemble_system(tp, ed);
  add(out, s, "lossy ellipse system condition number", sys.condition, 1e4);
  const auto sd = solve_direct(tp, ed);
  add(out, s, "direct solve residual", sd.residual, kDirectResidualTol);
}

}  // namespace

std::vector<std::string> validation_suites() {
  return {"specfun", "spectrum", "sphere", "layer", "c0", "energy", "transmission"};
}

std::vector<CheckResult> validate_suite(const std::string& suite) {
  Checks out;
  const bool all = suite == "all";
  bool known = all;
  auto run = [&](const char* name, void (*fn)(Checks&)) {
    if (all || suite == name) {
      known = true;
      fn(out);
    }
  };
  run("specfun", specfun_suite);
  run("spectrum", spectrum_suite);
  run("sphere", sphere_suite);
  run("layer", layer_suite);
  run("c0", c0_suite);
  run("energy", energy_suite);
  run("transmission", transmission_suite);
  if (!known) throw ConfigError("unknown validation suite '" + suite + "'");
  return out;
}

nlohmann::json validation_report(const std::vector<CheckResult>& checks) {
  nlohmann::json list = nlohmann::json::array();
  int passed = 0;
  for (const auto& c : checks) {
    list.push_back({{"suite", c.suite}, {"name", c.name}, {"error", c.error}, {"tolerance", c.tolerance}, {"pass", c.pass}});
    passed += c.pass ? 1 : 0;
  }
  return {{"checks", list},
          {"passed", passed},
          {"failed", int(checks.size()) - passed},
          {"all_pass", passed == int(checks.size())}};
}

}  // namespace plasmon
