#include "plasmon/transmission.hpp"

#include "plasmon/errors.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace plasmon {

namespace {

constexpr cplx kI{0.0, 1.0};

std::string key_of(const std::string& id, const char* tag, cplx k) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "|%s|%.17g|%.17g", tag, k.real(), k.imag());
  return id + buf;
}

Vec2 planar(const Vec3& v) { return Vec2(v.x(), v.y()); }

}  // namespace

ScaledParameters scaled_parameters(const TransmissionProblem& p) {
  if (p.dimension != 2 && p.dimension != 3) throw ConfigError("dimension must be 2 or 3");
  if (!(p.scale > 0.0)) throw ConfigError("scale s must be positive");
  if (!(p.delta >= 0.0)) throw ConfigError("loss delta must be non-negative");
  if (!(p.eps_c < 0.0)) throw ConfigError("eps_c must be negative");
  if (!(p.eps_m > 0.0)) throw ConfigError("eps_m must be positive");
  if (!(p.omega0 > 0.0)) throw ConfigError("omega0 must be positive");
  Vec3 a = p.dipole_a;
  if (p.dimension == 2) a.z() = 0.0;
  if (std::abs(a.norm() - 1.0) > 1e-12) throw ConfigError("dipole direction must be a unit vector");
  const double omega = p.scale * p.omega0;
  ScaledParameters out;
  out.eps = p.eps_c / p.eps_m;
  out.delta = p.delta / p.eps_m;
  out.omega = omega / std::sqrt(p.eps_m);
  out.source_factor = 1.0 / p.eps_m;
  if (omega > kOmegaCeiling || out.omega > kOmegaCeiling) throw ConfigError("omega = s omega0 exceeds 0.5");
  out.kc = interior_wavenumber(out.omega, out.eps, out.delta);
  return out;
}

int Discretization::size() const { return dimension == 2 ? nodes.count : sh_count(resolution); }

double Discretization::sphere_radius() const { return curve->sphere_radius(); }

Discretization discretize(const BoundaryCurve& curve, int resolution) {
  Discretization d;
  d.dimension = curve.dimension();
  d.curve = std::make_shared<const BoundaryCurve>(curve);
  d.resolution = resolution;
  d.id = curve.id() + "#" + std::to_string(resolution);
  if (d.dimension == 2) {
    d.nodes = quadrature_nodes(curve, resolution);
    d.S = assemble_S(d.nodes);
    d.Kstar = assemble_Kstar(d.nodes);
    d.spectrum = std::make_shared<const NPSpectrum>(np_eigendecomposition(d.Kstar, build_gram(d.S, d.nodes), d.nodes));
  } else {
    d.spectrum = std::make_shared<const NPSpectrum>(sphere_spectrum(resolution, curve.sphere_radius()));
    d.quad = sphere_quadrature(2 * resolution + 2, 4 * resolution + 4);
    d.harmonics.resize(d.quad.points.size(), sh_count(resolution));
    for (size_t q = 0; q < d.quad.points.size(); ++q)
      for (int n = 0; n <= resolution; ++n)
        for (int m = -n; m <= n; ++m) d.harmonics(q, sh_index(n, m)) = real_sph_harm(n, m, d.quad.points[q]);
  }
  return d;
}

std::shared_ptr<const HelmholtzPair> OperatorCache::lookup(const std::string& key,
                                                           const std::function<HelmholtzPair()>& build) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
  }
  auto value = std::make_shared<const HelmholtzPair>(build());
  std::lock_guard<std::mutex> lock(mutex_);
  // a concurrent builder may have won; keep the first insert
  return entries_.emplace(key, value).first->second;
}

std::shared_ptr<const HelmholtzPair> OperatorCache::helmholtz(const Discretization& disc, cplx k) {
  return lookup(key_of(disc.id, "hk", k), [&] { return assemble_helmholtz(disc.nodes, k); });
}

std::shared_ptr<const HelmholtzPair> OperatorCache::dk(const Discretization& disc, cplx k) {
  return lookup(key_of(disc.id, "dk", k), [&] { return assemble_dk(disc.nodes, k); });
}

size_t OperatorCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

namespace {

std::shared_ptr<const HelmholtzPair> helmholtz_for(const Discretization& disc, cplx k, OperatorCache* cache) {
  if (cache) return cache->helmholtz(disc, k);
  return std::make_shared<const HelmholtzPair>(assemble_helmholtz(disc.nodes, k));
}

}  // namespace

DipoleValue dipole_field(const Vec3& x, const Vec3& z, const Vec3& a, cplx omega, int dim) {
  Vec3 d = x - z;
  Vec3 av = a;
  if (dim == 2) {
    d.z() = 0.0;
    av.z() = 0.0;
  }
  const double r = d.norm();
  if (r == 0.0) throw std::domain_error("dipole_field: evaluation at the source");
  const Vec3 rh = d / r;
  const RadialGreen g = helmholtz_green_radial(r, omega, dim);
  const double ar = av.dot(rh);
  DipoleValue out;
  out.value = -g.d1 * ar;
  // -Hess(Gamma) a with Hess = G'' rr^T + (G'/r)(I - rr^T)
  out.gradient = -(g.d2 * ar * rh.cast<cplx>() + (g.d1 / r) * (av - ar * rh).cast<cplx>());
  return out;
}

DipoleTraces dipole_traces(const Vec3& z, const Vec3& a, double omega, double factor, const Discretization& disc) {
  DipoleTraces out;
  if (disc.dimension == 2) {
    const Vec2 z2 = planar(z);
    if (contains(*disc.curve, z2)) throw ConfigError("dipole location lies inside the inclusion");
    if (distance_to_curve(*disc.curve, z2) < evaluation_buffer(disc.nodes))
      throw ConfigError("dipole location is too close to the boundary");
    const int n = disc.nodes.count;
    out.f.resize(n);
    out.g.resize(n);
    for (int j = 0; j < n; ++j) {
      const Vec2& p = disc.nodes.points[j];
      const Vec2& nu = disc.nodes.normals[j];
      const auto v = dipole_field(Vec3(p.x(), p.y(), 0.0), z, a, omega, 2);
      out.f[j] = factor * v.value;
      out.g[j] = factor * (v.gradient[0] * nu.x() + v.gradient[1] * nu.y());
    }
    return out;
  }
  const double R = disc.sphere_radius();
  if (z.norm() < 1.05 * R) throw ConfigError("dipole location must satisfy |z| >= 1.05 R");
  const size_t nq = disc.quad.points.size();
  CVector fs(nq), gs(nq);
  for (size_t q = 0; q < nq; ++q) {
    const Vec3& u = disc.quad.points[q];
    const auto v = dipole_field(R * u, z, a, omega, 3);
    fs[q] = factor * disc.quad.weights[q] * v.value;
    gs[q] = factor * disc.quad.weights[q] * (v.gradient[0] * u.x() + v.gradient[1] * u.y() + v.gradient[2] * u.z());
  }
  out.f = disc.harmonics.transpose().cast<cplx>() * fs;
  out.g = disc.harmonics.transpose().cast<cplx>() * gs;
  const double big = std::max(out.f.cwiseAbs().maxCoeff(), 1e-300);
  out.tail = harmonic_tail(disc.resolution, out.f) / big;
  return out;
}

DipoleTraces dipole_traces(const TransmissionProblem& problem, const Discretization& disc) {
  if (problem.dimension != disc.dimension) throw ConfigError("problem dimension does not match the geometry");
  const auto p = scaled_parameters(problem);
  return dipole_traces(problem.dipole_z, problem.dipole_a, p.omega, p.source_factor, disc);
}

namespace {

struct ModeBlock {
  cplx a11, a12, a21, a22;
};

// 2x2 block of the 3D system for degree n.
ModeBlock sphere_block(const SphereOperators& kc, const SphereOperators& w, int n, cplx coef) {
  return {kc.S[n], -w.S[n], coef * (-0.5 + kc.Kstar[n]), -(0.5 + w.Kstar[n])};
}

LinearSystem build_system(const TransmissionProblem& problem, const Discretization& disc, OperatorCache* cache) {
  const auto p = scaled_parameters(problem);
  const auto tr = dipole_traces(problem, disc);
  const cplx coef{p.eps, p.delta};
  const int n = disc.size();
  LinearSystem sys;
  sys.matrix = CMatrix::Zero(2 * n, 2 * n);
  sys.rhs.resize(2 * n);
  sys.rhs << tr.f, tr.g;
  if (disc.dimension == 2) {
    const auto in = helmholtz_for(disc, p.kc, cache);
    const auto out = helmholtz_for(disc, p.omega, cache);
    const CMatrix I = CMatrix::Identity(n, n);
    sys.matrix.topLeftCorner(n, n) = in->S;
    sys.matrix.topRightCorner(n, n) = -out->S;
    sys.matrix.bottomLeftCorner(n, n) = coef * (in->Kstar - 0.5 * I);
    sys.matrix.bottomRightCorner(n, n) = -(out->Kstar + 0.5 * I);
  } else {
    const double R = disc.sphere_radius();
    const auto kc = sphere_operators(disc.resolution, R, p.kc);
    const auto w = sphere_operators(disc.resolution, R, p.omega);
    for (int deg = 0; deg <= disc.resolution; ++deg) {
      const auto b = sphere_block(kc, w, deg, coef);
      for (int m = -deg; m <= deg; ++m) {
        const int i = sh_index(deg, m);
        sys.matrix(i, i) = b.a11;
        sys.matrix(i, n + i) = b.a12;
        sys.matrix(n + i, i) = b.a21;
        sys.matrix(n + i, n + i) = b.a22;
      }
    }
  }
  return sys;
}

void check_finite(const CVector& v, const char* what) {
  if (!v.allFinite()) throw NumericalFailure(std::string(what) + " produced non-finite values");
}

}  // namespace

LinearSystem assemble_system(const TransmissionProblem& problem, const Discretization& disc, OperatorCache* cache) {
  LinearSystem sys = build_system(problem, disc, cache);
  Eigen::PartialPivLU<CMatrix> lu(sys.matrix);
  const double rc = lu.rcond();
  sys.condition = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  if (!(rc > 1e-15)) throw NumericalFailure("transmission system is singular to working precision (condition " +
                                            std::to_string(sys.condition) + ")");
  return sys;
}

SolutionPair solve_direct(const TransmissionProblem& problem, const Discretization& disc, OperatorCache* cache) {
  const int n = disc.size();
  SolutionPair sol;
  sol.solver = "direct";
  if (disc.dimension == 3) {
    // block diagonal: one 2x2 solve per harmonic
    const auto p = scaled_parameters(problem);
    const auto tr = dipole_traces(problem, disc);
    const double R = disc.sphere_radius();
    const auto kc = sphere_operators(disc.resolution, R, p.kc);
    const auto w = sphere_operators(disc.resolution, R, p.omega);
    const cplx coef{p.eps, p.delta};
    sol.phi.resize(n);
    sol.psi.resize(n);
    double res2 = 0.0;
    for (int deg = 0; deg <= disc.resolution; ++deg) {
      const auto b = sphere_block(kc, w, deg, coef);
      const cplx det = b.a11 * b.a22 - b.a12 * b.a21;
      if (std::abs(det) < 1e-300) throw NumericalFailure("singular sphere mode block at degree " + std::to_string(deg));
      for (int m = -deg; m <= deg; ++m) {
        const int i = sh_index(deg, m);
        const cplx x = (b.a22 * tr.f[i] - b.a12 * tr.g[i]) / det;
        const cplx y = (b.a11 * tr.g[i] - b.a21 * tr.f[i]) / det;
        sol.phi[i] = x;
        sol.psi[i] = y;
        res2 += std::norm(b.a11 * x + b.a12 * y - tr.f[i]) + std::norm(b.a21 * x + b.a22 * y - tr.g[i]);
      }
    }
    const double rhs = std::sqrt(tr.f.squaredNorm() + tr.g.squaredNorm());
    sol.residual = std::sqrt(res2) / std::max(rhs, 1e-300);
  } else {
    const LinearSystem sys = build_system(problem, disc, cache);
    Eigen::PartialPivLU<CMatrix> lu(sys.matrix);
    const CVector x = lu.solve(sys.rhs);
    check_finite(x, "direct solve");
    sol.phi = x.head(n);
    sol.psi = x.tail(n);
    sol.residual = (sys.matrix * x - sys.rhs).norm() / std::max(sys.rhs.norm(), 1e-300);
  }
  check_finite(sol.phi, "direct solve");
  if (!(sol.residual <= kDirectResidualTol))
    throw NumericalFailure("direct solve residual " + std::to_string(sol.residual) + " above tolerance");
  return sol;
}

namespace {

cplx guarded(cplx num, cplx den, int n) {
  if (std::abs(den) < kDenominatorGuard)
    throw NumericalFailure("exact resonance: vanishing denominator at mode " + std::to_string(n) +
                           " (only possible with delta = 0)");
  return num / den;
}

cplx mode_denominator(double lambda_n, double eps, double delta) {
  return (eps - 1.0) * (lambda_n - plasmon_lambda(eps)) + kI * delta * (lambda_n - 0.5);
}

}  // namespace

SolutionPair solve_spectral_3d(const CVector& fcheck, const CVector& ghat, double eps, double delta,
                               const NPSpectrum& spec) {
  const int n = spec.size();
  CVector phat(n), qhat(n);
  for (int i = 0; i < n; ++i) {
    const double l = spec.eigenvalues[i];
    phat[i] = guarded(ghat[i] - (0.5 + l) * fcheck[i], mode_denominator(l, eps, delta), i);
    qhat[i] = phat[i] - fcheck[i];
  }
  SolutionPair sol;
  sol.solver = "spectral";
  sol.phi = synthesize(phat, spec);
  sol.psi = synthesize(qhat, spec);
  return sol;
}

SolutionPair solve_spectral_2d(const CVector& fcheck, const CVector& ghat, double eps, double delta, double omega,
                               cplx kc, const NPSpectrum& spec) {
  const int n = spec.size();
  CVector phat(n), qhat(n);
  for (int i = 1; i < n; ++i) {
    const double l = spec.eigenvalues[i];
    phat[i] = guarded(ghat[i] - (0.5 + l) * fcheck[i], mode_denominator(l, eps, delta), i);
    qhat[i] = phat[i] - fcheck[i];
  }
  const cplx tau = tau_constant(omega);
  const cplx tau_c = tau_constant(kc);
  const double c0 = spec.phi0_single, m0 = spec.phi0_mass;
  phat[0] = guarded(spec.phi0_tilde * fcheck[0] - ghat[0] * (c0 + tau * m0), c0 + tau_c * m0, 0);
  qhat[0] = -ghat[0];
  SolutionPair sol;
  sol.solver = "spectral";
  sol.phi = synthesize(phat, spec);
  sol.psi = synthesize(qhat, spec);
  return sol;
}

SolutionPair solve_spectral(const TransmissionProblem& problem, const Discretization& disc) {
  const auto p = scaled_parameters(problem);
  const auto tr = dipole_traces(problem, disc);
  const auto& spec = *disc.spectrum;
  const CVector fcheck = coeffs_check(tr.f, spec);
  const CVector ghat = coeffs_hat(tr.g, spec);
  const cplx coef{p.eps, p.delta};
  SolutionPair sol;
  CVector r1, r2;
  if (disc.dimension == 3) {
    sol = solve_spectral_3d(fcheck, ghat, p.eps, p.delta, spec);
    const auto lap = sphere_operators(disc.resolution, disc.sphere_radius(), 0.0);
    const int n = disc.size();
    r1.resize(n);
    r2.resize(n);
    for (int deg = 0; deg <= disc.resolution; ++deg)
      for (int m = -deg; m <= deg; ++m) {
        const int i = sh_index(deg, m);
        r1[i] = lap.S[deg] * (sol.phi[i] - sol.psi[i]) - tr.f[i];
        r2[i] = coef * (-0.5 + lap.Kstar[deg]) * sol.phi[i] - (0.5 + lap.Kstar[deg]) * sol.psi[i] - tr.g[i];
      }
  } else {
    sol = solve_spectral_2d(fcheck, ghat, p.eps, p.delta, p.omega, p.kc, spec);
    // residual of the quasi-static operator with the logarithmic rank-one terms
    const CMatrix S = disc.S.cast<cplx>();
    const CMatrix K = disc.Kstar.cast<cplx>();
    const CVector w = disc.nodes.weight_vector().cast<cplx>();
    const cplx mphi = w.transpose() * sol.phi, mpsi = w.transpose() * sol.psi;
    const CVector ones = CVector::Ones(disc.size());
    r1 = S * (sol.phi - sol.psi) + (tau_constant(p.kc) * mphi - tau_constant(p.omega) * mpsi) * ones - tr.f;
    r2 = coef * (K * sol.phi - 0.5 * sol.phi) - (K * sol.psi + 0.5 * sol.psi) - tr.g;
  }
  check_finite(sol.phi, "spectral solve");
  const double rhs = std::sqrt(tr.f.squaredNorm() + tr.g.squaredNorm());
  sol.residual = std::sqrt(r1.squaredNorm() + r2.squaredNorm()) / std::max(rhs, 1e-300);
  return sol;
}

double solution_difference(const SolutionPair& a, const SolutionPair& b, const NPSpectrum& spec) {
  const double dphi = hstar_norm(a.phi - b.phi, spec), dpsi = hstar_norm(a.psi - b.psi, spec);
  const double nphi = hstar_norm(b.phi, spec), npsi = hstar_norm(b.psi, spec);
  return std::sqrt(dphi * dphi + dpsi * dpsi) / std::max(std::sqrt(nphi * nphi + npsi * npsi), 1e-300);
}

namespace {

double sphere_energy(const CVector& phi, cplx k, const Discretization& disc) {
  const int L = disc.resolution;
  const double R = disc.sphere_radius();
  const auto ops = sphere_operators(L, R, k);
  std::vector<double> x, w;
  gauss_legendre(L + 32, x, w);
  // per degree: int_0^R (|g'|^2 r^2 + n(n+1)|g|^2) dr with g(r) = (r/R)^n jhat_n(kr)
  std::vector<double> radial(L + 1, 0.0);
  const auto edge = scaled_spherical_bessel(L, k * R);
  for (size_t q = 0; q < x.size(); ++q) {
    const double r = 0.5 * R * (x[q] + 1.0);
    const double wr = 0.5 * R * w[q];
    const auto sb = scaled_spherical_bessel(L, k * r);
    double pw = 1.0;
    for (int n = 0; n <= L; ++n) {
      const cplx g = pw * sb.jhat[n] / edge.jhat[n];
      const cplx dg = (n > 0 ? double(n) / r * g : cplx{0.0}) -
                      pw * k * k * r * sb.jhat[n + 1] / ((2.0 * n + 3.0) * edge.jhat[n]);
      radial[n] += wr * (std::norm(dg) * r * r + n * (n + 1.0) * std::norm(g));
      pw *= r / R;
    }
  }
  double e = 0.0;
  for (int n = 0; n <= L; ++n)
    for (int m = -n; m <= n; ++m) e += std::norm(ops.S[n] * phi[sh_index(n, m)]) * radial[n];
  return e;
}

}  // namespace

double gradient_energy(const CVector& phi, cplx k, const Discretization& disc, OperatorCache* cache) {
  if (phi.size() != disc.size()) throw std::invalid_argument("gradient_energy: density size mismatch");
  if (disc.dimension == 3) return sphere_energy(phi, k, disc);
  const CVector w = disc.nodes.weight_vector().cast<cplx>();
  CVector u, du;
  std::shared_ptr<const HelmholtzPair> pair;
  if (k == cplx{0.0}) {
    u = disc.S.cast<cplx>() * phi;
    du = disc.Kstar.cast<cplx>() * phi - 0.5 * phi;
  } else {
    pair = helmholtz_for(disc, k, cache);
    u = pair->S * phi;
    du = pair->Kstar * phi - 0.5 * phi;
  }
  const cplx b = (w.array() * u.conjugate().array() * du.array()).sum();
  if (k == cplx{0.0}) return b.real();
  const cplx k2 = k * k;
  double volume;
  if (std::abs(k2.imag()) > 1e-10 * std::abs(k2)) {
    volume = -b.imag() / k2.imag();
  } else {
    // v = d/dk S^k[phi] solves (Delta + k^2) v = -2k u, so by Green's second
    // identity int |u|^2 = -(1/2k) int (conj(u) d_nu v - v conj(d_nu u))
    const auto d = cache ? cache->dk(disc, k) : std::make_shared<const HelmholtzPair>(assemble_dk(disc.nodes, k));
    const CVector v = d->S * phi, dv = d->Kstar * phi;
    const cplx s = (w.array() * (u.conjugate().array() * dv.array() - v.array() * du.conjugate().array())).sum();
    volume = (-s / (2.0 * k)).real();
  }
  return b.real() + k2.real() * volume;
}

EnergyCheck validate_energy(const CVector& phi, cplx k, const Discretization& disc, double rho_max,
                            OperatorCache* cache) {
  if (disc.dimension != 2) throw std::invalid_argument("validate_energy: interior quadrature is planar only");
  if (!(rho_max > 0.5 && rho_max < 1.0)) throw std::invalid_argument("validate_energy: rho_max must lie in (0.5, 1)");
  const BoundaryCurve& curve = *disc.curve;
  const int nang = 2 * disc.nodes.count;
  const double rho2 = rho_max - 0.02;
  const auto inner = polar_interior_points(curve, 40, nang, rho_max);

  // upsample until the outermost ring clears the evaluation buffer
  int factor = 1;
  NodeSet up = disc.nodes;
  while (evaluation_buffer(up) > inner.buffer) {
    factor *= 2;
    if (factor > 64) throw NumericalFailure("validate_energy: cannot resolve the near-boundary ring");
    up = quadrature_nodes(curve, factor * disc.nodes.count);
  }
  const CVector phi_up = trig_upsample(phi, factor);

  std::vector<Vec2> pts = inner.points;
  for (double rho : {rho_max, rho2})
    for (int j = 0; j < nang; ++j) pts.push_back(rho * curve.point(2.0 * kPi * j / nang));
  const auto pot = eval_potential(up, phi_up, k, pts, true);
  const size_t ni = inner.points.size();

  EnergyCheck out;
  for (size_t q = 0; q < ni; ++q) out.interior += inner.weights[q] * pot.gradient[q].squaredNorm();
  // collar rho in [rho_max, 1]: linear extrapolation in rho of |grad u|^2
  const double r1 = rho_max;
  for (int j = 0; j < nang; ++j) {
    const double t = 2.0 * kPi * j / nang;
    const Vec2 x = curve.point(t), dx = curve.d1(t);
    const double jac = x.x() * dx.y() - x.y() * dx.x();
    const double f1 = pot.gradient[ni + j].squaredNorm();
    const double f2 = pot.gradient[ni + nang + j].squaredNorm();
    const double slope = (f1 - f2) / (r1 - rho2);
    const double integral = f1 * (1.0 - r1 * r1) / 2.0 + slope * ((1.0 - r1 * r1 * r1) / 3.0 - r1 * (1.0 - r1 * r1) / 2.0);
    out.collar += integral * jac * (2.0 * kPi / nang);
  }
  out.boundary = gradient_energy(phi, k, disc, cache);
  const double truth = out.interior + out.collar;
  out.rel_diff = std::abs(out.boundary - truth) / std::max(std::abs(truth), 1e-300);
  if (out.rel_diff > 0.05)
    throw NumericalFailure("boundary energy identity disagrees with interior quadrature by " +
                           std::to_string(100.0 * out.rel_diff) + "%");
  return out;
}

namespace {

// S[phi_i](x) outside the sphere for the normalized basis phi_nm.
double sphere_exterior_single(int i, const Vec3& x, double R) {
  const int n = int(std::sqrt(double(i)));
  const int m = i - n * n - n;
  const double r = x.norm();
  return -R / (2.0 * n + 1.0) * std::pow(R / r, n + 1) * real_sph_harm(n, m, Vec3(x / r)) *
         std::sqrt((2.0 * n + 1.0) / (R * R * R));
}

}  // namespace

Coupling coupling_an(const Vec3& z, const Vec3& a, int n, const Discretization& disc, double omega) {
  const auto& spec = *disc.spectrum;
  if (n < 0 || n >= spec.size()) throw std::invalid_argument("coupling_an: mode index out of range");
  const auto tr = dipole_traces(z, a, omega, 1.0, disc);
  const CVector fcheck = coeffs_check(tr.f, spec);
  const CVector ghat = coeffs_hat(tr.g, spec);
  Coupling out;
  out.an = ghat[n] - (0.5 + spec.eigenvalues[n]) * fcheck[n];
  if (disc.dimension == 2) {
    const CVector mode = spec.modes.col(n).cast<cplx>();
    const auto pot = eval_potential(disc.nodes, mode, 0.0, {planar(z)}, true);
    out.quasi_static = a.x() * pot.gradient[0][0] + a.y() * pot.gradient[0][1];
  } else {
    const double R = disc.sphere_radius();
    const double h = 1e-3 * z.norm();
    double g = 0.0;
    for (int c = 0; c < 3; ++c) {
      Vec3 e = Vec3::Zero();
      e[c] = h;
      const double d = (-sphere_exterior_single(n, z + 2 * e, R) + 8 * sphere_exterior_single(n, z + e, R) -
                        8 * sphere_exterior_single(n, z - e, R) + sphere_exterior_single(n, z - 2 * e, R)) /
                       (12 * h);
      g += a[c] * d;
    }
    out.quasi_static = g;
  }
  return out;
}

std::vector<int> resonant_modes(const NPSpectrum& spec, double eps, double tol) {
  const double target = plasmon_lambda(eps);
  std::vector<int> out;
  for (int i = 1; i < spec.size(); ++i)
    if (std::abs(spec.eigenvalues[i] - target) < tol) out.push_back(i);
  return out;
}

int nearest_mode(const NPSpectrum& spec, double eps) {
  const double target = plasmon_lambda(eps);
  int best = 1;
  for (int i = 2; i < spec.size(); ++i)
    if (std::abs(spec.eigenvalues[i] - target) < std::abs(spec.eigenvalues[best] - target)) best = i;
  return best;
}

}  // namespace plasmon
