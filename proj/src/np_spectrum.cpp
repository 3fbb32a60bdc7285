#include "plasmon/np_spectrum.hpp"

#include "plasmon/errors.hpp"
#include "plasmon/sphere.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace plasmon {

GramData build_gram(const RMatrix& S, const NodeSet& nodes) {
  const int n = nodes.count;
  if (S.rows() != n || S.cols() != n) throw std::invalid_argument("build_gram: operator size does not match nodes");
  const RVector w = nodes.weight_vector();
  const double perimeter = w.sum();

  // S phi = c 1 with <phi, 1> = |boundary|
  RMatrix border = RMatrix::Zero(n + 1, n + 1);
  border.topLeftCorner(n, n) = S;
  border.block(0, n, n, 1).setConstant(-1.0);
  border.block(n, 0, 1, n) = w.transpose();
  RVector rhs = RVector::Zero(n + 1);
  rhs[n] = perimeter;
  const RVector sol = border.partialPivLu().solve(rhs);

  GramData out;
  out.phi_eq = sol.head(n);
  out.c0 = sol[n];
  out.patched = std::abs(out.c0) < 1e-8 * (1.0 + perimeter);
  out.s_tilde = S;
  if (out.patched) {
    // phi_0 = phi_eq / |boundary| has unit mass; S~ phi_0 = 1
    const RVector phi0 = out.phi_eq / perimeter;
    const RVector defect = RVector::Ones(n) - S * phi0;
    out.s_tilde += defect * w.transpose();
  }

  const RMatrix ws = w.asDiagonal() * out.s_tilde;
  out.gram = -0.5 * (ws + ws.transpose());
  // -<phi_eq, S~ phi_eq> is negative when the logarithmic capacity exceeds
  // one (or after the patch); flip that single direction so G is positive.
  const double b0 = out.phi_eq.dot(ws * out.phi_eq);
  if (b0 > 0.0) out.gram += (2.0 * b0 / (perimeter * perimeter)) * w * w.transpose();

  Eigen::SelfAdjointEigenSolver<RMatrix> eig(out.gram, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = eig.eigenvalues().minCoeff();
  if (!(out.min_eigenvalue > 0.0))
    throw NumericalFailure("H* Gram matrix is not positive definite (smallest eigenvalue " +
                           std::to_string(out.min_eigenvalue) + ")");
  return out;
}

namespace {

void orient(RMatrix& modes, int col) {
  auto v = modes.col(col);
  const double big = v.cwiseAbs().maxCoeff();
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-3 * big) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

NPSpectrum np_eigendecomposition(const RMatrix& Kstar, const GramData& gram, const NodeSet& nodes) {
  const int n = nodes.count;
  const RMatrix& G = gram.gram;
  const RMatrix gk = G * Kstar;
  const double asym = (gk - gk.transpose()).norm() / std::max(gk.norm(), 1e-300);
  if (asym > 1e-6) throw NumericalFailure("K* is not self-adjoint in the H* product (asymmetry " + std::to_string(asym) + ")");

  Eigen::LLT<RMatrix> llt(G);
  if (llt.info() != Eigen::Success) throw NumericalFailure("Cholesky factorization of the H* Gram matrix failed");
  const RMatrix L = llt.matrixL();
  const auto tri = L.triangularView<Eigen::Lower>();
  RMatrix c = tri.solve(0.5 * (gk + gk.transpose()));
  c = tri.solve(c.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(0.5 * (c + c.transpose()));
  if (eig.info() != Eigen::Success) throw NumericalFailure("NP eigensolve did not converge");
  const RMatrix vecs = L.transpose().triangularView<Eigen::Upper>().solve(eig.eigenvectors());
  const RVector vals = eig.eigenvalues();

  // lambda_0 is the largest eigenvalue; the rest go by decreasing |lambda|
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  int top = 0;
  for (int i = 1; i < n; ++i)
    if (vals[i] > vals[top]) top = i;
  order.erase(order.begin() + top);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(vals[a]) > std::abs(vals[b]); });
  for (size_t i = 0; i < order.size();) {
    size_t j = i + 1;
    while (j < order.size() && std::abs(std::abs(vals[order[j]]) - std::abs(vals[order[i]])) < 1e-9) ++j;
    std::stable_sort(order.begin() + i, order.begin() + j, [&](int a, int b) { return vals[a] < vals[b]; });
    i = j;
  }
  order.insert(order.begin(), top);

  NPSpectrum spec;
  spec.dimension = 2;
  spec.weights = nodes.weight_vector();
  spec.modes.resize(n, n);
  for (int i = 0; i < n; ++i) {
    spec.eigenvalues.push_back(vals[order[i]]);
    spec.modes.col(i) = vecs.col(order[i]);
    if (i > 0) orient(spec.modes, i);
  }
  if (spec.weights.dot(spec.modes.col(0)) < 0.0) spec.modes.col(0) *= -1.0;

  spec.gram = G;
  spec.s_tilde = gram.s_tilde;
  spec.dual = gram.s_tilde * spec.modes;
  spec.check_map = spec.modes.transpose() * G * gram.s_tilde.partialPivLu().inverse();
  spec.c0 = gram.c0;
  spec.patched = gram.patched;

  const RVector phi0 = spec.modes.col(0);
  const double perimeter = spec.weights.sum();
  spec.phi0_mass = spec.weights.dot(phi0);
  spec.phi0_tilde = spec.weights.dot(spec.dual.col(0)) / perimeter;
  // S[phi_0] is the constant c0 rescaled by the mass ratio
  spec.phi0_single = gram.c0 * spec.phi0_mass / perimeter;
  return spec;
}

NPSpectrum np_spectrum(const NodeSet& nodes) {
  const RMatrix S = assemble_S(nodes);
  const auto gram = build_gram(S, nodes);
  return np_eigendecomposition(assemble_Kstar(nodes), gram, nodes);
}

NPSpectrum sphere_spectrum(int degree, double radius) {
  if (degree < kMinSphereDegree) throw std::invalid_argument("sphere truncation degree must be at least 4");
  if (!(radius > 0.0)) throw std::invalid_argument("sphere radius must be positive");
  NPSpectrum spec;
  spec.dimension = 3;
  spec.degree = degree;
  spec.radius = radius;
  for (int n = 0; n <= degree; ++n)
    for (int m = -n; m <= n; ++m) spec.eigenvalues.push_back(1.0 / (2.0 * (2 * n + 1)));
  // the constant density 1 has S[1] = -R
  spec.c0 = -radius;
  spec.patched = false;
  const double phi0 = 1.0 / std::sqrt(4.0 * kPi * radius * radius * radius);
  spec.phi0_single = -radius * phi0;
  spec.phi0_tilde = spec.phi0_single;
  spec.phi0_mass = 4.0 * kPi * radius * radius * phi0;
  return spec;
}

namespace {

double sphere_scale(const NPSpectrum& spec, int idx) {
  const int n = int(std::sqrt(double(idx)));
  return std::sqrt(spec.radius * spec.radius * spec.radius / (2.0 * n + 1.0));
}

double sphere_single(const NPSpectrum& spec, int idx) {
  const int n = int(std::sqrt(double(idx)));
  return -spec.radius / (2.0 * n + 1.0);
}

void check_size(const CVector& v, const NPSpectrum& spec) {
  if (v.size() != spec.size()) throw std::invalid_argument("vector size does not match the spectrum");
}

}  // namespace

CVector coeffs_hat(const CVector& density, const NPSpectrum& spec) {
  check_size(density, spec);
  if (spec.dimension == 3) {
    CVector out(density.size());
    for (int i = 0; i < density.size(); ++i) out[i] = density[i] * sphere_scale(spec, i);
    return out;
  }
  return spec.modes.transpose() * (spec.gram * density);
}

CVector coeffs_check(const CVector& trace, const NPSpectrum& spec) {
  check_size(trace, spec);
  if (spec.dimension == 3) {
    CVector out(trace.size());
    for (int i = 0; i < trace.size(); ++i) out[i] = trace[i] * sphere_scale(spec, i) / sphere_single(spec, i);
    return out;
  }
  return spec.check_map * trace;
}

CVector synthesize(const CVector& coeffs, const NPSpectrum& spec) {
  check_size(coeffs, spec);
  if (spec.dimension == 3) {
    CVector out(coeffs.size());
    for (int i = 0; i < coeffs.size(); ++i) out[i] = coeffs[i] / sphere_scale(spec, i);
    return out;
  }
  return spec.modes * coeffs;
}

double hstar_norm(const CVector& density, const NPSpectrum& spec) {
  if (spec.dimension == 3) return coeffs_hat(density, spec).norm();
  check_size(density, spec);
  return std::sqrt(std::max(0.0, density.dot(spec.gram * density).real()));
}

double h_norm(const CVector& trace, const NPSpectrum& spec) { return coeffs_check(trace, spec).norm(); }

std::vector<int> multiplicity_clusters(const std::vector<double>& eigenvalues, double tol) {
  std::vector<int> ids(eigenvalues.size(), -1);
  int next = 0;
  for (size_t i = 0; i < eigenvalues.size(); ++i) {
    if (ids[i] >= 0) continue;
    ids[i] = next;
    for (size_t j = i + 1; j < eigenvalues.size(); ++j)
      if (ids[j] < 0 && std::abs(std::abs(eigenvalues[j]) - std::abs(eigenvalues[i])) < tol) ids[j] = next;
    ++next;
  }
  return ids;
}

}  // namespace plasmon
