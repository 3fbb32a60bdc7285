#include "plasmon/layer_ops.hpp"

#include "plasmon/parallel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace plasmon {

namespace {

constexpr double kTwoPi = 2.0 * kPi;
constexpr double kFourPi = 4.0 * kPi;

struct KernelSplit {
  cplx log_coeff;  // L1: coefficient of ln(4 sin^2((t - tau)/2))
  cplx full;       // L1 ln(4 sin^2) + L2 off the diagonal
};

// Weights R_m of the product rule for ln(4 sin^2((t_i - t_j)/2)) on N = 2n nodes.
std::vector<double> log_weights(int n_nodes) {
  const int half = n_nodes / 2;
  std::vector<double> r(n_nodes, 0.0);
  for (int m = 0; m < n_nodes; ++m) {
    const double t = kTwoPi * m / n_nodes;
    double sum = 0.0;
    for (int p = 1; p < half; ++p) sum += std::cos(p * t) / p;
    r[m] = -(4.0 * kPi / n_nodes) * sum - (4.0 * kPi / (double(n_nodes) * n_nodes)) * ((m % 2 == 0) ? 1.0 : -1.0);
  }
  return r;
}

// Generic Kress assembly. offdiag(i, j) gives the split kernel for i != j;
// diag(i) gives (L1, L2) on the diagonal.
template <class OffDiag, class Diag>
CMatrix assemble_split(const NodeSet& nodes, OffDiag offdiag, Diag diag) {
  const int n = nodes.count;
  const auto rw = log_weights(n);
  const double h = kTwoPi / n;
  CMatrix a(n, n);
  parallel_for(n, [&](int i) {
    for (int j = 0; j < n; ++j) {
      const int m = std::abs(i - j);
      cplx entry;
      if (i == j) {
        const auto [l1, l2] = diag(i);
        entry = rw[0] * l1 + h * l2;
      } else {
        const KernelSplit k = offdiag(i, j);
        const double s = std::sin(0.5 * (nodes.params[i] - nodes.params[j]));
        const cplx l2 = k.full - k.log_coeff * std::log(4.0 * s * s);
        entry = rw[m] * k.log_coeff + h * l2;
      }
      a(i, j) = entry * nodes.jacobians[j];
    }
  });
  return a;
}

struct PairGeometry {
  double r;
  double d;  // (x_i - x_j) . nu_i
};

PairGeometry pair(const NodeSet& nodes, int i, int j) {
  const Vec2 diff = nodes.points[i] - nodes.points[j];
  return {diff.norm(), diff.dot(nodes.normals[i])};
}

struct BesselSet {
  cplx j0, j1, h0, h1;
};

BesselSet bessels(cplx z) {
  const cplx i{0.0, 1.0};
  const cplx j0 = bessel_j(0, z);
  const cplx j1 = bessel_j(1, z);
  if (std::abs(z) < kHankelCrossover) {
    return {j0, j1, j0 + i * bessel_y(0, z), j1 + i * bessel_y(1, z)};
  }
  return {j0, j1, hankel1(0, z), hankel1(1, z)};
}

void require_planar_nodes(const NodeSet& nodes) {
  if (nodes.count < kMinNodes) throw std::invalid_argument("layer operators need a planar node set");
}

}  // namespace

std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::single_layer: return "S";
    case OperatorKind::np_adjoint: return "Kstar";
    case OperatorKind::remainder_R: return "R";
    case OperatorKind::remainder_Q: return "Q";
    case OperatorKind::dk_single_layer: return "dS";
    case OperatorKind::dk_np_adjoint: return "dKstar";
  }
  return "unknown";
}

RMatrix assemble_S(const NodeSet& nodes) { return assemble_helmholtz(nodes, 0.0).S.real(); }

RMatrix assemble_Kstar(const NodeSet& nodes) { return assemble_helmholtz(nodes, 0.0).Kstar.real(); }

HelmholtzPair assemble_helmholtz(const NodeSet& nodes, cplx k) {
  require_planar_nodes(nodes);
  const bool laplace = (k == cplx{0.0});
  const cplx tau = laplace ? cplx{0.0} : tau_constant(k);
  const cplx i{0.0, 1.0};

  HelmholtzPair out;
  out.S = assemble_split(
      nodes,
      [&](int a, int b) {
        const auto g = pair(nodes, a, b);
        if (laplace) return KernelSplit{1.0 / kFourPi, std::log(g.r) / kTwoPi};
        const auto bs = bessels(k * g.r);
        return KernelSplit{bs.j0 / kFourPi, -0.25 * i * bs.h0};
      },
      [&](int a) {
        return std::pair<cplx, cplx>{1.0 / kFourPi, std::log(nodes.jacobians[a]) / kTwoPi + tau};
      });
  out.Kstar = assemble_split(
      nodes,
      [&](int a, int b) {
        const auto g = pair(nodes, a, b);
        if (laplace) return KernelSplit{0.0, g.d / (kTwoPi * g.r * g.r)};
        const auto bs = bessels(k * g.r);
        return KernelSplit{-k * bs.j1 * g.d / (kFourPi * g.r), 0.25 * i * k * bs.h1 * g.d / g.r};
      },
      [&](int a) { return std::pair<cplx, cplx>{0.0, nodes.curvatures[a] / kFourPi}; });
  return out;
}

CMatrix assemble_S_omega(const NodeSet& nodes, cplx k) { return assemble_helmholtz(nodes, k).S; }

CMatrix assemble_Kstar_omega(const NodeSet& nodes, cplx k) { return assemble_helmholtz(nodes, k).Kstar; }

HelmholtzPair assemble_dk(const NodeSet& nodes, cplx k) {
  require_planar_nodes(nodes);
  if (k == cplx{0.0}) throw std::invalid_argument("assemble_dk: k must be nonzero");
  const cplx i{0.0, 1.0};
  HelmholtzPair out;
  // d/dk Gamma^k(r) = (i/4) r H_1(kr)
  out.S = assemble_split(
      nodes,
      [&](int a, int b) {
        const auto g = pair(nodes, a, b);
        const auto bs = bessels(k * g.r);
        return KernelSplit{-g.r * bs.j1 / kFourPi, 0.25 * i * g.r * bs.h1};
      },
      [&](int) { return std::pair<cplx, cplx>{0.0, 1.0 / (kTwoPi * k)}; });
  // d/dk of (ik/4) H_1(kr) d/r is (ik/4) H_0(kr) d
  out.Kstar = assemble_split(
      nodes,
      [&](int a, int b) {
        const auto g = pair(nodes, a, b);
        const auto bs = bessels(k * g.r);
        return KernelSplit{-k * bs.j0 * g.d / kFourPi, 0.25 * i * k * bs.h0 * g.d};
      },
      [&](int) { return std::pair<cplx, cplx>{0.0, 0.0}; });
  return out;
}

RemainderPair assemble_R_Q(const NodeSet& nodes, double omega) {
  require_planar_nodes(nodes);
  if (!(omega > 0.0) || omega > kOmegaCeiling) {
    throw std::domain_error("assemble_R_Q: omega outside (0, 0.5]");
  }
  const double scale = 1.0 / (omega * omega * std::log(omega));
  RemainderPair out;
  out.R = assemble_split(
      nodes,
      [&](int a, int b) {
        const auto g = pair(nodes, a, b);
        return KernelSplit{bessel_j0_minus_one(omega * g.r) * scale / kFourPi, remainder_kernel(g.r, omega, 2)};
      },
      [&](int) { return std::pair<cplx, cplx>{0.0, 0.0}; });
  out.Q = assemble_split(
      nodes,
      [&](int a, int b) {
        const auto g = pair(nodes, a, b);
        return KernelSplit{-omega * bessel_j(1, omega * g.r) * (g.d / g.r) * scale / kFourPi,
                           remainder_kernel_dr(g.r, omega, 2) * g.d / g.r};
      },
      [&](int) { return std::pair<cplx, cplx>{0.0, 0.0}; });
  return out;
}

CMatrix constant_pairing(const NodeSet& nodes, cplx c) {
  const CVector w = nodes.weight_vector().cast<cplx>();
  return c * CVector::Ones(nodes.count) * w.transpose();
}

double node_distance(const NodeSet& nodes, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& y : nodes.points) best = std::min(best, (p - y).norm());
  return best;
}

double evaluation_buffer(const NodeSet& nodes) { return 2.0 * nodes.max_spacing(); }

PotentialValues eval_potential(const NodeSet& nodes, const CVector& density, cplx k,
                               const std::vector<Vec2>& points, bool want_gradient) {
  if (density.size() != nodes.count) throw std::invalid_argument("eval_potential: density length mismatch");
  const double buffer = evaluation_buffer(nodes);
  for (const auto& p : points) {
    if (node_distance(nodes, p) < buffer) {
      throw std::domain_error("eval_potential: evaluation point too close to the boundary");
    }
  }
  PotentialValues out;
  out.value = CVector::Zero(points.size());
  if (want_gradient) out.gradient.assign(points.size(), Eigen::Vector2cd::Zero());
  parallel_for(int(points.size()), [&](int q) {
    cplx value{0.0};
    Eigen::Vector2cd grad = Eigen::Vector2cd::Zero();
    for (int j = 0; j < nodes.count; ++j) {
      const Vec2 diff = points[q] - nodes.points[j];
      const double r = diff.norm();
      const cplx wphi = nodes.weights[j] * density[j];
      if (want_gradient) {
        const RadialGreen g = helmholtz_green_radial(r, k, 2);
        value += g.value * wphi;
        grad += (g.d1 * wphi / r) * diff.cast<cplx>();
      } else {
        value += helmholtz_green(r, k, 2) * wphi;
      }
    }
    out.value[q] = value;
    if (want_gradient) out.gradient[q] = grad;
  });
  return out;
}

namespace {

// Discrete Fourier coefficients c_p, p = -N/2..N/2, of equispaced samples.
std::vector<cplx> fourier_coefficients(const CVector& values) {
  const int n = int(values.size());
  const int half = n / 2;
  std::vector<cplx> c(n + 1, 0.0);
  for (int p = -half; p <= half; ++p) {
    cplx sum{0.0};
    for (int j = 0; j < n; ++j) sum += values[j] * std::polar(1.0, -kTwoPi * double(p) * j / n);
    c[p + half] = sum / double(n);
  }
  // Nyquist: c_{-N/2} = c_{N/2}; split the mode evenly.
  c[0] *= 0.5;
  c[n] = c[0];
  return c;
}

}  // namespace

CVector trig_upsample(const CVector& values, int factor) {
  const int n = int(values.size());
  if (n % 2 != 0 || factor < 1) throw std::invalid_argument("trig_upsample: need even N and factor >= 1");
  const int half = n / 2;
  const auto c = fourier_coefficients(values);
  const int m = n * factor;
  CVector out(m);
  for (int q = 0; q < m; ++q) {
    const double t = kTwoPi * q / m;
    cplx sum{0.0};
    for (int p = -half; p <= half; ++p) sum += c[p + half] * std::polar(1.0, p * t);
    out[q] = sum;
  }
  return out;
}

CVector spectral_derivative(const CVector& values) {
  const int n = int(values.size());
  if (n % 2 != 0) throw std::invalid_argument("spectral_derivative: need even N");
  const int half = n / 2;
  const auto c = fourier_coefficients(values);
  const cplx i{0.0, 1.0};
  CVector out(n);
  for (int q = 0; q < n; ++q) {
    const double t = kTwoPi * q / n;
    cplx sum{0.0};
    for (int p = -half; p <= half; ++p) sum += i * double(p) * c[p + half] * std::polar(1.0, p * t);
    out[q] = sum;
  }
  return out;
}

double weighted_operator_norm(const NodeSet& nodes, const CMatrix& a) {
  const RVector w = nodes.weight_vector();
  const RVector sw = w.cwiseSqrt();
  const CMatrix b = sw.asDiagonal() * a * sw.cwiseInverse().asDiagonal();
  Eigen::BDCSVD<CMatrix> svd(b);
  return svd.singularValues()(0);
}

cplx weighted_dot(const NodeSet& nodes, const CVector& a, const CVector& b) {
  cplx sum{0.0};
  for (int j = 0; j < nodes.count; ++j) sum += nodes.weights[j] * std::conj(a[j]) * b[j];
  return sum;
}

}  // namespace plasmon
