#include "plasmon/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace plasmon {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kKiteA = 0.65;
constexpr double kKiteB = 1.5;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::circle: return "circle";
    case CurveKind::ellipse: return "ellipse";
    case CurveKind::kite: return "kite";
    case CurveKind::sphere: return "sphere";
  }
  return "unknown";
}

CurveKind curve_kind_from_string(const std::string& name) {
  if (name == "circle") return CurveKind::circle;
  if (name == "ellipse") return CurveKind::ellipse;
  if (name == "kite") return CurveKind::kite;
  if (name == "sphere") return CurveKind::sphere;
  throw std::invalid_argument("unknown geometry kind '" + name + "'");
}

BoundaryCurve::BoundaryCurve(CurveKind kind, CurveParams params) : kind_(kind), params_(params) {}

void BoundaryCurve::require_planar(const char* what) const {
  if (kind_ == CurveKind::sphere) {
    throw std::invalid_argument(std::string(what) + ": the sphere has no planar parameterization");
  }
}

Vec2 BoundaryCurve::point(double t) const {
  require_planar("point");
  const double s = params_.scale;
  switch (kind_) {
    case CurveKind::circle: return s * params_.radius * Vec2(std::cos(t), std::sin(t));
    case CurveKind::ellipse: return s * Vec2(params_.semi_a * std::cos(t), params_.semi_b * std::sin(t));
    case CurveKind::kite:
      return s * Vec2(std::cos(t) + kKiteA * std::cos(2 * t) - kKiteA, kKiteB * std::sin(t));
    default: break;
  }
  return Vec2::Zero();
}

Vec2 BoundaryCurve::d1(double t) const {
  require_planar("d1");
  const double s = params_.scale;
  switch (kind_) {
    case CurveKind::circle: return s * params_.radius * Vec2(-std::sin(t), std::cos(t));
    case CurveKind::ellipse: return s * Vec2(-params_.semi_a * std::sin(t), params_.semi_b * std::cos(t));
    case CurveKind::kite: return s * Vec2(-std::sin(t) - 2 * kKiteA * std::sin(2 * t), kKiteB * std::cos(t));
    default: break;
  }
  return Vec2::Zero();
}

Vec2 BoundaryCurve::d2(double t) const {
  require_planar("d2");
  const double s = params_.scale;
  switch (kind_) {
    case CurveKind::circle: return -s * params_.radius * Vec2(std::cos(t), std::sin(t));
    case CurveKind::ellipse: return -s * Vec2(params_.semi_a * std::cos(t), params_.semi_b * std::sin(t));
    case CurveKind::kite: return s * Vec2(-std::cos(t) - 4 * kKiteA * std::cos(2 * t), -kKiteB * std::sin(t));
    default: break;
  }
  return Vec2::Zero();
}

Vec2 BoundaryCurve::normal(double t) const {
  const Vec2 v = d1(t);
  return Vec2(v.y(), -v.x()) / v.norm();
}

double BoundaryCurve::curvature(double t) const {
  const Vec2 v = d1(t);
  const Vec2 a = d2(t);
  const double speed = v.norm();
  return cross(v, a) / (speed * speed * speed);
}

double BoundaryCurve::sphere_radius() const {
  if (kind_ != CurveKind::sphere) throw std::invalid_argument("sphere_radius: not a sphere");
  return params_.scale * params_.radius;
}

BoundaryCurve BoundaryCurve::scaled(double s) const {
  if (!(s > 0.0)) throw std::invalid_argument("scale factor must be positive");
  CurveParams p = params_;
  p.scale *= s;
  return BoundaryCurve(kind_, p);
}

std::string BoundaryCurve::id() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind_) << ":" << params_.radius << ":" << params_.semi_a << ":" << params_.semi_b
     << ":" << params_.scale;
  return os.str();
}

BoundaryCurve make_curve(CurveKind kind, CurveParams params) {
  if (!(params.scale > 0.0)) throw std::invalid_argument("curve scale must be positive");
  switch (kind) {
    case CurveKind::circle:
    case CurveKind::sphere:
      if (!(params.radius > 0.0)) throw std::invalid_argument("radius must be positive");
      break;
    case CurveKind::ellipse:
      if (!(params.semi_a > 0.0) || !(params.semi_b > 0.0)) {
        throw std::invalid_argument("ellipse semiaxes must be positive");
      }
      if (params.semi_a < params.semi_b) throw std::invalid_argument("ellipse requires a >= b");
      break;
    case CurveKind::kite: break;
  }
  return BoundaryCurve(kind, params);
}

double NodeSet::perimeter() const {
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum;
}

double NodeSet::max_spacing() const {
  double h = 0.0;
  for (int j = 0; j < count; ++j) h = std::max(h, (points[(j + 1) % count] - points[j]).norm());
  return h;
}

Eigen::VectorXd NodeSet::weight_vector() const {
  return Eigen::Map<const Eigen::VectorXd>(weights.data(), count);
}

NodeSet quadrature_nodes(const BoundaryCurve& curve, int n) {
  if (curve.dimension() != 2) throw std::invalid_argument("quadrature_nodes: curve must be planar");
  if (n % 2 != 0) throw std::invalid_argument("quadrature_nodes: node count must be even");
  if (n < kMinNodes) throw std::invalid_argument("quadrature_nodes: need at least 16 nodes");
  NodeSet nodes;
  nodes.count = n;
  nodes.params.resize(n);
  nodes.points.resize(n);
  nodes.normals.resize(n);
  nodes.jacobians.resize(n);
  nodes.curvatures.resize(n);
  nodes.weights.resize(n);
  nodes.tangents_d1.resize(n);
  for (int j = 0; j < n; ++j) {
    const double t = kTwoPi * j / n;
    nodes.params[j] = t;
    nodes.points[j] = curve.point(t);
    nodes.tangents_d1[j] = curve.d1(t);
    nodes.normals[j] = curve.normal(t);
    nodes.jacobians[j] = nodes.tangents_d1[j].norm();
    nodes.curvatures[j] = curve.curvature(t);
    nodes.weights[j] = kTwoPi / n * nodes.jacobians[j];
  }
  return nodes;
}

double InteriorPointSet::total_weight() const {
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum;
}

double distance_to_curve(const BoundaryCurve& curve, const Vec2& p) {
  constexpr int kSamples = 1024;
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kSamples; ++i) {
    const double d = (curve.point(kTwoPi * i / kSamples) - p).norm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  // Golden-section refinement on the bracketing parameter interval.
  const double h = kTwoPi / kSamples;
  double lo = kTwoPi * best / kSamples - h;
  double hi = lo + 2 * h;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  auto dist = [&](double t) { return (curve.point(t) - p).norm(); };
  double a = hi - g * (hi - lo);
  double b = lo + g * (hi - lo);
  double fa = dist(a);
  double fb = dist(b);
  for (int it = 0; it < 80; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = dist(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = dist(b);
    }
  }
  return std::min({best_d, fa, fb});
}

bool contains(const BoundaryCurve& curve, const Vec2& p) {
  const auto& c = curve.params();
  switch (curve.kind()) {
    case CurveKind::circle: return p.norm() < c.scale * c.radius;
    case CurveKind::ellipse: {
      const double u = p.x() / (c.scale * c.semi_a);
      const double v = p.y() / (c.scale * c.semi_b);
      return u * u + v * v < 1.0;
    }
    case CurveKind::kite: {
      constexpr int kSides = 4096;
      bool inside = false;
      Vec2 prev = curve.point(0.0);
      for (int i = 1; i <= kSides; ++i) {
        const Vec2 cur = curve.point(kTwoPi * i / kSides);
        if ((cur.y() > p.y()) != (prev.y() > p.y())) {
          const double x = prev.x() + (p.y() - prev.y()) * (cur.x() - prev.x()) / (cur.y() - prev.y());
          if (p.x() < x) inside = !inside;
        }
        prev = cur;
      }
      return inside;
    }
    case CurveKind::sphere: break;
  }
  throw std::invalid_argument("contains: planar curves only");
}

InteriorPointSet interior_points(const BoundaryCurve& curve, double h, double buffer) {
  if (curve.dimension() != 2) throw std::invalid_argument("interior_points: curve must be planar");
  if (!(h > 0.0) || !(buffer > 0.0)) throw std::invalid_argument("interior_points: h and buffer must be positive");
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (int i = 0; i < 512; ++i) {
    const Vec2 q = curve.point(kTwoPi * i / 512);
    xmin = std::min(xmin, q.x());
    xmax = std::max(xmax, q.x());
    ymin = std::min(ymin, q.y());
    ymax = std::max(ymax, q.y());
  }
  InteriorPointSet out;
  out.buffer = buffer;
  const int i0 = int(std::floor(xmin / h)) - 1;
  const int i1 = int(std::ceil(xmax / h)) + 1;
  const int j0 = int(std::floor(ymin / h)) - 1;
  const int j1 = int(std::ceil(ymax / h)) + 1;
  for (int i = i0; i <= i1; ++i) {
    for (int j = j0; j <= j1; ++j) {
      const Vec2 p((i + 0.5) * h, (j + 0.5) * h);
      if (!contains(curve, p)) continue;
      if (distance_to_curve(curve, p) < buffer) continue;
      out.points.push_back(p);
      out.weights.push_back(h * h);
    }
  }
  if (out.points.empty()) throw std::invalid_argument("interior_points: buffer leaves no interior points");
  return out;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

InteriorPointSet polar_interior_points(const BoundaryCurve& curve, int n_radial, int n_angular,
                                       double rho_max) {
  if (curve.dimension() != 2) throw std::invalid_argument("polar_interior_points: curve must be planar");
  if (!(rho_max > 0.0 && rho_max <= 1.0)) throw std::invalid_argument("polar_interior_points: rho_max in (0, 1]");
  std::vector<double> xs, ws;
  gauss_legendre(n_radial, xs, ws);
  InteriorPointSet out;
  for (int k = 0; k < n_angular; ++k) {
    const double t = kTwoPi * k / n_angular;
    const Vec2 x = curve.point(t);
    const double jac = cross(x, curve.d1(t));
    if (!(jac > 0.0)) throw std::invalid_argument("polar_interior_points: curve is not star-shaped about the origin");
    for (int i = 0; i < n_radial; ++i) {
      const double rho = 0.5 * rho_max * (xs[i] + 1.0);
      out.points.push_back(rho * x);
      out.weights.push_back(0.5 * rho_max * ws[i] * (kTwoPi / n_angular) * rho * jac);
    }
  }
  double min_dist = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_angular; ++k) {
    const double t = kTwoPi * k / n_angular;
    min_dist = std::min(min_dist, distance_to_curve(curve, rho_max * curve.point(t)));
  }
  out.buffer = min_dist;
  return out;
}

}  // namespace plasmon
