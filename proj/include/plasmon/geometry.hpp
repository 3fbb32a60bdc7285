#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace plasmon {

using Vec2 = Eigen::Vector2d;

enum class CurveKind { circle, ellipse, kite, sphere };

std::string to_string(CurveKind kind);
CurveKind curve_kind_from_string(const std::string& name);

struct CurveParams {
  double radius = 1.0;    // circle, sphere
  double semi_a = 1.0;    // ellipse, along x1
  double semi_b = 1.0;    // ellipse, along x2
  double scale = 1.0;     // kite (and an overall dilation for every kind)
};

/// Closed boundary: a parameterized C^2 curve on [0, 2pi) for the 2D kinds,
/// a radius-only descriptor for the sphere. Counter-clockwise orientation;
/// the outward normal is (x2', -x1') / |x'|.
class BoundaryCurve {
 public:
  BoundaryCurve(CurveKind kind, CurveParams params);

  CurveKind kind() const { return kind_; }
  const CurveParams& params() const { return params_; }
  int dimension() const { return kind_ == CurveKind::sphere ? 3 : 2; }

  Vec2 point(double t) const;
  Vec2 d1(double t) const;
  Vec2 d2(double t) const;
  Vec2 normal(double t) const;
  /// Signed curvature, positive on convex arcs.
  double curvature(double t) const;

  /// Sphere radius; throws for the 2D kinds.
  double sphere_radius() const;

  /// Same shape dilated by factor s about the origin.
  BoundaryCurve scaled(double s) const;

  /// Stable identifier used as an operator-cache key.
  std::string id() const;

 private:
  void require_planar(const char* what) const;

  CurveKind kind_;
  CurveParams params_;
};

/// Validates parameters and builds the curve. Rejects non-positive radii and
/// ellipses with a < b.
BoundaryCurve make_curve(CurveKind kind, CurveParams params);

/// Trapezoid nodes equispaced in the parameter, t_j = 2 pi j / N.
struct NodeSet {
  int count = 0;
  std::vector<double> params;
  std::vector<Vec2> points;
  std::vector<Vec2> normals;
  std::vector<double> jacobians;   // |x'(t_j)|
  std::vector<double> curvatures;
  std::vector<double> weights;     // (2 pi / N) |x'(t_j)|
  std::vector<Vec2> tangents_d1;   // x'(t_j)

  double perimeter() const;
  double max_spacing() const;
  Eigen::VectorXd weight_vector() const;
};

inline constexpr int kMinNodes = 16;

/// N must be even and at least kMinNodes; curve must be planar.
NodeSet quadrature_nodes(const BoundaryCurve& curve, int n);

struct InteriorPointSet {
  std::vector<Vec2> points;
  std::vector<double> weights;
  double buffer = 0.0;

  double total_weight() const;
};

/// Regular grid of spacing h restricted to points at distance >= buffer from
/// the boundary, each carrying weight h^2. Throws if no point survives.
InteriorPointSet interior_points(const BoundaryCurve& curve, double h, double buffer);

/// Tensor quadrature over the star-shaped region {rho x(t) : 0 <= rho <= rho_max}
/// (Gauss-Legendre in rho, trapezoid in t). Throws if the curve is not
/// star-shaped about the origin.
InteriorPointSet polar_interior_points(const BoundaryCurve& curve, int n_radial, int n_angular,
                                       double rho_max);

/// Euclidean distance from p to the curve.
double distance_to_curve(const BoundaryCurve& curve, const Vec2& p);

/// Point-in-domain test for the 2D kinds.
bool contains(const BoundaryCurve& curve, const Vec2& p);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace plasmon
