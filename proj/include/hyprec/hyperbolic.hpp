#pragma once

// Poincare-ball geometry with curvature fixed at 1: distance, Mobius
// operations, exponential/logarithmic maps and origin parallel transport.
// All results are kept inside the ball of radius 1 - ball::kBoundaryEps.

#include <cstddef>
#include <span>
#include <vector>

#include "hyprec/ball_kernels.hpp"
#include "hyprec/matrix.hpp"

namespace hyprec {

// A point of the open unit ball. Construction always projects into the
// shrunken ball, so norm() <= 1 - ball::kBoundaryEps holds for every instance.
class BallPoint {
 public:
  BallPoint() = default;
  explicit BallPoint(std::size_t dim) : coords_(dim, 0.0) {}

  // Throws std::invalid_argument on non-finite coordinates.
  static BallPoint from_coords(std::vector<double> coords);

  std::span<const double> coords() const { return coords_; }
  std::size_t dim() const { return coords_.size(); }
  double norm() const { return ball::norm(coords_); }
  double operator[](std::size_t i) const { return coords_[i]; }

  bool operator==(const BallPoint&) const = default;

 private:
  std::vector<double> coords_;
};

// Tangent vector; unless stated otherwise it lives at the origin.
struct TangentVector {
  std::vector<double> coords;

  std::size_t dim() const { return coords.size(); }
  double norm() const { return ball::norm(coords); }
};

struct ConformalFactor {
  double value = 2.0;
};

BallPoint project_to_ball(std::vector<double> x);

// lambda_x = 2 / (1 - |x|^2)
ConformalFactor conformal_factor(const BallPoint& x);

BallPoint mobius_add(const BallPoint& x, const BallPoint& y);
BallPoint mobius_scalar(double r, const BallPoint& x);
// M (x) x for an m x d matrix; returns the origin of R^m when Mx = 0.
BallPoint mobius_matvec(const Matrix& m, const BallPoint& x);

BallPoint exp_map(const BallPoint& x, const TangentVector& v);
TangentVector log_map(const BallPoint& x, const BallPoint& y);
BallPoint expmap0(const TangentVector& v);
TangentVector logmap0(const BallPoint& x);

// P_{0 -> x}(v) = (lambda_0 / lambda_x) v
TangentVector parallel_transport_origin(const BallPoint& x, const TangentVector& v);

double hyperbolic_distance(const BallPoint& x, const BallPoint& y);

}  // namespace hyprec
