#include "hyprec/hyperbolic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hyprec {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

BallPoint BallPoint::from_coords(std::vector<double> coords) {
  for (double v : coords) {
    if (!std::isfinite(v)) throw std::invalid_argument("ball point has non-finite coordinate");
  }
  ball::project(coords);
  BallPoint p;
  p.coords_ = std::move(coords);
  return p;
}

BallPoint project_to_ball(std::vector<double> x) { return BallPoint::from_coords(std::move(x)); }

ConformalFactor conformal_factor(const BallPoint& x) {
  return {2.0 / (1.0 - ball::sq_norm(x.coords()))};
}

BallPoint mobius_add(const BallPoint& x, const BallPoint& y) {
  require_same_dim(x.dim(), y.dim(), "mobius_add");
  std::vector<double> out(x.dim());
  ball::mobius_add(x.coords(), y.coords(), out);
  return BallPoint::from_coords(std::move(out));
}

BallPoint mobius_scalar(double r, const BallPoint& x) {
  std::vector<double> out(x.dim());
  ball::mobius_scalar(r, x.coords(), out);
  return BallPoint::from_coords(std::move(out));
}

BallPoint mobius_matvec(const Matrix& m, const BallPoint& x) {
  require_same_dim(m.cols, x.dim(), "mobius_matvec");
  std::vector<double> mx(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) mx[i] = ball::dot(m.row(i), x.coords());
  const double nx = x.norm();
  const double nmx = ball::norm(mx);
  if (nx == 0.0 || nmx == 0.0) return BallPoint(m.rows);
  const double f = std::tanh(nmx / nx * ball::artanh(nx)) / nmx;
  for (double& v : mx) v *= f;
  return BallPoint::from_coords(std::move(mx));
}

BallPoint expmap0(const TangentVector& v) {
  std::vector<double> out(v.dim());
  ball::expmap0(v.coords, out);
  return BallPoint::from_coords(std::move(out));
}

TangentVector logmap0(const BallPoint& x) {
  TangentVector v{std::vector<double>(x.dim())};
  ball::logmap0(x.coords(), v.coords);
  return v;
}

BallPoint exp_map(const BallPoint& x, const TangentVector& v) {
  require_same_dim(x.dim(), v.dim(), "exp_map");
  const double nv = v.norm();
  if (nv == 0.0) return x;
  const double lambda = conformal_factor(x).value;
  const double f = std::tanh(lambda * nv / 2.0) / nv;
  std::vector<double> step(v.dim());
  for (std::size_t i = 0; i < step.size(); ++i) step[i] = f * v.coords[i];
  return mobius_add(x, BallPoint::from_coords(std::move(step)));
}

TangentVector log_map(const BallPoint& x, const BallPoint& y) {
  require_same_dim(x.dim(), y.dim(), "log_map");
  std::vector<double> neg_x(x.coords().begin(), x.coords().end());
  for (double& c : neg_x) c = -c;
  std::vector<double> u(x.dim());
  ball::mobius_add(neg_x, y.coords(), u);
  TangentVector out{std::vector<double>(x.dim(), 0.0)};
  const double nu = ball::norm(u);
  if (nu == 0.0) return out;
  const double f = 2.0 / conformal_factor(x).value * ball::artanh(nu) / nu;
  for (std::size_t i = 0; i < u.size(); ++i) out.coords[i] = f * u[i];
  return out;
}

TangentVector parallel_transport_origin(const BallPoint& x, const TangentVector& v) {
  require_same_dim(x.dim(), v.dim(), "parallel_transport_origin");
  const double scale = 2.0 / conformal_factor(x).value;
  TangentVector out = v;
  for (double& c : out.coords) c *= scale;
  return out;
}

double hyperbolic_distance(const BallPoint& x, const BallPoint& y) {
  require_same_dim(x.dim(), y.dim(), "hyperbolic_distance");
  return ball::distance(x.coords(), y.coords());
}

}  // namespace hyprec
