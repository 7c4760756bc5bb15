#include "hyprec/ball_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hyprec::ball {

namespace {

// Below this norm the radial factors of exp0/log0 use their Taylor series.
constexpr double kSeriesNorm = 1e-3;

std::vector<double>& scratch(int slot, std::size_t n) {
  thread_local std::vector<double> buffers[5];
  auto& b = buffers[slot];
  b.assign(n, 0.0);
  return b;
}

// Backward through `project` applied to raw value w: grad_w = J^T grad_out.
void project_backward(ConstVec w, ConstVec grad_out, Vec grad_w) {
  const double n = norm(w);
  if (n <= kMaxNorm) {
    for (std::size_t i = 0; i < w.size(); ++i) grad_w[i] = grad_out[i];
    return;
  }
  // out = kMaxNorm * w / |w|
  const double ug = dot(w, grad_out) / n;
  const double c = kMaxNorm / n;
  for (std::size_t i = 0; i < w.size(); ++i) grad_w[i] = c * (grad_out[i] - ug * w[i] / n);
}

// Raw Mobius sum before projection.
void mobius_add_raw(ConstVec x, ConstVec y, Vec out) {
  const double xy = dot(x, y);
  const double xx = sq_norm(x);
  const double yy = sq_norm(y);
  const double a = 1.0 + 2.0 * xy + yy;
  const double b = 1.0 - xx;
  const double den = 1.0 + 2.0 * xy + xx * yy;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (a * x[i] + b * y[i]) / den;
}

}  // namespace

double dot(ConstVec a, ConstVec b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sq_norm(ConstVec a) { return dot(a, a); }

double norm(ConstVec a) { return std::sqrt(sq_norm(a)); }

double artanh(double x) { return std::atanh(std::clamp(x, -kArtanhLimit, kArtanhLimit)); }

bool project(Vec x) {
  const double n = norm(x);
  if (n <= kMaxNorm) return false;
  const double s = kMaxNorm / n;
  for (double& v : x) v *= s;
  return true;
}

void expmap0(ConstVec v, Vec out) {
  const double n = norm(v);
  if (n == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double r = std::min(std::tanh(n), kMaxNorm);
  const double f = r / n;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = f * v[i];
}

void logmap0(ConstVec x, Vec out) {
  const double n = norm(x);
  if (n == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double f = artanh(n) / n;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f * x[i];
}

void mobius_add(ConstVec x, ConstVec y, Vec out) {
  mobius_add_raw(x, y, out);
  project(out);
}

void mobius_scalar(double r, ConstVec x, Vec out) {
  const double n = norm(x);
  if (n == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double f = std::tanh(r * artanh(n)) / n;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f * x[i];
  project(out);
}

void mobius_matvec_diag(ConstVec diag, ConstVec x, Vec out) {
  const double nx = norm(x);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = diag[i] * x[i];
  const double nmx = norm(out);
  if (nx == 0.0 || nmx == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double f = std::tanh(nmx / nx * artanh(nx)) / nmx;
  for (double& v : out) v *= f;
  project(out);
}

double distance(ConstVec x, ConstVec y) {
  double diff = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) diff += (x[i] - y[i]) * (x[i] - y[i]);
  const double alpha = 1.0 - sq_norm(x);
  const double beta = 1.0 - sq_norm(y);
  // acosh(1 + w) with the argument clamped to >= 1.
  const double w = std::max(0.0, 2.0 * diff / (alpha * beta));
  return std::log1p(w + std::sqrt(w * (w + 2.0)));
}

void expmap0_backward(ConstVec v, ConstVec grad_out, Vec grad_v) {
  const double n = norm(v);
  double f;
  double fp_over_n;  // f'(n) / n
  if (n < kSeriesNorm) {
    const double n2 = n * n;
    f = 1.0 - n2 / 3.0 + 2.0 * n2 * n2 / 15.0;
    fp_over_n = -2.0 / 3.0 + 8.0 * n2 / 15.0;
  } else {
    const double t = std::tanh(n);
    if (t > kMaxNorm) {
      f = kMaxNorm / n;
      fp_over_n = -kMaxNorm / (n * n * n);
    } else {
      f = t / n;
      fp_over_n = ((1.0 - t * t) * n - t) / (n * n * n);
    }
  }
  const double vg = dot(v, grad_out);
  for (std::size_t i = 0; i < v.size(); ++i) grad_v[i] += f * grad_out[i] + fp_over_n * vg * v[i];
}

void logmap0_backward(ConstVec x, ConstVec grad_out, Vec grad_x) {
  const double n = norm(x);
  double f;
  double fp_over_n;
  if (n < kSeriesNorm) {
    const double n2 = n * n;
    f = 1.0 + n2 / 3.0 + n2 * n2 / 5.0;
    fp_over_n = 2.0 / 3.0 + 4.0 * n2 / 5.0;
  } else {
    const double a = artanh(n);
    f = a / n;
    fp_over_n = (n / (1.0 - n * n) - a) / (n * n * n);
  }
  const double xg = dot(x, grad_out);
  for (std::size_t i = 0; i < x.size(); ++i) grad_x[i] += f * grad_out[i] + fp_over_n * xg * x[i];
}

void mobius_add_backward(ConstVec x, ConstVec y, ConstVec grad_out, Vec grad_x, Vec grad_y) {
  const std::size_t d = x.size();
  auto& raw = scratch(0, d);
  auto& g = scratch(1, d);
  mobius_add_raw(x, y, raw);
  project_backward(raw, grad_out, g);

  const double xy = dot(x, y);
  const double xx = sq_norm(x);
  const double yy = sq_norm(y);
  const double a = 1.0 + 2.0 * xy + yy;
  const double b = 1.0 - xx;
  const double den = 1.0 + 2.0 * xy + xx * yy;

  // out = (a x + b y) / den
  double g_num_dot = 0.0;  // g . numerator
  double ga = 0.0;
  double gb = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    g_num_dot += g[i] * (a * x[i] + b * y[i]);
    ga += g[i] * x[i];
    gb += g[i] * y[i];
  }
  ga /= den;
  gb /= den;
  const double gden = -g_num_dot / (den * den);

  double gxy = 2.0 * ga + 2.0 * gden;
  double gxx = -gb + yy * gden;
  double gyy = ga + xx * gden;
  for (std::size_t i = 0; i < d; ++i) {
    grad_x[i] += a * g[i] / den + gxy * y[i] + 2.0 * gxx * x[i];
    grad_y[i] += b * g[i] / den + gxy * x[i] + 2.0 * gyy * y[i];
  }
}

void mobius_matvec_diag_backward(ConstVec diag, ConstVec x, ConstVec grad_out, Vec grad_diag,
                                 Vec grad_x) {
  // M (x) x == exp0(diag * log0(x)); differentiate the composition.
  const std::size_t d = x.size();
  auto& a = scratch(2, d);
  auto& b = scratch(3, d);
  logmap0(x, a);
  for (std::size_t i = 0; i < d; ++i) b[i] = diag[i] * a[i];
  if (norm(x) == 0.0 || norm(b) == 0.0) {
    // Output is pinned to the origin; use the linearisation exp0'(0) = log0'(0) = I.
    for (std::size_t i = 0; i < d; ++i) {
      grad_diag[i] += grad_out[i] * a[i];
      grad_x[i] += grad_out[i] * diag[i];
    }
    return;
  }
  auto& gb = scratch(4, d);
  expmap0_backward(b, grad_out, gb);
  for (std::size_t i = 0; i < d; ++i) {
    grad_diag[i] += gb[i] * a[i];
    gb[i] *= diag[i];
  }
  logmap0_backward(x, gb, grad_x);
}

double sq_distance_backward(ConstVec x, ConstVec y, double upstream, Vec grad_x, Vec grad_y) {
  const std::size_t dim = x.size();
  double diff = 0.0;
  for (std::size_t i = 0; i < dim; ++i) diff += (x[i] - y[i]) * (x[i] - y[i]);
  const double alpha = 1.0 - sq_norm(x);
  const double beta = 1.0 - sq_norm(y);
  const double w = std::max(0.0, 2.0 * diff / (alpha * beta));
  const double dist = std::log1p(w + std::sqrt(w * (w + 2.0)));
  // d(dist^2)/dw = 2 dist / sqrt(w (w + 2)), finite limit 2 at w = 0.
  const double dw = w < 1e-8 ? 2.0 * (1.0 - w / 3.0) : 2.0 * dist / std::sqrt(w * (w + 2.0));
  const double c = upstream * dw;
  const double k = 4.0 / (alpha * beta);
  const double kx = 4.0 * diff / (alpha * alpha * beta);
  const double ky = 4.0 * diff / (alpha * beta * beta);
  for (std::size_t i = 0; i < dim; ++i) {
    const double e = x[i] - y[i];
    grad_x[i] += c * (k * e + kx * x[i]);
    grad_y[i] += c * (-k * e + ky * y[i]);
  }
  return dist * dist;
}

}  // namespace hyprec::ball
