#pragma once

// Allocation-free Poincare-ball kernels (curvature 1) on raw coordinate spans.
// Outputs may not alias inputs. Backward kernels accumulate (+=) into their
// gradient spans.

#include <span>

namespace hyprec::ball {

using ConstVec = std::span<const double>;
using Vec = std::span<double>;

inline constexpr double kBoundaryEps = 1e-5;
inline constexpr double kMaxNorm = 1.0 - kBoundaryEps;
inline constexpr double kArtanhLimit = 1.0 - 1e-15;

double dot(ConstVec a, ConstVec b);
double sq_norm(ConstVec a);
double norm(ConstVec a);

// artanh with its argument clamped to [-1 + 1e-15, 1 - 1e-15].
double artanh(double x);

// Rescales x in place to norm kMaxNorm if it lies outside the shrunken ball.
// Returns true when x was rescaled.
bool project(Vec x);

void expmap0(ConstVec v, Vec out);
void logmap0(ConstVec x, Vec out);
void mobius_add(ConstVec x, ConstVec y, Vec out);
void mobius_scalar(double r, ConstVec x, Vec out);
void mobius_matvec_diag(ConstVec diag, ConstVec x, Vec out);
double distance(ConstVec x, ConstVec y);

void expmap0_backward(ConstVec v, ConstVec grad_out, Vec grad_v);
void logmap0_backward(ConstVec x, ConstVec grad_out, Vec grad_x);
void mobius_add_backward(ConstVec x, ConstVec y, ConstVec grad_out, Vec grad_x, Vec grad_y);
void mobius_matvec_diag_backward(ConstVec diag, ConstVec x, ConstVec grad_out, Vec grad_diag,
                                 Vec grad_x);

// Returns d(x, y)^2 and accumulates upstream * d(d^2)/dx, d(d^2)/dy.
double sq_distance_backward(ConstVec x, ConstVec y, double upstream, Vec grad_x, Vec grad_y);

}  // namespace hyprec::ball
