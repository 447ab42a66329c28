#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mlproxy {

using RealVec = std::vector<double>;

inline constexpr double kZeroNormThreshold = 1e-12;

struct Normalized {
  RealVec unit;
  double norm = 0.0;
};

// Throws ZeroVector when the norm is below kZeroNormThreshold.
Normalized l2_normalize(std::span<const double> v);

double dot(std::span<const double> a, std::span<const double> b);
double sq_dist(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);

/// exp(-d2 / (2 sigma^2)), the proximity between a sample and a proxy.
double gaussian_kernel(double d2, double sigma);

/// log((1/m) * sum exp(t_i)) evaluated with a max shift.
double log_mean_exp(std::span<const double> terms);
double log_sum_exp(std::span<const double> terms);

bool all_finite(std::span<const double> v);

using ScalarFn = std::function<double(std::span<const double>)>;

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every coordinate.
RealVec finite_diff_grad(const ScalarFn& f, std::span<const double> x, double h = 1e-5);

/// ||a - b|| / max(||a||, ||b||), or the absolute difference when both are ~0.
double relative_error(std::span<const double> a, std::span<const double> b);

}  // namespace mlproxy

namespace mlproxy {

// Pulls a gradient w.r.t. u = v / ||v|| back to v: (g - (g.u) u) / ||v||.
RealVec normalize_backprop(std::span<const double> unit, double norm, std::span<const double> grad_unit);

}  // namespace mlproxy
