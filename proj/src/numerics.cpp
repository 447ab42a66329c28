#include "mlproxy/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mlproxy/error.hpp"

namespace mlproxy {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidSigma: return "InvalidSigma";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonUnitInput: return "NonUnitInput";
    case ErrorCode::NoPositiveLabel: return "NoPositiveLabel";
    case ErrorCode::NoPositiveQueryLabels: return "NoPositiveQueryLabels";
    case ErrorCode::SingleClassOnly: return "SingleClassOnly";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

void require_same_size(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Normalized l2_normalize(std::span<const double> v) {
  const double norm = l2_norm(v);
  if (!(norm >= kZeroNormThreshold)) {
    throw Error(ErrorCode::ZeroVector, "cannot normalize vector with norm " + std::to_string(norm));
  }
  Normalized out;
  out.norm = norm;
  out.unit.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.unit[i] = v[i] / norm;
  return out;
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
  require_same_size(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

double gaussian_kernel(double d2, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidSigma, "sigma must be positive");
  if (d2 < 0.0) throw Error(ErrorCode::InvalidArgument, "squared distance must be non-negative");
  return std::exp(-d2 / (2.0 * sigma * sigma));
}

double log_sum_exp(std::span<const double> terms) {
  if (terms.empty()) throw Error(ErrorCode::EmptyInput, "log_sum_exp of no terms");
  const double peak = *std::max_element(terms.begin(), terms.end());
  if (terms.size() == 1 || std::isinf(peak)) return peak;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - peak);
  return peak + std::log(s);
}

double log_mean_exp(std::span<const double> terms) {
  if (terms.empty()) throw Error(ErrorCode::EmptyInput, "log_mean_exp of no terms");
  if (terms.size() == 1) return terms[0];
  return log_sum_exp(terms) - std::log(static_cast<double>(terms.size()));
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

RealVec finite_diff_grad(const ScalarFn& f, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  RealVec probe(x.begin(), x.end());
  RealVec grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + h;
    const double up = f(probe);
    probe[i] = orig - h;
    const double down = f(probe);
    probe[i] = orig;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double relative_error(std::span<const double> a, std::span<const double> b) {
  require_same_size(a, b);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += (a[i] - b[i]) * (a[i] - b[i]);
  diff = std::sqrt(diff);
  const double scale = std::max({l2_norm(a), l2_norm(b), 1e-8});
  return diff / scale;
}

}  // namespace mlproxy

namespace mlproxy {

RealVec normalize_backprop(std::span<const double> unit, double norm, std::span<const double> grad_unit) {
  const double radial = dot(grad_unit, unit);
  RealVec out(unit.size());
  for (std::size_t k = 0; k < unit.size(); ++k) out[k] = (grad_unit[k] - radial * unit[k]) / norm;
  return out;
}

}  // namespace mlproxy
