#pragma once

#include <span>
#include <vector>

#include "mlproxy/labels.hpp"
#include "mlproxy/numerics.hpp"
#include "mlproxy/proxy_bank.hpp"

namespace mlproxy {

// Loss value with gradients w.r.t. the unit embedding and the unit proxy
// rows. grad_proxies has the (m, c_total, d) layout of ProxySet::rows; use
// NormalizedProxies::backprop to reach the raw bank parameters.
struct LossOutput {
  double value = 0.0;
  RealVec grad_embedding;
  std::vector<double> grad_proxies;
};

inline constexpr double kProbClamp = 1e-7;
inline constexpr double kUnitTolerance = 1e-6;

// Weighted multi-label proxy loss
//   L = sum_j [ -w+_j y_j log g_j - w-_j (1 - y_j) log(1 - g_j) ]
//   g_j = (1/m) sum_i exp(-||v - p_ij||^2 / (2 sigma^2))
// over unmasked classes. g_j is clamped away from the singular end of the
// active log term (g >= eps when y_j = 1, g <= 1 - eps when y_j = 0); the
// gradient is zero while the clamp is active.
LossOutput multilabel_proxy_loss(std::span<const double> v_unit, const AugmentedLabels& y,
                                 const ClassWeights& weights, const ProxySet& proxies);
LossOutput multilabel_proxy_loss(std::span<const double> v_unit, const AugmentedLabels& y,
                                 const ClassWeights& weights, const ProxyBank& bank);

// Multi-label Proxy-NCA baseline, one proxy per class:
//   L = -log( sum_i y_i a_i / sum_j a_j ),  a_i = exp(-||v - p_i||^2 / (2 sigma^2)).
// Masked classes are left out of both sums. Throws NoPositiveLabel when no
// unmasked class is positive.
LossOutput ml_proxy_nca_loss(std::span<const double> v_unit, const AugmentedLabels& y,
                             const ProxySet& proxies);
LossOutput ml_proxy_nca_loss(std::span<const double> v_unit, const AugmentedLabels& y,
                             const ProxyBank& bank);

struct BceOutput {
  double value = 0.0;
  RealVec grad_logits;
};

// Per-class weighted binary cross entropy on sigmoid(logits), masked classes skipped.
BceOutput weighted_bce_loss(std::span<const double> logits, const AugmentedLabels& y,
                            const ClassWeights& weights);

}  // namespace mlproxy
