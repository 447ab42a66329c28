#include "mlproxy/losses.hpp"

#include <cmath>
#include <string>

#include "mlproxy/error.hpp"

namespace mlproxy {

namespace {

void check_inputs(std::span<const double> v, const AugmentedLabels& y, const ProxySet& proxies) {
  if (v.size() != proxies.d) {
    throw Error(ErrorCode::DimensionMismatch,
                "embedding has " + std::to_string(v.size()) + " dims, proxies have " +
                    std::to_string(proxies.d));
  }
  if (y.size() != proxies.c_total || y.mask.size() != proxies.c_total) {
    throw Error(ErrorCode::DimensionMismatch, "label vector does not match proxy class count");
  }
  if (std::abs(l2_norm(v) - 1.0) > kUnitTolerance) {
    throw Error(ErrorCode::NonUnitInput, "embedding is not unit norm");
  }
}

// Accumulates dL/dt_i for t_i = -||v - p_i||^2 / (2 sigma^2) into both gradients.
void push_kernel_grad(double dl_dt, std::span<const double> v, std::span<const double> p,
                      double inv_sigma2, std::span<double> grad_v, std::span<double> grad_p) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double diff = (v[k] - p[k]) * inv_sigma2 * dl_dt;
    grad_v[k] -= diff;
    grad_p[k] += diff;
  }
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

LossOutput multilabel_proxy_loss(std::span<const double> v, const AugmentedLabels& y,
                                 const ClassWeights& weights, const ProxySet& proxies) {
  check_inputs(v, y, proxies);
  if (weights.w_pos.size() != proxies.c_total || weights.w_neg.size() != proxies.c_total) {
    throw Error(ErrorCode::DimensionMismatch, "class weights do not match proxy class count");
  }
  const std::size_t m = proxies.m;
  const double inv_2s2 = 1.0 / (2.0 * proxies.sigma * proxies.sigma);
  const double inv_sigma2 = 2.0 * inv_2s2;

  LossOutput out;
  out.grad_embedding.assign(proxies.d, 0.0);
  out.grad_proxies.assign(proxies.rows.size(), 0.0);
  std::vector<double> t(m);

  for (std::size_t j = 0; j < proxies.c_total; ++j) {
    if (y.mask[j]) continue;
    for (std::size_t i = 0; i < m; ++i) t[i] = -sq_dist(v, proxies.row(i, j)) * inv_2s2;
    const double log_g = log_mean_exp(t);
    const double g = std::exp(log_g);

    if (y.bits[j]) {
      const double w = weights.w_pos[j];
      if (g < kProbClamp) {
        out.value -= w * std::log(kProbClamp);
        continue;
      }
      out.value -= w * log_g;
      // d(-w log g)/dt_i = -w a_i / (m g)
      for (std::size_t i = 0; i < m; ++i) {
        const double dl_dt = -w * std::exp(t[i] - log_g) / static_cast<double>(m);
        push_kernel_grad(dl_dt, v, proxies.row(i, j), inv_sigma2, out.grad_embedding,
                         std::span<double>(out.grad_proxies).subspan(proxies.offset(i, j), proxies.d));
      }
    } else {
      const double w = weights.w_neg[j];
      if (g > 1.0 - kProbClamp) {
        out.value -= w * std::log(kProbClamp);
        continue;
      }
      out.value -= w * std::log1p(-g);
      // d(-w log(1 - g))/dt_i = w a_i / (m (1 - g))
      for (std::size_t i = 0; i < m; ++i) {
        const double dl_dt = w * std::exp(t[i]) / (static_cast<double>(m) * (1.0 - g));
        push_kernel_grad(dl_dt, v, proxies.row(i, j), inv_sigma2, out.grad_embedding,
                         std::span<double>(out.grad_proxies).subspan(proxies.offset(i, j), proxies.d));
      }
    }
  }
  return out;
}

LossOutput multilabel_proxy_loss(std::span<const double> v_unit, const AugmentedLabels& y,
                                 const ClassWeights& weights, const ProxyBank& bank) {
  return multilabel_proxy_loss(v_unit, y, weights, normalized_view(bank).units());
}

LossOutput ml_proxy_nca_loss(std::span<const double> v, const AugmentedLabels& y,
                             const ProxySet& proxies) {
  check_inputs(v, y, proxies);
  if (proxies.m != 1) throw Error(ErrorCode::ShapeMismatch, "Proxy-NCA expects one proxy per class");
  const double inv_2s2 = 1.0 / (2.0 * proxies.sigma * proxies.sigma);

  std::vector<std::size_t> active;
  std::vector<double> t_all, t_pos;
  for (std::size_t j = 0; j < proxies.c_total; ++j) {
    if (y.mask[j]) continue;
    active.push_back(j);
    t_all.push_back(-sq_dist(v, proxies.row(0, j)) * inv_2s2);
    if (y.bits[j]) t_pos.push_back(t_all.back());
  }
  if (t_pos.empty()) throw Error(ErrorCode::NoPositiveLabel, "sample has no positive class");

  const double lse_all = log_sum_exp(t_all);
  const double lse_pos = log_sum_exp(t_pos);

  LossOutput out;
  out.value = lse_all - lse_pos;
  out.grad_embedding.assign(proxies.d, 0.0);
  out.grad_proxies.assign(proxies.rows.size(), 0.0);
  for (std::size_t a = 0; a < active.size(); ++a) {
    const std::size_t j = active[a];
    double dl_dt = std::exp(t_all[a] - lse_all);
    if (y.bits[j]) dl_dt -= std::exp(t_all[a] - lse_pos);
    push_kernel_grad(dl_dt, v, proxies.row(0, j), 2.0 * inv_2s2, out.grad_embedding,
                     std::span<double>(out.grad_proxies).subspan(proxies.offset(0, j), proxies.d));
  }
  return out;
}

LossOutput ml_proxy_nca_loss(std::span<const double> v_unit, const AugmentedLabels& y,
                             const ProxyBank& bank) {
  return ml_proxy_nca_loss(v_unit, y, normalized_view(bank).units());
}

BceOutput weighted_bce_loss(std::span<const double> logits, const AugmentedLabels& y,
                            const ClassWeights& weights) {
  const std::size_t c = logits.size();
  if (y.size() != c || y.mask.size() != c || weights.size() != c || weights.w_neg.size() != c) {
    throw Error(ErrorCode::DimensionMismatch, "logits, labels and weights differ in length");
  }
  BceOutput out;
  out.grad_logits.assign(c, 0.0);
  for (std::size_t j = 0; j < c; ++j) {
    if (y.mask[j]) continue;
    const double z = logits[j];
    if (y.bits[j]) {
      out.value += weights.w_pos[j] * softplus(-z);
      out.grad_logits[j] = weights.w_pos[j] * (sigmoid(z) - 1.0);
    } else {
      out.value += weights.w_neg[j] * softplus(z);
      out.grad_logits[j] = weights.w_neg[j] * sigmoid(z);
    }
  }
  return out;
}

}  // namespace mlproxy
