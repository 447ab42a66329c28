#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mlproxy/adam.hpp"
#include "mlproxy/dataset.hpp"
#include "mlproxy/encoder.hpp"
#include "mlproxy/labels.hpp"
#include "mlproxy/proxy_bank.hpp"

namespace mlproxy {

enum class LossKind { Proxy, MlProxyNca, Bce };

std::string_view to_string(LossKind kind);
// "proxy", "ml_proxy_nca", "bce"
LossKind parse_loss_kind(std::string_view text);

struct TrainConfig {
  std::size_t epochs = 50;
  double learning_rate = 1e-4;
  std::size_t batch_size = 48;
  double sigma = 0.7;
  std::size_t proxies_per_class = 2;
  bool use_negative_class = true;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  LossKind loss = LossKind::Proxy;
  std::vector<std::size_t> hidden_dims{64};
  std::size_t embedding_dim = 32;

  void validate() const;
  AdamConfig adam() const { return {learning_rate, beta1, beta2, adam_epsilon}; }
  std::vector<std::size_t> layer_dims(std::size_t input_dim) const;
  std::size_t class_total(std::size_t n_classes) const {
    return n_classes + (use_negative_class ? 1 : 0);
  }

  bool operator==(const TrainConfig&) const = default;
};

// Encoder plus either a proxy bank (proxy / ml_proxy_nca losses) or a linear
// classification head (bce baseline).
struct TrainedModel {
  std::size_t n_classes = 0;
  TrainConfig config;
  MlpEncoder encoder;
  std::optional<ProxyBank> proxies;
  std::optional<MlpEncoder> head;
  ClassWeights weights;
  std::vector<double> loss_curve;
  // Per-class decision thresholds over c_total scores; empty means 0.5.
  std::vector<double> thresholds;

  std::size_t class_total() const { return config.class_total(n_classes); }
  bool operator==(const TrainedModel&) const = default;
};

// Fresh parameters and class weights for `data`; what train() returns for 0 epochs.
TrainedModel initialize_model(const Dataset& data, const TrainConfig& config);

// Mini-batch training with Adam on encoder and proxy (or head) parameters.
// Batch loss is the mean of per-sample losses; the epoch order is a pure
// function of (seed, epoch). Samples without any positive class are skipped
// by the ml_proxy_nca loss.
TrainedModel train(const Dataset& data, const TrainConfig& config);

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch);

}  // namespace mlproxy
