#include "mlproxy/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mlproxy/error.hpp"
#include "mlproxy/losses.hpp"
#include "mlproxy/random.hpp"

namespace mlproxy {

namespace {

enum SeedStream : std::uint64_t { kEncoderStream = 100, kProxyStream = 101, kHeadStream = 102, kShuffleStream = 103 };

struct BatchGrads {
  std::vector<double> encoder;
  std::vector<double> proxies;
  std::vector<double> head;
};

}  // namespace

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Proxy: return "proxy";
    case LossKind::MlProxyNca: return "ml_proxy_nca";
    case LossKind::Bce: return "bce";
  }
  return "proxy";
}

LossKind parse_loss_kind(std::string_view text) {
  if (text == "proxy") return LossKind::Proxy;
  if (text == "ml_proxy_nca") return LossKind::MlProxyNca;
  if (text == "bce") return LossKind::Bce;
  throw Error(ErrorCode::InvalidConfig, "loss: unknown loss '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error(ErrorCode::InvalidConfig, field + ": " + why);
  };
  if (!(learning_rate > 0.0)) fail("learning_rate", "must be positive");
  if (batch_size == 0) fail("batch_size", "must be positive");
  if (!(sigma > 0.0)) fail("sigma", "must be positive");
  if (proxies_per_class == 0) fail("proxies_per_class", "must be at least 1");
  if (!(beta1 > 0.0 && beta1 < 1.0)) fail("beta1", "must lie in (0, 1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) fail("beta2", "must lie in (0, 1)");
  if (!(adam_epsilon > 0.0)) fail("adam_epsilon", "must be positive");
  if (embedding_dim == 0) fail("embedding_dim", "must be positive");
  for (std::size_t h : hidden_dims) {
    if (h == 0) fail("hidden_dims", "widths must be positive");
  }
  if (loss == LossKind::MlProxyNca && proxies_per_class != 1) {
    fail("proxies_per_class", "ml_proxy_nca uses exactly one proxy per class");
  }
}

std::vector<std::size_t> TrainConfig::layer_dims(std::size_t input_dim) const {
  std::vector<std::size_t> dims{input_dim};
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(embedding_dim);
  return dims;
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(derive_seed(seed, kShuffleStream), epoch));
  rng.shuffle(order.begin(), order.end());
  return order;
}

TrainedModel initialize_model(const Dataset& data, const TrainConfig& config) {
  config.validate();
  if (data.empty()) throw Error(ErrorCode::EmptyDataset, "training set is empty");
  data.validate();

  std::vector<AugmentedLabels> labels;
  labels.reserve(data.size());
  for (const auto& row : data.rows) labels.push_back(augment(row.labels, config.use_negative_class));

  TrainedModel model{
      .n_classes = data.n_classes,
      .config = config,
      .encoder = MlpEncoder::init(config.layer_dims(data.input_dim), derive_seed(config.seed, kEncoderStream)),
      .proxies = std::nullopt,
      .head = std::nullopt,
      .weights = compute_class_weights(labels),
      .loss_curve = {},
      .thresholds = {},
  };
  const std::size_t c_total = config.class_total(data.n_classes);
  if (config.loss == LossKind::Bce) {
    model.head = MlpEncoder::init({config.embedding_dim, c_total}, derive_seed(config.seed, kHeadStream));
  } else {
    model.proxies = ProxyBank::init_random(config.proxies_per_class, c_total, config.embedding_dim,
                                           derive_seed(config.seed, kProxyStream), config.sigma);
  }
  return model;
}

TrainedModel train(const Dataset& data, const TrainConfig& config) {
  TrainedModel model = initialize_model(data, config);
  const std::size_t n = data.size();

  std::vector<AugmentedLabels> labels;
  labels.reserve(n);
  for (const auto& row : data.rows) labels.push_back(augment(row.labels, config.use_negative_class));

  const AdamConfig adam = config.adam();
  AdamState encoder_state(model.encoder.parameters().size());
  AdamState proxy_state(model.proxies ? model.proxies->params().size() : 0);
  AdamState head_state(model.head ? model.head->parameters().size() : 0);

  BatchGrads grads;
  ForwardTrace trace, head_trace;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = epoch_order(n, config.seed, epoch);
    double epoch_loss = 0.0;
    std::size_t epoch_count = 0;

    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      grads.encoder.assign(model.encoder.parameters().size(), 0.0);
      grads.proxies.assign(model.proxies ? model.proxies->params().size() : 0, 0.0);
      grads.head.assign(model.head ? model.head->parameters().size() : 0, 0.0);

      std::optional<NormalizedProxies> view;
      if (model.proxies) view.emplace(*model.proxies);

      std::size_t used = 0;
      double batch_loss = 0.0;
      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t idx = order[b];
        const AugmentedLabels& y = labels[idx];
        if (config.loss == LossKind::MlProxyNca && !y.any_positive()) continue;

        const RealVec raw = model.encoder.forward(data.rows[idx].features, trace);
        RealVec grad_raw;
        if (config.loss == LossKind::Bce) {
          const RealVec logits = model.head->forward(raw, head_trace);
          const BceOutput out = weighted_bce_loss(logits, y, model.weights);
          batch_loss += out.value;
          grad_raw = model.head->backward(head_trace, out.grad_logits, grads.head);
        } else {
          const Normalized v = l2_normalize(raw);
          const LossOutput out = config.loss == LossKind::Proxy
                                     ? multilabel_proxy_loss(v.unit, y, model.weights, view->units())
                                     : ml_proxy_nca_loss(v.unit, y, view->units());
          batch_loss += out.value;
          for (std::size_t k = 0; k < grads.proxies.size(); ++k) grads.proxies[k] += out.grad_proxies[k];
          grad_raw = normalize_backprop(v.unit, v.norm, out.grad_embedding);
        }
        model.encoder.backward(trace, grad_raw, grads.encoder);
        ++used;
      }
      if (used == 0) continue;

      const double scale = 1.0 / static_cast<double>(used);
      for (double& g : grads.encoder) g *= scale;
      adam_step(model.encoder.mutable_parameters(), grads.encoder, encoder_state, adam);
      if (model.proxies) {
        for (double& g : grads.proxies) g *= scale;
        const auto raw_grads = view->backprop(grads.proxies);
        adam_step(model.proxies->mutable_params(), raw_grads, proxy_state, adam);
      }
      if (model.head) {
        for (double& g : grads.head) g *= scale;
        adam_step(model.head->mutable_parameters(), grads.head, head_state, adam);
      }
      epoch_loss += batch_loss;
      epoch_count += used;
    }
    model.loss_curve.push_back(epoch_count ? epoch_loss / static_cast<double>(epoch_count) : 0.0);
  }
  return model;
}

}  // namespace mlproxy
