#include "mlproxy/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "mlproxy/error.hpp"
#include "mlproxy/losses.hpp"

namespace mlproxy {

RealVec embed(const TrainedModel& model, std::span<const double> features) {
  return l2_normalize(model.encoder.forward(features)).unit;
}

RealVec classify(std::span<const double> v, const ProxySet& proxies) {
  if (v.size() != proxies.d) throw Error(ErrorCode::DimensionMismatch, "embedding/proxy dims differ");
  if (std::abs(l2_norm(v) - 1.0) > kUnitTolerance) {
    throw Error(ErrorCode::NonUnitInput, "embedding is not unit norm");
  }
  RealVec scores(proxies.c_total);
  for (std::size_t j = 0; j < proxies.c_total; ++j) {
    double nearest = INFINITY;
    for (std::size_t i = 0; i < proxies.m; ++i) nearest = std::min(nearest, sq_dist(v, proxies.row(i, j)));
    scores[j] = gaussian_kernel(nearest, proxies.sigma);
  }
  return scores;
}

RealVec classify(std::span<const double> v_unit, const ProxyBank& bank) {
  return classify(v_unit, normalized_view(bank).units());
}

RealVec class_scores(const TrainedModel& model, std::span<const double> features) {
  const RealVec raw = model.encoder.forward(features);
  if (model.head) {
    RealVec logits = model.head->forward(raw);
    for (double& z : logits) z = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    return logits;
  }
  if (!model.proxies) throw Error(ErrorCode::InvalidArgument, "model has neither proxies nor head");
  return classify(l2_normalize(raw).unit, *model.proxies);
}

std::vector<std::uint8_t> predict(std::span<const double> scores, std::span<const double> thresholds) {
  if (scores.size() != thresholds.size()) {
    throw Error(ErrorCode::DimensionMismatch, "scores and thresholds differ in length");
  }
  std::vector<std::uint8_t> out(scores.size());
  for (std::size_t j = 0; j < scores.size(); ++j) out[j] = scores[j] > thresholds[j] ? 1 : 0;
  return out;
}

std::vector<double> calibrate_thresholds(const TrainedModel& model, const Dataset& validation) {
  const std::size_t c_total = model.class_total();
  std::vector<RealVec> scores;
  std::vector<AugmentedLabels> labels;
  for (const auto& row : validation.rows) {
    scores.push_back(class_scores(model, row.features));
    labels.push_back(augment(row.labels, model.config.use_negative_class));
  }
  std::vector<double> thresholds(c_total, kDefaultThreshold);
  for (std::size_t j = 0; j < c_total; ++j) {
    std::vector<std::pair<double, bool>> pairs;
    std::size_t n_pos = 0;
    for (std::size_t n = 0; n < scores.size(); ++n) {
      if (labels[n].mask[j]) continue;
      pairs.emplace_back(scores[n][j], labels[n].bits[j] != 0);
      n_pos += labels[n].bits[j] ? 1 : 0;
    }
    const std::size_t n_neg = pairs.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) continue;
    // Descending scores; a threshold just below a run of equal scores admits the whole run.
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    double best_j = -INFINITY;
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < pairs.size();) {
      std::size_t k = i;
      while (k < pairs.size() && pairs[k].first == pairs[i].first) {
        (pairs[k].second ? tp : fp) += 1;
        ++k;
      }
      const double youden = static_cast<double>(tp) / static_cast<double>(n_pos) -
                            static_cast<double>(fp) / static_cast<double>(n_neg);
      if (youden > best_j) {
        best_j = youden;
        // Strict comparison in predict(): place t midway to the next lower score.
        const double next = k < pairs.size() ? pairs[k].first : 0.0;
        thresholds[j] = 0.5 * (pairs[i].first + next);
      }
      i = k;
    }
  }
  return thresholds;
}

RetrievalIndex::RetrievalIndex(std::vector<IndexRow> rows, std::size_t n_classes)
    : rows_(std::move(rows)), n_classes_(n_classes) {
  std::unordered_set<std::string> ids;
  for (const auto& r : rows_) {
    if (!ids.insert(r.id).second) throw Error(ErrorCode::InvalidArgument, "duplicate index id '" + r.id + "'");
    if (dim_ == 0) dim_ = r.embedding.size();
    if (r.embedding.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "index embedding dims differ");
    if (r.labels.size() != n_classes_) throw Error(ErrorCode::DimensionMismatch, "index label length mismatch");
    if (std::abs(l2_norm(r.embedding) - 1.0) > kUnitTolerance) {
      throw Error(ErrorCode::NonUnitInput, "index embedding '" + r.id + "' is not unit norm");
    }
  }
}

RetrievalIndex build_index(const TrainedModel& model, const Dataset& data) {
  if (!data.empty() && data.input_dim != model.encoder.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "dataset feature dim does not match the encoder");
  }
  if (!data.empty() && data.n_classes != model.n_classes) {
    throw Error(ErrorCode::DimensionMismatch, "dataset class count does not match the model");
  }
  data.validate();
  std::vector<IndexRow> rows;
  rows.reserve(data.size());
  for (const auto& s : data.rows) rows.push_back({s.id, embed(model, s.features), s.labels});
  return RetrievalIndex(std::move(rows), model.n_classes);
}

RetrievalResult retrieve(const RetrievalIndex& index, std::span<const double> q, std::size_t k) {
  if (index.empty()) throw Error(ErrorCode::EmptyIndex, "retrieval index is empty");
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  if (q.size() != index.dim()) throw Error(ErrorCode::DimensionMismatch, "query dim does not match index");

  std::vector<double> d2(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) d2[i] = sq_dist(q, index.row(i).embedding);
  std::vector<std::size_t> order(index.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(k, index.size());
  auto closer = [&](std::size_t a, std::size_t b) {
    if (d2[a] != d2[b]) return d2[a] < d2[b];
    return index.row(a).id < index.row(b).id;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), closer);

  RetrievalResult out;
  out.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    const auto& row = index.row(order[r]);
    out.push_back({order[r], row.id, std::sqrt(d2[order[r]]), row.labels});
  }
  return out;
}

}  // namespace mlproxy
