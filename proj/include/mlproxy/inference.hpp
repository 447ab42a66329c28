#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mlproxy/dataset.hpp"
#include "mlproxy/labels.hpp"
#include "mlproxy/numerics.hpp"
#include "mlproxy/proxy_bank.hpp"
#include "mlproxy/trainer.hpp"

namespace mlproxy {

inline constexpr double kDefaultThreshold = 0.5;

// Unit-norm embedding of one feature vector.
RealVec embed(const TrainedModel& model, std::span<const double> features);

// score_j = max_i exp(-||v - p_ij||^2 / (2 sigma^2)), one score per class.
RealVec classify(std::span<const double> v_unit, const ProxySet& proxies);
RealVec classify(std::span<const double> v_unit, const ProxyBank& bank);

// c_total class scores in [0, 1]: proxy scores, or sigmoid(head) for the bce baseline.
RealVec class_scores(const TrainedModel& model, std::span<const double> features);

// pred_j = score_j > t_j.
std::vector<std::uint8_t> predict(std::span<const double> scores, std::span<const double> thresholds);

// Per-class threshold maximizing Youden's J (TPR - FPR) over the observed
// scores; uncertain labels are left out. Classes with a single ground-truth
// value keep kDefaultThreshold.
std::vector<double> calibrate_thresholds(const TrainedModel& model, const Dataset& validation);

struct IndexRow {
  std::string id;
  RealVec embedding;
  LabelVector labels;
};

// Immutable database of unit embeddings searched by exact linear scan.
class RetrievalIndex {
 public:
  RetrievalIndex() = default;
  // Validates ids, dims and unit norms.
  RetrievalIndex(std::vector<IndexRow> rows, std::size_t n_classes);

  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  std::size_t n_classes() const { return n_classes_; }
  std::size_t dim() const { return dim_; }
  const IndexRow& row(std::size_t i) const { return rows_[i]; }
  std::span<const IndexRow> rows() const { return rows_; }

 private:
  std::vector<IndexRow> rows_;
  std::size_t n_classes_ = 0;
  std::size_t dim_ = 0;
};

RetrievalIndex build_index(const TrainedModel& model, const Dataset& data);

struct RetrievedItem {
  std::size_t row = 0;
  std::string id;
  // Euclidean, not squared.
  double distance = 0.0;
  LabelVector labels;
};

using RetrievalResult = std::vector<RetrievedItem>;

// The min(k, |index|) nearest rows by Euclidean distance; ties by ascending id.
RetrievalResult retrieve(const RetrievalIndex& index, std::span<const double> query_unit, std::size_t k);

}  // namespace mlproxy
