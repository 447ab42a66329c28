#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlproxy/dataset.hpp"
#include "mlproxy/inference.hpp"
#include "mlproxy/labels.hpp"
#include "mlproxy/trainer.hpp"

namespace mlproxy {

// Raw: relevance counts shared present classes (Uncertain counts as present).
// Augmented: additionally, two samples with no present class share the
// implicit negative class.
enum class RelevanceMode { Raw, Augmented };

std::string_view to_string(RelevanceMode mode);
RelevanceMode parse_relevance_mode(std::string_view text);

int graded_relevance(const LabelVector& query, const LabelVector& retrieved, RelevanceMode mode);

// Shared present classes over the query's present classes. Throws
// NoPositiveQueryLabels for an all-negative query in raw mode.
double graded_similarity(const LabelVector& query, const LabelVector& retrieved, RelevanceMode mode);

/// sum_n (2^{r_n} - 1) / log2(n + 1), n counted from 1.
double dcg(std::span<const int> relevances);

/// DCG of `retrieved` over the DCG of the best top-k ordering of the whole
/// index; 0 when no index row is relevant.
double ndcg(const LabelVector& query, const RetrievalResult& retrieved, const RetrievalIndex& index,
            std::size_t k, RelevanceMode mode);

double acg(std::span<const double> similarities);
double precision_at_k(std::span<const int> relevances);

// Mann-Whitney AUC with midranks. Throws SingleClassOnly unless both
// classes are present.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct QueryMetrics {
  std::string id;
  double ndcg = 0.0;
  std::optional<double> acg;
  double precision = 0.0;
};

struct EvalReport {
  std::size_t k = 0;
  RelevanceMode mode = RelevanceMode::Raw;
  std::vector<QueryMetrics> per_query;
  double mean_ndcg = 0.0;
  std::optional<double> mean_acg;
  double mean_precision = 0.0;
  std::size_t acg_skipped = 0;
  std::size_t overlapping_ids = 0;

  // One entry per disease class; absent when the class has a single ground truth value.
  std::vector<std::optional<double>> class_auc;
  std::optional<double> macro_auc;
  std::vector<std::size_t> auc_excluded_classes;

  std::string model_id;
  std::string dataset_id;
  std::uint64_t seed = 0;
};

// Retrieval metrics for every query; means are taken in query order.
// threads > 1 splits the queries into contiguous chunks.
EvalReport run_retrieval_eval(const TrainedModel& model, const RetrievalIndex& index,
                              const Dataset& queries, std::size_t k, RelevanceMode mode,
                              std::size_t threads = 1);

// Fills the per-class and macro AUC over the c disease classes; uncertain
// labels are left out of their class.
void add_classification_eval(EvalReport& report, const TrainedModel& model, const Dataset& queries);

}  // namespace mlproxy
