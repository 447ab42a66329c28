#include "mlproxy/eval_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>
#include <unordered_set>

#include "mlproxy/error.hpp"

namespace mlproxy {

namespace {

void require_same_classes(const LabelVector& a, const LabelVector& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "label vectors differ in length");
}

std::size_t present_count(const LabelVector& y) {
  std::size_t n = 0;
  for (std::size_t j = 0; j < y.size(); ++j) n += y.present(j) ? 1 : 0;
  return n;
}

}  // namespace

std::string_view to_string(RelevanceMode mode) {
  return mode == RelevanceMode::Raw ? "raw" : "augmented";
}

RelevanceMode parse_relevance_mode(std::string_view text) {
  if (text == "raw") return RelevanceMode::Raw;
  if (text == "augmented") return RelevanceMode::Augmented;
  throw Error(ErrorCode::InvalidArgument, "mode must be 'raw' or 'augmented'");
}

int graded_relevance(const LabelVector& query, const LabelVector& retrieved, RelevanceMode mode) {
  require_same_classes(query, retrieved);
  int shared = 0;
  for (std::size_t j = 0; j < query.size(); ++j) shared += (query.present(j) && retrieved.present(j)) ? 1 : 0;
  if (mode == RelevanceMode::Augmented && query.all_negative() && retrieved.all_negative()) ++shared;
  return shared;
}

double graded_similarity(const LabelVector& query, const LabelVector& retrieved, RelevanceMode mode) {
  require_same_classes(query, retrieved);
  std::size_t denom = present_count(query);
  if (mode == RelevanceMode::Augmented && query.all_negative()) denom = 1;
  if (denom == 0) throw Error(ErrorCode::NoPositiveQueryLabels, "query has no positive label");
  return static_cast<double>(graded_relevance(query, retrieved, mode)) / static_cast<double>(denom);
}

double dcg(std::span<const int> relevances) {
  double total = 0.0;
  for (std::size_t n = 0; n < relevances.size(); ++n) {
    if (relevances[n] < 0) throw Error(ErrorCode::InvalidArgument, "relevance must be non-negative");
    total += (std::ldexp(1.0, relevances[n]) - 1.0) / std::log2(static_cast<double>(n) + 2.0);
  }
  return total;
}

double ndcg(const LabelVector& query, const RetrievalResult& retrieved, const RetrievalIndex& index,
            std::size_t k, RelevanceMode mode) {
  if (index.empty()) throw Error(ErrorCode::EmptyIndex, "retrieval index is empty");
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  std::vector<int> got;
  for (std::size_t n = 0; n < std::min(k, retrieved.size()); ++n) {
    got.push_back(graded_relevance(query, retrieved[n].labels, mode));
  }
  std::vector<int> ideal;
  ideal.reserve(index.size());
  for (const auto& row : index.rows()) ideal.push_back(graded_relevance(query, row.labels, mode));
  const std::size_t take = std::min(k, ideal.size());
  std::partial_sort(ideal.begin(), ideal.begin() + static_cast<std::ptrdiff_t>(take), ideal.end(),
                    std::greater<>());
  ideal.resize(take);
  const double best = dcg(ideal);
  if (best == 0.0) return 0.0;
  return dcg(got) / best;
}

double acg(std::span<const double> similarities) {
  if (similarities.empty()) return 0.0;
  return std::accumulate(similarities.begin(), similarities.end(), 0.0) /
         static_cast<double>(similarities.size());
}

double precision_at_k(std::span<const int> relevances) {
  if (relevances.empty()) return 0.0;
  const auto hits = std::count_if(relevances.begin(), relevances.end(), [](int r) { return r > 0; });
  return static_cast<double>(hits) / static_cast<double>(relevances.size());
}

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw Error(ErrorCode::DimensionMismatch, "scores/labels lengths differ");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t k = i;
    while (k < n && scores[order[k]] == scores[order[i]]) ++k;
    // ranks i+1 .. k share their mean
    const double midrank = 0.5 * static_cast<double>(i + 1 + k);
    for (std::size_t t = i; t < k; ++t) {
      if (labels[order[t]]) {
        pos_rank_sum += midrank;
        ++n_pos;
      }
    }
    i = k;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw Error(ErrorCode::SingleClassOnly, "AUC needs both classes");
  const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

EvalReport run_retrieval_eval(const TrainedModel& model, const RetrievalIndex& index,
                              const Dataset& queries, std::size_t k, RelevanceMode mode,
                              std::size_t threads) {
  if (index.empty()) throw Error(ErrorCode::EmptyIndex, "retrieval index is empty");
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  if (!queries.empty() && queries.n_classes != index.n_classes()) {
    throw Error(ErrorCode::DimensionMismatch, "query class count does not match the index");
  }
  queries.validate();

  EvalReport report;
  report.k = k;
  report.mode = mode;
  report.per_query.resize(queries.size());

  std::unordered_set<std::string> index_ids;
  for (const auto& row : index.rows()) index_ids.insert(row.id);
  for (const auto& q : queries.rows) report.overlapping_ids += index_ids.count(q.id);

  auto evaluate_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t qi = begin; qi < end; ++qi) {
      const Sample& q = queries.rows[qi];
      const RetrievalResult hits = retrieve(index, embed(model, q.features), k);
      std::vector<int> rel;
      for (const auto& h : hits) rel.push_back(graded_relevance(q.labels, h.labels, mode));
      QueryMetrics& out = report.per_query[qi];
      out.id = q.id;
      out.ndcg = ndcg(q.labels, hits, index, k, mode);
      out.precision = precision_at_k(rel);
      if (mode == RelevanceMode::Augmented || !q.labels.all_negative()) {
        std::vector<double> sim;
        for (const auto& h : hits) sim.push_back(graded_similarity(q.labels, h.labels, mode));
        out.acg = acg(sim);
      }
    }
  };

  threads = std::max<std::size_t>(1, std::min(threads, queries.size()));
  if (threads == 1) {
    evaluate_range(0, queries.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (queries.size() + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk, end = std::min(queries.size(), begin + chunk);
      if (begin < end) pool.emplace_back(evaluate_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  double sum_ndcg = 0.0, sum_prec = 0.0, sum_acg = 0.0;
  std::size_t n_acg = 0;
  for (const auto& q : report.per_query) {
    sum_ndcg += q.ndcg;
    sum_prec += q.precision;
    if (q.acg) {
      sum_acg += *q.acg;
      ++n_acg;
    } else {
      ++report.acg_skipped;
    }
  }
  if (!report.per_query.empty()) {
    const double nq = static_cast<double>(report.per_query.size());
    report.mean_ndcg = sum_ndcg / nq;
    report.mean_precision = sum_prec / nq;
  }
  if (n_acg > 0) report.mean_acg = sum_acg / static_cast<double>(n_acg);
  return report;
}

void add_classification_eval(EvalReport& report, const TrainedModel& model, const Dataset& queries) {
  const std::size_t c = model.n_classes;
  std::vector<RealVec> scores;
  scores.reserve(queries.size());
  for (const auto& q : queries.rows) scores.push_back(class_scores(model, q.features));

  report.class_auc.assign(c, std::nullopt);
  report.auc_excluded_classes.clear();
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t j = 0; j < c; ++j) {
    std::vector<double> s;
    std::vector<std::uint8_t> y;
    for (std::size_t n = 0; n < queries.size(); ++n) {
      const LabelState state = queries.rows[n].labels[j];
      if (state == LabelState::Uncertain) continue;
      s.push_back(scores[n][j]);
      y.push_back(state == LabelState::Positive ? 1 : 0);
    }
    try {
      report.class_auc[j] = roc_auc(s, y);
      sum += *report.class_auc[j];
      ++defined;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingleClassOnly) throw;
      report.auc_excluded_classes.push_back(j);
    }
  }
  report.macro_auc = defined ? std::optional<double>(sum / static_cast<double>(defined)) : std::nullopt;
}

}  // namespace mlproxy
