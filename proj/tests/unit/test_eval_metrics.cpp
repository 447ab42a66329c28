#include <cmath>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "mlproxy/eval_metrics.hpp"
#include "mlproxy/trainer.hpp"
#include "oracles.hpp"

namespace mlproxy {
namespace {

constexpr auto P = LabelState::Positive;
constexpr auto N = LabelState::Negative;
constexpr auto U = LabelState::Uncertain;

std::vector<double> at(double theta) { return {std::cos(theta), std::sin(theta)}; }

TEST(GradedRelevance, Examples) {
  EXPECT_EQ(graded_relevance(LabelVector({P, P, N}), LabelVector({P, N, N}), RelevanceMode::Raw), 1);
  EXPECT_EQ(graded_relevance(LabelVector({U, N}), LabelVector({P, N}), RelevanceMode::Raw), 1);
  EXPECT_EQ(graded_relevance(LabelVector({N, N}), LabelVector({N, N}), RelevanceMode::Augmented), 1);
  EXPECT_EQ(graded_relevance(LabelVector({N, N}), LabelVector({N, N}), RelevanceMode::Raw), 0);
  EXPECT_EQ(graded_relevance(LabelVector({N, N}), LabelVector({N, P}), RelevanceMode::Augmented), 0);
  EXPECT_ERROR_CODE(graded_relevance(LabelVector({N}), LabelVector({N, P}), RelevanceMode::Raw),
                    ErrorCode::DimensionMismatch);
}

TEST(GradedSimilarity, Examples) {
  EXPECT_EQ(graded_similarity(LabelVector({P, N, P}), LabelVector({P, N, U}), RelevanceMode::Raw), 1.0);
  EXPECT_EQ(graded_similarity(LabelVector({P, P, N}), LabelVector({N, P, P}), RelevanceMode::Raw), 0.5);
  EXPECT_EQ(graded_similarity(LabelVector({N, N}), LabelVector({N, N}), RelevanceMode::Augmented), 1.0);
  EXPECT_EQ(graded_similarity(LabelVector({N, N}), LabelVector({P, N}), RelevanceMode::Augmented), 0.0);
  EXPECT_ERROR_CODE(graded_similarity(LabelVector({N, N}), LabelVector({P, N}), RelevanceMode::Raw),
                    ErrorCode::NoPositiveQueryLabels);
}

TEST(GradedSimilarity, MatchesBitsetOracle) {
  Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    const std::size_t c = 1 + rng.index(8);
    auto q = testing::random_labels(rng, c, 0.5, 0.1);
    if (q.all_negative()) continue;
    const auto r = testing::random_labels(rng, c, 0.5, 0.1);
    EXPECT_DOUBLE_EQ(graded_similarity(q, r, RelevanceMode::Raw), testing::bitset_similarity(q, r));
  }
}

TEST(Dcg, Examples) {
  EXPECT_EQ(dcg(std::vector<int>{0, 0, 0}), 0.0);
  EXPECT_EQ(dcg(std::vector<int>{1}), 1.0);
  EXPECT_NEAR(dcg(std::vector<int>{3, 1, 0}), 7.0 + 1.0 / std::log2(3.0), 1e-12);
  EXPECT_NEAR(dcg(std::vector<int>{3, 1, 0}), 7.6309, 5e-5);
  EXPECT_ERROR_CODE(dcg(std::vector<int>{-1}), ErrorCode::InvalidArgument);
}

// Two-row index where row "a" shares one class with the query and "b" shares two.
RetrievalIndex two_row_index() {
  return RetrievalIndex({{"a", at(0.0), LabelVector({P, N})}, {"b", at(1.0), LabelVector({P, P})}}, 2);
}

TEST(Ndcg, Examples) {
  const auto index = two_row_index();
  const LabelVector q({P, P});
  const auto worst = retrieve(index, at(0.0), 2);
  const auto best = retrieve(index, at(1.0), 2);
  EXPECT_NEAR(ndcg(q, best, index, 2, RelevanceMode::Raw), 1.0, 1e-15);
  const double expected = (1.0 + 3.0 / std::log2(3.0)) / (3.0 + 1.0 / std::log2(3.0));
  EXPECT_NEAR(ndcg(q, worst, index, 2, RelevanceMode::Raw), expected, 1e-12);
  EXPECT_NEAR(ndcg(q, worst, index, 2, RelevanceMode::Raw), 0.7967, 5e-5);
  EXPECT_EQ(ndcg(LabelVector({N, N}), worst, index, 2, RelevanceMode::Raw), 0.0);
  EXPECT_ERROR_CODE(ndcg(q, worst, RetrievalIndex({}, 2), 2, RelevanceMode::Raw), ErrorCode::EmptyIndex);
}

TEST(Ndcg, IdealUsesWholeIndex) {
  // The only relevant row lies outside the top-1 result.
  const auto index = two_row_index();
  const LabelVector q({N, P});
  const auto top1 = retrieve(index, at(0.0), 1);
  EXPECT_EQ(ndcg(q, top1, index, 1, RelevanceMode::Raw), 0.0);
}

TEST(Ndcg, MatchesFullSortOracle) {
  Rng rng(41);
  for (int t = 0; t < 100; ++t) {
    const std::size_t c = 1 + rng.index(5);
    const auto index = testing::random_index(rng, 1 + rng.index(50), 3, c, true);
    const auto q = testing::random_labels(rng, c, 0.5, 0.1);
    const std::size_t k = 1 + rng.index(10);
    const auto mode = t % 2 ? RelevanceMode::Raw : RelevanceMode::Augmented;
    const auto hits = retrieve(index, testing::random_unit(rng, 3), k);
    std::vector<int> rel, all;
    for (const auto& h : hits) rel.push_back(graded_relevance(q, h.labels, mode));
    for (const auto& r : index.rows()) all.push_back(graded_relevance(q, r.labels, mode));
    EXPECT_NEAR(ndcg(q, hits, index, k, mode), testing::naive_ndcg(rel, all, k), 1e-10);
  }
}

TEST(Acg, Examples) {
  EXPECT_EQ(acg(std::vector<double>{1.0, 0.5}), 0.75);
  EXPECT_EQ(acg(std::vector<double>{0.0, 0.0}), 0.0);
  Rng rng(2);
  std::vector<double> s(17);
  double sum = 0.0;
  for (double& x : s) sum += (x = rng.uniform());
  EXPECT_NEAR(acg(s), sum / 17.0, 1e-15);
}

TEST(Precision, Examples) {
  EXPECT_DOUBLE_EQ(precision_at_k(std::vector<int>{1, 2, 0, 1, 3, 0, 1, 1, 0, 2}), 0.7);
  EXPECT_EQ(precision_at_k(std::vector<int>{1, 1, 4}), 1.0);
  Rng rng(3);
  std::vector<int> r(23);
  double hits = 0;
  for (int& x : r) hits += (x = static_cast<int>(rng.index(3))) > 0;
  EXPECT_DOUBLE_EQ(precision_at_k(r), hits / 23.0);
}

TEST(RocAuc, Examples) {
  const std::vector<double> s{0.9, 0.8, 0.3, 0.2};
  EXPECT_EQ(roc_auc(s, std::vector<std::uint8_t>{1, 1, 0, 0}), 1.0);
  EXPECT_EQ(roc_auc(s, std::vector<std::uint8_t>{1, 0, 1, 0}), 0.75);
  EXPECT_EQ(testing::pairwise_auc(s, {1, 0, 1, 0}), 0.75);
  EXPECT_EQ(roc_auc(std::vector<double>(5, 0.4), std::vector<std::uint8_t>{1, 0, 0, 1, 0}), 0.5);
}

TEST(RocAuc, MatchesPairwiseOracleWithTies) {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.index(40);
    std::vector<double> s(n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.index(6)) / 5.0;
      y[i] = i < 2 ? static_cast<std::uint8_t>(i) : static_cast<std::uint8_t>(rng.bernoulli(0.5));
    }
    EXPECT_NEAR(roc_auc(s, y), testing::pairwise_auc(s, y), 1e-12);
  }
}

TEST(RocAuc, Errors) {
  EXPECT_ERROR_CODE(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<std::uint8_t>{1, 1}), ErrorCode::SingleClassOnly);
  EXPECT_ERROR_CODE(roc_auc(std::vector<double>{0.1}, std::vector<std::uint8_t>{1, 0}), ErrorCode::DimensionMismatch);
}

// Identity encoder on the plane with one proxy per class.
TrainedModel planar_model() {
  TrainConfig cfg;
  cfg.use_negative_class = false;
  cfg.hidden_dims = {};
  cfg.embedding_dim = 2;
  cfg.proxies_per_class = 1;
  return TrainedModel{2, cfg, MlpEncoder({2, 2}, {1, 0, 0, 1, 0, 0}), ProxyBank(1, 2, 2, 0.7, {1.0, 0.0, 0.0, 1.0}),
                      std::nullopt, {}, {}, {}};
}

Dataset planar(std::vector<std::pair<double, LabelVector>> rows, const std::string& prefix) {
  Dataset d;
  d.n_classes = 2;
  d.input_dim = 2;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d.rows.push_back({prefix + std::to_string(i), at(rows[i].first), rows[i].second});
  }
  return d;
}

TEST(RunRetrievalEval, ToyMeansMatchHandComputation) {
  const auto model = planar_model();
  const auto db = planar({{0.0, LabelVector({P, N})}, {0.4, LabelVector({P, P})}, {1.2, LabelVector({N, P})},
                          {2.0, LabelVector({N, N})}, {3.0, LabelVector({N, N})}},
                         "d");
  const auto queries = planar({{0.1, LabelVector({P, N})}, {0.5, LabelVector({P, P})}, {1.4, LabelVector({N, P})},
                               {2.6, LabelVector({N, N})}, {-0.2, LabelVector({U, P})}},
                              "q");
  const auto index = build_index(model, db);
  const auto report = run_retrieval_eval(model, index, queries, 2, RelevanceMode::Raw);

  // Top-2 lists by angle: q0 {d0,d1}, q1 {d1,d0}, q2 {d2,d3}, q3 {d4,d3}, q4 {d0,d1}.
  const double l3 = std::log2(3.0);
  const std::vector<double> ndcg_want{(1 + 1 / l3) / (1 + 1 / l3), (3 + 1 / l3) / (3 + 1 / l3),
                                      1.0 / (1 + 1 / l3), 0.0, (1 + 3 / l3) / (3 + 1 / l3)};
  const std::vector<double> prec_want{1.0, 1.0, 0.5, 0.0, 1.0};
  const std::vector<double> acg_want{1.0, 0.75, 0.5, -1.0, 0.75};
  ASSERT_EQ(report.per_query.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(report.per_query[i].ndcg, ndcg_want[i], 1e-12) << i;
    EXPECT_DOUBLE_EQ(report.per_query[i].precision, prec_want[i]) << i;
    if (acg_want[i] < 0) {
      EXPECT_FALSE(report.per_query[i].acg.has_value());
    } else {
      EXPECT_DOUBLE_EQ(*report.per_query[i].acg, acg_want[i]) << i;
    }
  }
  EXPECT_NEAR(report.mean_ndcg, (ndcg_want[0] + ndcg_want[1] + ndcg_want[2] + ndcg_want[4]) / 5.0, 1e-12);
  EXPECT_DOUBLE_EQ(report.mean_precision, 3.5 / 5.0);
  EXPECT_DOUBLE_EQ(*report.mean_acg, 3.0 / 4.0);
  EXPECT_EQ(report.acg_skipped, 1u);
  EXPECT_EQ(report.overlapping_ids, 0u);

  const auto augmented = run_retrieval_eval(model, index, queries, 2, RelevanceMode::Augmented);
  EXPECT_EQ(augmented.per_query[3].ndcg, 1.0);
  EXPECT_EQ(augmented.acg_skipped, 0u);
}

TEST(RunRetrievalEval, SelfRetrievalAndDeterminism) {
  const auto model = planar_model();
  const auto db = planar({{0.0, LabelVector({P, N})}, {1.0, LabelVector({N, P})}, {2.0, LabelVector({P, P})}}, "x");
  const auto index = build_index(model, db);
  const auto report = run_retrieval_eval(model, index, db, 1, RelevanceMode::Raw);
  EXPECT_EQ(report.mean_precision, 1.0);
  EXPECT_EQ(report.overlapping_ids, 3u);

  const auto a = run_retrieval_eval(model, index, db, 2, RelevanceMode::Augmented, 1);
  const auto b = run_retrieval_eval(model, index, db, 2, RelevanceMode::Augmented, 3);
  EXPECT_EQ(a.mean_ndcg, b.mean_ndcg);
  EXPECT_EQ(a.mean_precision, b.mean_precision);
}

TEST(ClassificationEval, ExcludesUncertainAndSingleValuedClasses) {
  const auto model = planar_model();
  // Class 0: scores fall with angle; the uncertain row would break perfect ordering.
  const auto queries = planar({{0.1, LabelVector({P, N})}, {0.3, LabelVector({P, N})}, {1.3, LabelVector({U, N})},
                               {1.0, LabelVector({N, N})}, {1.5, LabelVector({N, N})}},
                              "q");
  EvalReport report;
  add_classification_eval(report, model, queries);
  ASSERT_EQ(report.class_auc.size(), 2u);
  ASSERT_TRUE(report.class_auc[0].has_value());
  EXPECT_EQ(*report.class_auc[0], 1.0);
  EXPECT_FALSE(report.class_auc[1].has_value());
  EXPECT_EQ(report.auc_excluded_classes, (std::vector<std::size_t>{1}));
  EXPECT_EQ(*report.macro_auc, 1.0);
}

TEST(RelevanceMode, Parse) {
  EXPECT_EQ(parse_relevance_mode("raw"), RelevanceMode::Raw);
  EXPECT_EQ(parse_relevance_mode(to_string(RelevanceMode::Augmented)), RelevanceMode::Augmented);
  EXPECT_ERROR_CODE(parse_relevance_mode("both"), ErrorCode::InvalidArgument);
}

}  // namespace
}  // namespace mlproxy
