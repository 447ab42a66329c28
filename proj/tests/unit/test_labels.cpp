#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "mlproxy/labels.hpp"
#include "oracles.hpp"

namespace mlproxy {
namespace {

constexpr auto P = LabelState::Positive;
constexpr auto N = LabelState::Negative;
constexpr auto U = LabelState::Uncertain;

using Bits = std::vector<std::uint8_t>;

TEST(Augment, PositivesPassThrough) {
  const auto a = augment(LabelVector({P, N, P}), true);
  EXPECT_EQ(a.bits, (Bits{1, 0, 1, 0}));
  EXPECT_EQ(a.mask, (Bits{0, 0, 0, 0}));
  EXPECT_TRUE(a.has_negative_slot);
}

TEST(Augment, AllNegativeSetsNegativeSlot) {
  EXPECT_EQ(augment(LabelVector({N, N, N}), true).bits, (Bits{0, 0, 0, 1}));
}

TEST(Augment, UncertainBlocksNegativeSlot) {
  const auto a = augment(LabelVector({N, U, N}), true);
  EXPECT_EQ(a.bits, (Bits{0, 0, 0, 0}));
  EXPECT_EQ(a.mask, (Bits{0, 1, 0, 0}));
}

TEST(Augment, WithoutNegativeClass) {
  const auto a = augment(LabelVector({N, N}), false);
  EXPECT_EQ(a.bits, (Bits{0, 0}));
  EXPECT_FALSE(a.has_negative_slot);
  EXPECT_FALSE(a.any_positive());
}

TEST(LabelState, StringRoundTrip) {
  for (auto s : {P, N, U}) EXPECT_EQ(parse_label_state(to_string(s)), s);
  EXPECT_EQ(to_string(P), "pos");
  EXPECT_EQ(to_string(N), "neg");
  EXPECT_EQ(to_string(U), "unc");
  EXPECT_ERROR_CODE(parse_label_state("maybe"), ErrorCode::ParseError);
}

TEST(ClassWeights, DirectFormula) {
  std::vector<AugmentedLabels> labels;
  for (int i = 0; i < 100; ++i) labels.push_back(augment(LabelVector({i < 20 ? P : N}), false));
  const auto w = compute_class_weights(labels);
  EXPECT_DOUBLE_EQ(w.w_pos[0], 0.8);
  EXPECT_DOUBLE_EQ(w.w_neg[0], 0.2);
}

TEST(ClassWeights, BalancedIsHalf) {
  std::vector<AugmentedLabels> labels{augment(LabelVector({P}), false), augment(LabelVector({N}), false)};
  const auto w = compute_class_weights(labels);
  EXPECT_EQ(w.w_pos[0], 0.5);
  EXPECT_EQ(w.w_neg[0], 0.5);
}

TEST(ClassWeights, ToySetMatchesCounting) {
  const std::vector<LabelVector> ys{
      LabelVector({P, N, N}), LabelVector({P, P, N}), LabelVector({N, N, N}), LabelVector({U, P, N}),
      LabelVector({N, U, P}), LabelVector({N, N, N}), LabelVector({P, N, P}), LabelVector({N, P, U}),
      LabelVector({N, N, U}), LabelVector({P, P, P})};
  std::vector<AugmentedLabels> labels;
  for (const auto& y : ys) labels.push_back(augment(y, true));
  const auto w = compute_class_weights(labels);
  ASSERT_EQ(w.size(), 4u);
  for (std::size_t j = 0; j < 4; ++j) {
    double pos = 0, neg = 0;
    for (const auto& y : ys) {
      if (j < 3) {
        if (y[j] == U) continue;
        (y[j] == P ? pos : neg) += 1;
      } else {
        (y.all_negative() ? pos : neg) += 1;
      }
    }
    EXPECT_DOUBLE_EQ(w.w_pos[j], neg / (pos + neg)) << j;
    EXPECT_DOUBLE_EQ(w.w_neg[j], pos / (pos + neg)) << j;
  }
  // Class 0: positives {0,1,6,9}, negatives {2,4,5,7,8}; sample 3 masked.
  EXPECT_DOUBLE_EQ(w.w_pos[0], 5.0 / 9.0);
  // Negative slot: samples 2 and 5 only.
  EXPECT_DOUBLE_EQ(w.w_neg[3], 0.2);
}

TEST(ClassWeights, Errors) {
  EXPECT_ERROR_CODE(compute_class_weights({}), ErrorCode::EmptyDataset);
  std::vector<AugmentedLabels> masked{augment(LabelVector({U, P}), false)};
  EXPECT_ERROR_CODE(compute_class_weights(masked), ErrorCode::EmptyClass);
  std::vector<AugmentedLabels> ragged{augment(LabelVector({P}), false), augment(LabelVector({P, N}), false)};
  EXPECT_ERROR_CODE(compute_class_weights(ragged), ErrorCode::DimensionMismatch);
}

}  // namespace
}  // namespace mlproxy
