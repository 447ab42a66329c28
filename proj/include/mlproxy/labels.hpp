#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mlproxy/numerics.hpp"

namespace mlproxy {

enum class LabelState : std::uint8_t { Negative, Positive, Uncertain };

// "pos" / "neg" / "unc"
std::string_view to_string(LabelState state);
LabelState parse_label_state(std::string_view text);

// Tri-state labels over the dataset's c classes.
class LabelVector {
 public:
  LabelVector() = default;
  explicit LabelVector(std::vector<LabelState> states) : states_(std::move(states)) {}

  std::size_t size() const { return states_.size(); }
  LabelState operator[](std::size_t j) const { return states_[j]; }
  std::span<const LabelState> states() const { return states_; }

  // Positive or Uncertain; the relevance view used for retrieval.
  bool present(std::size_t j) const { return states_[j] != LabelState::Negative; }
  // No Positive and no Uncertain entry.
  bool all_negative() const;

  bool operator==(const LabelVector&) const = default;

 private:
  std::vector<LabelState> states_;
};

// Binary training targets. mask[j] == 1 excludes class j from the loss
// (uncertain labels). When the negative slot is enabled, bits[c] marks a
// sample with no present label and is never masked.
struct AugmentedLabels {
  std::vector<std::uint8_t> bits;
  std::vector<std::uint8_t> mask;
  bool has_negative_slot = false;

  std::size_t size() const { return bits.size(); }
  bool any_positive() const;
};

AugmentedLabels augment(const LabelVector& y, bool use_negative_class);

struct ClassWeights {
  RealVec w_pos;
  RealVec w_neg;

  std::size_t size() const { return w_pos.size(); }

  bool operator==(const ClassWeights&) const = default;
};

// w_pos[j] = n_neg / (n_pos + n_neg), w_neg[j] = n_pos / (n_pos + n_neg),
// counting only unmasked entries. Throws EmptyClass for a class with no
// unmasked sample.
ClassWeights compute_class_weights(std::span<const AugmentedLabels> labels);

}  // namespace mlproxy
