#include "mlproxy/labels.hpp"

#include <algorithm>
#include <string>

#include "mlproxy/error.hpp"

namespace mlproxy {

std::string_view to_string(LabelState state) {
  switch (state) {
    case LabelState::Positive: return "pos";
    case LabelState::Negative: return "neg";
    case LabelState::Uncertain: return "unc";
  }
  return "neg";
}

LabelState parse_label_state(std::string_view text) {
  if (text == "pos") return LabelState::Positive;
  if (text == "neg") return LabelState::Negative;
  if (text == "unc") return LabelState::Uncertain;
  throw Error(ErrorCode::ParseError, "unknown label state '" + std::string(text) + "'");
}

bool LabelVector::all_negative() const {
  return std::all_of(states_.begin(), states_.end(),
                     [](LabelState s) { return s == LabelState::Negative; });
}

bool AugmentedLabels::any_positive() const {
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j] && !mask[j]) return true;
  }
  return false;
}

AugmentedLabels augment(const LabelVector& y, bool use_negative_class) {
  const std::size_t c = y.size();
  AugmentedLabels out;
  out.has_negative_slot = use_negative_class;
  out.bits.assign(c + (use_negative_class ? 1 : 0), 0);
  out.mask.assign(out.bits.size(), 0);
  for (std::size_t j = 0; j < c; ++j) {
    switch (y[j]) {
      case LabelState::Positive: out.bits[j] = 1; break;
      case LabelState::Negative: break;
      case LabelState::Uncertain: out.mask[j] = 1; break;
    }
  }
  if (use_negative_class) out.bits[c] = y.all_negative() ? 1 : 0;
  return out;
}

ClassWeights compute_class_weights(std::span<const AugmentedLabels> labels) {
  if (labels.empty()) throw Error(ErrorCode::EmptyDataset, "no labels to weight");
  const std::size_t c_total = labels.front().size();
  std::vector<std::size_t> n_pos(c_total, 0), n_neg(c_total, 0);
  for (const auto& y : labels) {
    if (y.size() != c_total) {
      throw Error(ErrorCode::DimensionMismatch, "inconsistent augmented label lengths");
    }
    for (std::size_t j = 0; j < c_total; ++j) {
      if (y.mask[j]) continue;
      ++(y.bits[j] ? n_pos[j] : n_neg[j]);
    }
  }
  ClassWeights w;
  w.w_pos.resize(c_total);
  w.w_neg.resize(c_total);
  for (std::size_t j = 0; j < c_total; ++j) {
    const std::size_t total = n_pos[j] + n_neg[j];
    if (total == 0) {
      throw Error(ErrorCode::EmptyClass, "class " + std::to_string(j) + " has no unmasked sample");
    }
    w.w_pos[j] = static_cast<double>(n_neg[j]) / static_cast<double>(total);
    w.w_neg[j] = static_cast<double>(n_pos[j]) / static_cast<double>(total);
  }
  return w;
}

}  // namespace mlproxy
