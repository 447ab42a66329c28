#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mlproxy/dataset.hpp"

namespace mlproxy {

// Synthetic multimorbidity data.
//
// Labels: with probability negative_fraction a sample is all-negative.
// Otherwise its positive set is drawn from a log-linear model over non-empty
// patterns,
//   P(y) ~ prod_j theta_j^{y_j} * prod_{j<k} boost_{jk}^{y_j y_k},
// with theta calibrated so the overall positive rate of class j equals
// prevalence[j]. Each positive is then flipped to Uncertain with probability
// uncertain_fraction.
//
// Features: every (class, mode) pair owns a unit prototype; a sample adds the
// prototype of a uniformly drawn mode for each present class plus isotropic
// noise. All-negative samples sit around a separate healthy prototype.
struct SynthConfig {
  std::size_t n_samples = 2000;
  std::size_t n_classes = 4;
  std::size_t input_dim = 16;
  // n_classes x n_classes, symmetric, positive. Empty means the default:
  // classes 0 and 1 co-occur with boost 3, all other pairs 1.
  std::vector<std::vector<double>> cooccurrence_boost;
  // Empty means linearly spaced from 0.30 down to 0.15.
  std::vector<double> prevalence;
  double negative_fraction = 0.3;
  double uncertain_fraction = 0.0;
  std::size_t modes_per_class = 2;
  double noise_std = 0.25;
  std::uint64_t seed = 0;

  // Copy with empty arrays replaced by their defaults.
  SynthConfig resolved() const;
  // Throws InvalidConfig naming the offending field.
  void validate() const;
};

inline constexpr std::size_t kMaxSynthClasses = 20;

// Generating parameters, exposed for oracle classifiers.
struct SynthTruth {
  // prototypes[class][mode]
  std::vector<std::vector<RealVec>> prototypes;
  RealVec healthy;
  // Probability of each label bitmask given the sample is not all-negative;
  // entry 0 is zero.
  std::vector<double> pattern_probability;
};

struct SynthOutput {
  Dataset data;
  SynthTruth truth;
};

SynthOutput generate_with_truth(const SynthConfig& config);
Dataset generate(const SynthConfig& config);

}  // namespace mlproxy
