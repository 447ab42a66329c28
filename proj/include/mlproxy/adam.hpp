#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mlproxy {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moment accumulators for one parameter block.
struct AdamState {
  std::vector<double> first;
  std::vector<double> second;
  std::int64_t timestep = 0;

  AdamState() = default;
  explicit AdamState(std::size_t n) : first(n, 0.0), second(n, 0.0) {}
};

// Bias-corrected Adam update; advances state.timestep by one.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& config);

}  // namespace mlproxy
