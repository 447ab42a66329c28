#include "mlproxy/adam.hpp"

#include <cmath>

#include "mlproxy/error.hpp"

namespace mlproxy {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& config) {
  if (params.size() != grads.size() || params.size() != state.first.size() ||
      params.size() != state.second.size()) {
    throw Error(ErrorCode::ShapeMismatch, "Adam parameter, gradient and state sizes differ");
  }
  ++state.timestep;
  const double t = static_cast<double>(state.timestep);
  const double correct1 = 1.0 - std::pow(config.beta1, t);
  const double correct2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double g = grads[k];
    state.first[k] = config.beta1 * state.first[k] + (1.0 - config.beta1) * g;
    state.second[k] = config.beta2 * state.second[k] + (1.0 - config.beta2) * g * g;
    const double m_hat = state.first[k] / correct1;
    const double v_hat = state.second[k] / correct2;
    params[k] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
}

}  // namespace mlproxy
