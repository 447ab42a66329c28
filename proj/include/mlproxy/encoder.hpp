#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mlproxy/numerics.hpp"

namespace mlproxy {

// Values kept from a forward pass for backprop. activations[0] is the input,
// activations.back() the output; pre_activations[l] feeds layer l's
// nonlinearity.
struct ForwardTrace {
  std::vector<RealVec> pre_activations;
  std::vector<RealVec> activations;
};

// Fully connected network: tanh on hidden layers, identity on the output.
// Parameters live in one flat buffer, per layer a row-major (out x in) weight
// matrix followed by the bias.
class MlpEncoder {
 public:
  MlpEncoder(std::vector<std::size_t> layer_dims, std::vector<double> params);

  // Xavier-uniform weights, zero biases.
  static MlpEncoder init(std::vector<std::size_t> layer_dims, std::uint64_t seed);

  const std::vector<std::size_t>& layer_dims() const { return dims_; }
  std::size_t num_layers() const { return dims_.size() - 1; }
  std::size_t input_dim() const { return dims_.front(); }
  std::size_t output_dim() const { return dims_.back(); }

  std::span<const double> parameters() const { return params_; }
  std::span<double> mutable_parameters() { return params_; }
  std::span<const double> weights(std::size_t layer) const;
  std::span<const double> bias(std::size_t layer) const;
  std::span<double> mutable_weights(std::size_t layer);
  std::span<double> mutable_bias(std::size_t layer);

  RealVec forward(std::span<const double> x) const;
  RealVec forward(std::span<const double> x, ForwardTrace& trace) const;

  // Adds d(v . grad_v)/d(theta) into grad_params; returns d(v . grad_v)/dx.
  RealVec backward(const ForwardTrace& trace, std::span<const double> grad_v,
                   std::span<double> grad_params) const;
  std::vector<double> backward(const ForwardTrace& trace, std::span<const double> grad_v) const;

  bool operator==(const MlpEncoder&) const = default;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + dims_[layer] * dims_[layer + 1];
  }

  std::vector<std::size_t> dims_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

std::size_t parameter_count(const std::vector<std::size_t>& layer_dims);

}  // namespace mlproxy
