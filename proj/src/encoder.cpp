#include "mlproxy/encoder.hpp"

#include <cmath>
#include <string>

#include "mlproxy/error.hpp"
#include "mlproxy/random.hpp"

namespace mlproxy {

std::size_t parameter_count(const std::vector<std::size_t>& dims) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) n += dims[l] * dims[l + 1] + dims[l + 1];
  return n;
}

MlpEncoder::MlpEncoder(std::vector<std::size_t> layer_dims, std::vector<double> params)
    : dims_(std::move(layer_dims)), params_(std::move(params)) {
  if (dims_.size() < 2) throw Error(ErrorCode::ShapeMismatch, "encoder needs at least one layer");
  for (std::size_t dim : dims_) {
    if (dim == 0) throw Error(ErrorCode::ShapeMismatch, "layer width must be positive");
  }
  if (params_.size() != parameter_count(dims_)) {
    throw Error(ErrorCode::ShapeMismatch,
                "expected " + std::to_string(parameter_count(dims_)) + " encoder parameters, got " +
                    std::to_string(params_.size()));
  }
  if (!all_finite(params_)) throw Error(ErrorCode::InvalidArgument, "non-finite encoder parameter");
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    offsets_.push_back(offset);
    offset += dims_[l] * dims_[l + 1] + dims_[l + 1];
  }
}

MlpEncoder MlpEncoder::init(std::vector<std::size_t> layer_dims, std::uint64_t seed) {
  std::vector<double> params(parameter_count(layer_dims), 0.0);
  Rng rng(seed);
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const std::size_t fan_in = layer_dims[l], fan_out = layer_dims[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t k = 0; k < fan_in * fan_out; ++k) params[offset + k] = rng.uniform(-limit, limit);
    offset += fan_in * fan_out + fan_out;
  }
  return MlpEncoder(std::move(layer_dims), std::move(params));
}

std::span<const double> MlpEncoder::weights(std::size_t layer) const {
  return parameters().subspan(weight_offset(layer), dims_[layer] * dims_[layer + 1]);
}

std::span<const double> MlpEncoder::bias(std::size_t layer) const {
  return parameters().subspan(bias_offset(layer), dims_[layer + 1]);
}

std::span<double> MlpEncoder::mutable_weights(std::size_t layer) {
  return mutable_parameters().subspan(weight_offset(layer), dims_[layer] * dims_[layer + 1]);
}

std::span<double> MlpEncoder::mutable_bias(std::size_t layer) {
  return mutable_parameters().subspan(bias_offset(layer), dims_[layer + 1]);
}

RealVec MlpEncoder::forward(std::span<const double> x) const {
  ForwardTrace trace;
  return forward(x, trace);
}

RealVec MlpEncoder::forward(std::span<const double> x, ForwardTrace& trace) const {
  if (x.size() != input_dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "input has " + std::to_string(x.size()) + " features, encoder expects " +
                    std::to_string(input_dim()));
  }
  trace.pre_activations.clear();
  trace.activations.clear();
  trace.activations.emplace_back(x.begin(), x.end());
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const std::size_t n_in = dims_[l], n_out = dims_[l + 1];
    const auto w = weights(l);
    const auto b = bias(l);
    const RealVec& in = trace.activations.back();
    RealVec z(n_out);
    for (std::size_t o = 0; o < n_out; ++o) {
      double s = b[o];
      for (std::size_t i = 0; i < n_in; ++i) s += w[o * n_in + i] * in[i];
      z[o] = s;
    }
    RealVec a = z;
    if (l + 1 < num_layers()) {
      for (double& value : a) value = std::tanh(value);
    }
    trace.pre_activations.push_back(std::move(z));
    trace.activations.push_back(std::move(a));
  }
  return trace.activations.back();
}

RealVec MlpEncoder::backward(const ForwardTrace& trace, std::span<const double> grad_v,
                             std::span<double> grad_params) const {
  if (trace.activations.size() != dims_.size() || trace.pre_activations.size() != num_layers() ||
      grad_v.size() != output_dim() || grad_params.size() != params_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "trace or gradient does not match encoder");
  }
  RealVec delta(grad_v.begin(), grad_v.end());
  for (std::size_t l = num_layers(); l-- > 0;) {
    const std::size_t n_in = dims_[l], n_out = dims_[l + 1];
    const RealVec& in = trace.activations[l];
    if (in.size() != n_in) throw Error(ErrorCode::ShapeMismatch, "trace layer width mismatch");
    auto gw = grad_params.subspan(weight_offset(l), n_in * n_out);
    auto gb = grad_params.subspan(bias_offset(l), n_out);
    for (std::size_t o = 0; o < n_out; ++o) {
      gb[o] += delta[o];
      for (std::size_t i = 0; i < n_in; ++i) gw[o * n_in + i] += delta[o] * in[i];
    }
    const auto w = weights(l);
    RealVec prev(n_in, 0.0);
    for (std::size_t o = 0; o < n_out; ++o) {
      for (std::size_t i = 0; i < n_in; ++i) prev[i] += w[o * n_in + i] * delta[o];
    }
    if (l > 0) {
      // in = tanh(pre), tanh' = 1 - tanh^2
      for (std::size_t i = 0; i < n_in; ++i) prev[i] *= 1.0 - in[i] * in[i];
    }
    delta = std::move(prev);
  }
  return delta;
}

std::vector<double> MlpEncoder::backward(const ForwardTrace& trace,
                                         std::span<const double> grad_v) const {
  std::vector<double> grads(params_.size(), 0.0);
  backward(trace, grad_v, grads);
  return grads;
}

}  // namespace mlproxy
