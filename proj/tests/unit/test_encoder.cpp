#include <cmath>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "mlproxy/encoder.hpp"
#include "oracles.hpp"
#include "properties.hpp"

namespace mlproxy {
namespace {

TEST(Encoder, IdentityLayerPassesInputThrough) {
  const MlpEncoder enc({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0});
  const std::vector<double> x{0.5, -1.5, 2.0};
  EXPECT_EQ(enc.forward(x), x);
}

TEST(Encoder, ZeroWeightsGiveBias) {
  const MlpEncoder enc({2, 3}, {0, 0, 0, 0, 0, 0, 0.1, -0.2, 0.3});
  EXPECT_EQ(enc.forward(std::vector<double>{4.0, 5.0}), (std::vector<double>{0.1, -0.2, 0.3}));
}

TEST(Encoder, MatchesLayerByLayerOracle) {
  Rng rng(8);
  for (int t = 0; t < 10; ++t) {
    const std::vector<std::size_t> dims{5, 7, 3};
    const auto enc = MlpEncoder::init(dims, 100 + t);
    std::vector<double> params(enc.parameters().begin(), enc.parameters().end());
    for (double& p : params) p += 0.1 * rng.normal();  // exercise the biases too
    const MlpEncoder perturbed(dims, params);
    const auto x = testing::random_vec(rng, 5);
    const auto got = perturbed.forward(x);
    const auto want = testing::naive_mlp_forward(dims, params, x);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(got[k], want[k], 1e-14);
  }
}

TEST(Encoder, ForwardDimensionMismatch) {
  const auto enc = MlpEncoder::init({4, 2}, 1);
  EXPECT_ERROR_CODE(enc.forward(std::vector<double>{1.0, 2.0}), ErrorCode::DimensionMismatch);
}

TEST(Encoder, ZeroUpstreamGradient) {
  const auto enc = MlpEncoder::init({4, 6, 3}, 2);
  ForwardTrace trace;
  enc.forward(std::vector<double>{0.1, 0.2, 0.3, 0.4}, trace);
  for (double g : enc.backward(trace, std::vector<double>(3, 0.0))) EXPECT_EQ(g, 0.0);
}

TEST(Encoder, LinearLayerWeightGradIsOuterProduct) {
  const auto enc = MlpEncoder::init({3, 2}, 4);
  const std::vector<double> x{1.0, -2.0, 0.5}, gv{0.7, -0.3};
  ForwardTrace trace;
  enc.forward(x, trace);
  const auto g = enc.backward(trace, gv);
  for (std::size_t o = 0; o < 2; ++o) {
    for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(g[o * 3 + i], gv[o] * x[i]);
    EXPECT_DOUBLE_EQ(g[6 + o], gv[o]);
  }
}

TEST(Encoder, BackwardReturnsInputGradient) {
  const auto enc = MlpEncoder::init({4, 5, 2}, 6);
  const std::vector<double> x{0.3, -0.1, 0.9, 0.2}, gv{1.0, -0.5};
  ForwardTrace trace;
  enc.forward(x, trace);
  std::vector<double> grad_params(enc.parameters().size(), 0.0);
  const auto gx = enc.backward(trace, gv, grad_params);
  const auto fd = finite_diff_grad(
      [&](std::span<const double> z) {
        const auto v = enc.forward(z);
        return v[0] * gv[0] + v[1] * gv[1];
      },
      x);
  EXPECT_LE(relative_error(gx, fd), 1e-8);
}

TEST(Encoder, BackwardShapeMismatch) {
  const auto enc = MlpEncoder::init({4, 2}, 1);
  ForwardTrace trace;
  enc.forward(std::vector<double>(4, 0.1), trace);
  EXPECT_ERROR_CODE(enc.backward(trace, std::vector<double>{1.0}), ErrorCode::ShapeMismatch);
}

TEST(Encoder, EndToEndGradients) {
  EXPECT_LE(testing::check_end_to_end_gradients(25, 77).worst_relative_error, 1e-5);
}

TEST(EncoderInit, DeterministicAndShaped) {
  const auto a = MlpEncoder::init({8, 16, 4}, 3), b = MlpEncoder::init({8, 16, 4}, 3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.weights(0).size(), 16u * 8u);
  EXPECT_EQ(a.weights(1).size(), 4u * 16u);
  EXPECT_EQ(a.parameters().size(), parameter_count({8, 16, 4}));
  for (double bias : a.bias(0)) EXPECT_EQ(bias, 0.0);
  const double limit = std::sqrt(6.0 / (8 + 16));
  for (double w : a.weights(0)) EXPECT_LE(std::abs(w), limit);
}

TEST(EncoderInit, OutputNormOrderOne) {
  Rng rng(12);
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto enc = MlpEncoder::init({16, 64, 32}, seed);
    total += l2_norm(enc.forward(testing::random_unit(rng, 16)));
  }
  const double mean = total / 100.0;
  EXPECT_GE(mean, 0.1);
  EXPECT_LE(mean, 10.0);
}

TEST(Encoder, RejectsBadShapes) {
  EXPECT_ERROR_CODE(MlpEncoder({3}, {}), ErrorCode::ShapeMismatch);
  EXPECT_ERROR_CODE(MlpEncoder({2, 2}, {1.0}), ErrorCode::ShapeMismatch);
}

}  // namespace
}  // namespace mlproxy
