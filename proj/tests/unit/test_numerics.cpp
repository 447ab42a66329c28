#include <cmath>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "mlproxy/numerics.hpp"
#include "oracles.hpp"

namespace mlproxy {
namespace {

using testing::random_vec;

TEST(L2Normalize, ThreeFourFive) {
  const Normalized n = l2_normalize(std::vector<double>{3.0, 4.0});
  EXPECT_DOUBLE_EQ(n.norm, 5.0);
  EXPECT_DOUBLE_EQ(n.unit[0], 0.6);
  EXPECT_DOUBLE_EQ(n.unit[1], 0.8);
}

TEST(L2Normalize, UnitInputUnchanged) {
  const std::vector<double> u{0.0, 1.0, 0.0};
  const Normalized n = l2_normalize(u);
  EXPECT_EQ(n.unit, u);
  EXPECT_EQ(n.norm, 1.0);
}

TEST(L2Normalize, MatchesScalarDivision) {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const auto v = random_vec(rng, 16, 3.0);
    double s = 0.0;
    for (double x : v) s += x * x;
    const double norm = std::sqrt(s);
    const Normalized n = l2_normalize(v);
    EXPECT_NEAR(n.norm, norm, 1e-12 * norm);
    double unit_sq = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      EXPECT_NEAR(n.unit[k], v[k] / norm, 1e-15);
      unit_sq += n.unit[k] * n.unit[k];
    }
    EXPECT_NEAR(std::sqrt(unit_sq), 1.0, 1e-9);
  }
}

TEST(L2Normalize, RejectsNearZero) {
  EXPECT_ERROR_CODE(l2_normalize(std::vector<double>{0.0, 0.0}), ErrorCode::ZeroVector);
  EXPECT_ERROR_CODE(l2_normalize(std::vector<double>{1e-13, 0.0}), ErrorCode::ZeroVector);
}

TEST(SqDist, Basics) {
  const std::vector<double> a{1.0, 0.0}, b{0.0, 0.5}, e1{1.0, 0.0}, e2{0.0, 1.0};
  EXPECT_EQ(sq_dist(a, a), 0.0);
  EXPECT_DOUBLE_EQ(sq_dist(e1, e2), 2.0);
  EXPECT_DOUBLE_EQ(sq_dist(a, b), 1.25);
}

TEST(SqDist, DimensionMismatch) {
  EXPECT_ERROR_CODE(sq_dist(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), ErrorCode::DimensionMismatch);
}

TEST(GaussianKernel, Values) {
  EXPECT_EQ(gaussian_kernel(0.0, 0.7), 1.0);
  EXPECT_NEAR(gaussian_kernel(2.0 * 0.49, 0.7), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(gaussian_kernel(2.0, 0.7), 0.12993, 1e-5);
  EXPECT_NEAR(gaussian_kernel(2.0, 0.7), std::exp(-2.0 / 0.98), 1e-15);
}

TEST(GaussianKernel, RejectsBadSigma) {
  EXPECT_ERROR_CODE(gaussian_kernel(1.0, 0.0), ErrorCode::InvalidSigma);
  EXPECT_ERROR_CODE(gaussian_kernel(1.0, -0.5), ErrorCode::InvalidSigma);
}

TEST(LogMeanExp, Values) {
  EXPECT_EQ(log_mean_exp(std::vector<double>{-2.5}), -2.5);
  EXPECT_NEAR(log_mean_exp(std::vector<double>{-4.0, -4.0}), -4.0, 1e-15);
  EXPECT_NEAR(log_mean_exp(std::vector<double>{-1.0, -3.0}), std::log((std::exp(-1.0) + std::exp(-3.0)) / 2.0), 1e-15);
}

TEST(LogMeanExp, ExtremeMagnitudes) {
  EXPECT_NEAR(log_mean_exp(std::vector<double>{-1e6, -1e6 - std::log(3.0)}), -1e6 + std::log(2.0 / 3.0), 1e-9);
  EXPECT_TRUE(std::isfinite(log_mean_exp(std::vector<double>{-1e6, 0.0})));
}

TEST(LogMeanExp, EmptyInput) {
  EXPECT_ERROR_CODE(log_mean_exp(std::vector<double>{}), ErrorCode::EmptyInput);
  EXPECT_ERROR_CODE(log_sum_exp(std::vector<double>{}), ErrorCode::EmptyInput);
}

TEST(FiniteDiff, KnownGradients) {
  const auto sq = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
  const auto g = finite_diff_grad(sq, std::vector<double>{1.0, 2.0});
  EXPECT_NEAR(g[0], 2.0, 1e-8);
  EXPECT_NEAR(g[1], 4.0, 1e-8);
  const auto zero = finite_diff_grad([](std::span<const double>) { return 3.0; }, std::vector<double>{1.0, 2.0, 3.0});
  for (double z : zero) EXPECT_EQ(z, 0.0);
}

TEST(FiniteDiff, KernelAgainstAnalyticDerivative) {
  Rng rng(3);
  const double sigma = 0.7;
  for (int t = 0; t < 20; ++t) {
    const auto x = random_vec(rng, 5), p = random_vec(rng, 5);
    const auto fd = finite_diff_grad(
        [&](std::span<const double> z) { return gaussian_kernel(sq_dist(z, p), sigma); }, x);
    const double k = gaussian_kernel(sq_dist(x, p), sigma);
    std::vector<double> analytic(5);
    for (std::size_t i = 0; i < 5; ++i) analytic[i] = -(x[i] - p[i]) / (sigma * sigma) * k;
    EXPECT_LE(relative_error(fd, analytic), 1e-6);
  }
}

TEST(RelativeError, Definition) {
  EXPECT_EQ(relative_error(std::vector<double>{0.0}, std::vector<double>{0.0}), 0.0);
  EXPECT_DOUBLE_EQ(relative_error(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}), std::sqrt(2.0));
  EXPECT_NEAR(relative_error(std::vector<double>{2.0}, std::vector<double>{2.2}), 0.2 / 2.2, 1e-15);
}

TEST(NormalizeBackprop, TangentProjection) {
  const std::vector<double> u{0.6, 0.8};
  const auto radial = normalize_backprop(u, 2.0, std::vector<double>{0.6, 0.8});
  EXPECT_NEAR(radial[0], 0.0, 1e-15);
  EXPECT_NEAR(radial[1], 0.0, 1e-15);
  const auto g = normalize_backprop(u, 2.0, std::vector<double>{1.0, 0.0});
  EXPECT_NEAR(g[0], (1.0 - 0.36) / 2.0, 1e-15);
  EXPECT_NEAR(g[1], -0.48 / 2.0, 1e-15);
}

TEST(AllFinite, DetectsNanAndInf) {
  EXPECT_TRUE(all_finite(std::vector<double>{1.0, -2.0}));
  EXPECT_FALSE(all_finite(std::vector<double>{1.0, std::nan("")}));
  EXPECT_FALSE(all_finite(std::vector<double>{HUGE_VAL}));
}

}  // namespace
}  // namespace mlproxy
