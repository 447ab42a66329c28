#include "mlproxy/proxy_bank.hpp"

#include <string>

#include "mlproxy/error.hpp"
#include "mlproxy/random.hpp"

namespace mlproxy {

ProxyBank::ProxyBank(std::size_t m, std::size_t c_total, std::size_t d, double sigma,
                     std::vector<double> params)
    : m_(m), c_total_(c_total), d_(d), sigma_(sigma), params_(std::move(params)) {
  if (m_ == 0 || c_total_ == 0 || d_ == 0) {
    throw Error(ErrorCode::ShapeMismatch, "proxy bank dimensions must be positive");
  }
  if (!(sigma_ > 0.0)) throw Error(ErrorCode::InvalidSigma, "sigma must be positive");
  if (params_.size() != m_ * c_total_ * d_) {
    throw Error(ErrorCode::ShapeMismatch,
                "expected " + std::to_string(m_ * c_total_ * d_) + " proxy parameters, got " +
                    std::to_string(params_.size()));
  }
  if (!all_finite(params_)) throw Error(ErrorCode::InvalidArgument, "non-finite proxy parameter");
  for (std::size_t i = 0; i < m_; ++i) {
    for (std::size_t j = 0; j < c_total_; ++j) {
      if (l2_norm(raw_row(i, j)) < kZeroNormThreshold) {
        throw Error(ErrorCode::ZeroVector, "proxy row has zero norm");
      }
    }
  }
}

ProxyBank ProxyBank::init_random(std::size_t m, std::size_t c_total, std::size_t d,
                                 std::uint64_t seed, double sigma) {
  Rng rng(seed);
  std::vector<double> params(m * c_total * d);
  for (std::size_t r = 0; r < m * c_total; ++r) {
    RealVec raw(d);
    do {
      for (double& x : raw) x = rng.normal();
    } while (l2_norm(raw) < 1e-6);
    const auto unit = l2_normalize(raw).unit;
    std::copy(unit.begin(), unit.end(), params.begin() + static_cast<std::ptrdiff_t>(r * d));
  }
  return ProxyBank(m, c_total, d, sigma, std::move(params));
}

NormalizedProxies::NormalizedProxies(const ProxyBank& bank) {
  units_.m = bank.proxies_per_class();
  units_.c_total = bank.class_count();
  units_.d = bank.dim();
  units_.sigma = bank.sigma();
  units_.rows.resize(bank.params().size());
  norms_.resize(units_.m * units_.c_total);
  for (std::size_t i = 0; i < units_.m; ++i) {
    for (std::size_t j = 0; j < units_.c_total; ++j) {
      const auto n = l2_normalize(bank.raw_row(i, j));
      std::copy(n.unit.begin(), n.unit.end(),
                units_.rows.begin() + static_cast<std::ptrdiff_t>(units_.offset(i, j)));
      norms_[i * units_.c_total + j] = n.norm;
    }
  }
}

std::vector<double> NormalizedProxies::backprop(std::span<const double> grad_units) const {
  if (grad_units.size() != units_.rows.size()) {
    throw Error(ErrorCode::ShapeMismatch, "proxy gradient has wrong length");
  }
  const std::size_t d = units_.d;
  std::vector<double> out(grad_units.size());
  for (std::size_t r = 0; r < norms_.size(); ++r) {
    const auto u = std::span<const double>(units_.rows).subspan(r * d, d);
    const auto g = grad_units.subspan(r * d, d);
    const double radial = dot(g, u);
    for (std::size_t k = 0; k < d; ++k) out[r * d + k] = (g[k] - radial * u[k]) / norms_[r];
  }
  return out;
}

std::vector<RealVec> proxies_of_class(const ProxyBank& bank, std::size_t j) {
  if (j >= bank.class_count()) {
    throw Error(ErrorCode::IndexOutOfRange, "class " + std::to_string(j) + " out of range");
  }
  std::vector<RealVec> out;
  out.reserve(bank.proxies_per_class());
  for (std::size_t i = 0; i < bank.proxies_per_class(); ++i) {
    out.push_back(l2_normalize(bank.raw_row(i, j)).unit);
  }
  return out;
}

}  // namespace mlproxy
