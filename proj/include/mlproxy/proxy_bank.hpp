#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mlproxy/numerics.hpp"

namespace mlproxy {

// Unit-norm proxy rows laid out as (m, c_total, d): row (i, j) is the i-th
// proxy of class j.
struct ProxySet {
  std::size_t m = 0;
  std::size_t c_total = 0;
  std::size_t d = 0;
  double sigma = 0.7;
  std::vector<double> rows;

  std::size_t offset(std::size_t i, std::size_t j) const { return (i * c_total + j) * d; }
  std::span<const double> row(std::size_t i, std::size_t j) const {
    return std::span<const double>(rows).subspan(offset(i, j), d);
  }
};

class ProxyBank {
 public:
  ProxyBank(std::size_t m, std::size_t c_total, std::size_t d, double sigma,
            std::vector<double> params);

  // Rows drawn from a standard normal and unit-normalized.
  static ProxyBank init_random(std::size_t m, std::size_t c_total, std::size_t d,
                               std::uint64_t seed, double sigma = 0.7);

  std::size_t proxies_per_class() const { return m_; }
  std::size_t class_count() const { return c_total_; }
  std::size_t dim() const { return d_; }
  double sigma() const { return sigma_; }
  std::size_t offset(std::size_t i, std::size_t j) const { return (i * c_total_ + j) * d_; }

  std::span<const double> params() const { return params_; }
  std::span<double> mutable_params() { return params_; }
  std::span<const double> raw_row(std::size_t i, std::size_t j) const {
    return params().subspan(offset(i, j), d_);
  }

  bool operator==(const ProxyBank&) const = default;

 private:
  std::size_t m_;
  std::size_t c_total_;
  std::size_t d_;
  double sigma_;
  std::vector<double> params_;
};

// Normalized proxies plus what is needed to push gradients with respect to
// the unit rows back to the raw parameters.
class NormalizedProxies {
 public:
  explicit NormalizedProxies(const ProxyBank& bank);

  const ProxySet& units() const { return units_; }
  std::span<const double> norms() const { return norms_; }

  // Applies (I - u u^T) / ||p|| row by row.
  std::vector<double> backprop(std::span<const double> grad_units) const;

 private:
  ProxySet units_;
  std::vector<double> norms_;
};

inline NormalizedProxies normalized_view(const ProxyBank& bank) { return NormalizedProxies(bank); }

// The m normalized proxies of class j, in proxy order.
std::vector<RealVec> proxies_of_class(const ProxyBank& bank, std::size_t j);

}  // namespace mlproxy
