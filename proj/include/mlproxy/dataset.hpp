#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mlproxy/labels.hpp"
#include "mlproxy/numerics.hpp"

namespace mlproxy {

struct Sample {
  std::string id;
  RealVec features;
  LabelVector labels;

  bool operator==(const Sample&) const = default;
};

struct Dataset {
  std::size_t n_classes = 0;
  std::size_t input_dim = 0;
  std::vector<Sample> rows;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }

  // Unique ids, consistent feature and label lengths; throws otherwise.
  void validate() const;

  bool operator==(const Dataset&) const = default;
};

// Rows [begin, end) as a new dataset with the same shape.
Dataset slice(const Dataset& data, std::size_t begin, std::size_t end);

}  // namespace mlproxy
