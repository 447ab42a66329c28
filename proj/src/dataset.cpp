#include "mlproxy/dataset.hpp"

#include <algorithm>
#include <unordered_set>

#include "mlproxy/error.hpp"

namespace mlproxy {

void Dataset::validate() const {
  std::unordered_set<std::string> seen;
  seen.reserve(rows.size());
  for (const auto& row : rows) {
    if (!seen.insert(row.id).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate sample id '" + row.id + "'");
    }
    if (row.features.size() != input_dim) {
      throw Error(ErrorCode::DimensionMismatch, "sample '" + row.id + "' has " +
                                                    std::to_string(row.features.size()) +
                                                    " features, expected " + std::to_string(input_dim));
    }
    if (row.labels.size() != n_classes) {
      throw Error(ErrorCode::DimensionMismatch, "sample '" + row.id + "' has " +
                                                    std::to_string(row.labels.size()) +
                                                    " labels, expected " + std::to_string(n_classes));
    }
    if (!all_finite(row.features)) {
      throw Error(ErrorCode::InvalidArgument, "sample '" + row.id + "' has non-finite features");
    }
  }
}

Dataset slice(const Dataset& data, std::size_t begin, std::size_t end) {
  end = std::min(end, data.rows.size());
  begin = std::min(begin, end);
  Dataset out;
  out.n_classes = data.n_classes;
  out.input_dim = data.input_dim;
  out.rows.assign(data.rows.begin() + static_cast<std::ptrdiff_t>(begin),
                  data.rows.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

}  // namespace mlproxy
