#include <algorithm>
#include <cmath>
#include <vector>

#include "edeen/error.hpp"
#include "edeen/meta.hpp"

namespace edeen {

double pearson_skewness(std::span<const double> column) {
  if (column.empty()) throw PreconditionError("pearson_skewness: empty column");
  // Sums run over the sorted values so the result does not depend on row order.
  std::vector<double> sorted(column.begin(), column.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) return 0.0;
  const auto n = static_cast<double>(sorted.size());
  double mean = 0.0;
  for (double v : sorted) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : sorted) var += (v - mean) * (v - mean);
  const double sigma = std::sqrt(var / n);
  if (sigma == 0.0) return 0.0;

  const std::size_t mid = sorted.size() / 2;
  const double median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return 3.0 * (mean - median) / sigma;
}

MetaFeatures extract_meta_features(const Matrix& data) {
  if (data.rows() == 0) throw PreconditionError("meta features: empty dataset");
  MetaFeatures f;
  f.n_instances = data.rows();
  std::vector<double> column(data.rows());
  for (std::size_t c = 0; c < data.cols(); ++c) {
    std::size_t zeros = 0;
    for (std::size_t r = 0; r < data.rows(); ++r) {
      column[r] = data(r, c);
      if (column[r] == 0.0) ++zeros;
    }
    if (2 * zeros > data.rows()) ++f.n_sparse;
    const double skew = pearson_skewness(column);
    if (skew > 0.0) ++f.n_pos_skew;
    else if (skew < 0.0) ++f.n_neg_skew;
  }
  return f;
}

MetaFeatures extract_meta_features(const Dataset& data) {
  return extract_meta_features(data.features());
}

}  // namespace edeen
