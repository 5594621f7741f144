#pragma once

// Test-only reference computations. Nothing here calls into the code paths
// being checked except to read parameters.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "edeen/dataset.hpp"
#include "edeen/ede.hpp"
#include "edeen/rng.hpp"

namespace edeen::testing {

/// |a - n| / max(|a|, |n|, floor); the floor makes near-zero gradients
/// compare absolutely.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

/// Central difference of f with respect to every entry of `values`.
inline std::vector<double> central_differences(std::span<double> values,
                                               const std::function<double()>& f,
                                               double h = 1e-5) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double keep = values[i];
    values[i] = keep + h;
    const double up = f();
    values[i] = keep - h;
    const double down = f();
    values[i] = keep;
    out[i] = (up - down) / (2.0 * h);
  }
  return out;
}

/// Wins plus half-ties over every (anomaly, normal) pair.
inline double pairwise_auroc(std::span<const double> scores, std::span<const Label> truth) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (truth[i] != Label::Anomaly) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (truth[j] != Label::Normal) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

struct Counts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

inline Counts four_counters(std::span<const Label> pred, std::span<const Label> truth) {
  Counts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int p = pred[i] == Label::Anomaly;
    const int t = truth[i] == Label::Anomaly;
    c.tp += p & t;
    c.fp += p & !t;
    c.fn += !p & t;
    c.tn += !p & !t;
  }
  return c;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0,
                            double hi = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.uniform(lo, hi);
  return m;
}

}  // namespace edeen::testing
