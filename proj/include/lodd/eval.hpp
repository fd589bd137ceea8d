#pragma once

// External clustering quality: accuracy under the best one-to-one label
// mapping (solved as a linear assignment) and normalized mutual information.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "core.hpp"

namespace lodd {

/// Minimum-cost perfect assignment on a square cost matrix (Kuhn-Munkres,
/// shortest augmenting paths with potentials, O(n^3)). Returns the column
/// assigned to each row.
inline std::vector<Index> solve_assignment(const std::vector<std::vector<double>>& cost) {
  const auto n = static_cast<Index>(cost.size());
  if (n == 0) return {};
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials and matching, column 0 is the virtual source.
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0), v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<Index> match_of_col(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
  for (Index row = 1; row <= n; ++row) {
    match_of_col[0] = row;
    Index col0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), kInf);
    std::vector<bool> used(static_cast<std::size_t>(n + 1), false);
    do {
      used[static_cast<std::size_t>(col0)] = true;
      const Index row0 = match_of_col[static_cast<std::size_t>(col0)];
      double delta = kInf;
      Index col1 = 0;
      for (Index col = 1; col <= n; ++col) {
        if (used[static_cast<std::size_t>(col)]) continue;
        const double cur = cost[static_cast<std::size_t>(row0 - 1)][static_cast<std::size_t>(col - 1)] -
                           u[static_cast<std::size_t>(row0)] - v[static_cast<std::size_t>(col)];
        if (cur < minv[static_cast<std::size_t>(col)]) {
          minv[static_cast<std::size_t>(col)] = cur;
          way[static_cast<std::size_t>(col)] = col0;
        }
        if (minv[static_cast<std::size_t>(col)] < delta) {
          delta = minv[static_cast<std::size_t>(col)];
          col1 = col;
        }
      }
      for (Index col = 0; col <= n; ++col) {
        if (used[static_cast<std::size_t>(col)]) {
          u[static_cast<std::size_t>(match_of_col[static_cast<std::size_t>(col)])] += delta;
          v[static_cast<std::size_t>(col)] -= delta;
        } else {
          minv[static_cast<std::size_t>(col)] -= delta;
        }
      }
      col0 = col1;
    } while (match_of_col[static_cast<std::size_t>(col0)] != 0);
    do {
      const Index col1 = way[static_cast<std::size_t>(col0)];
      match_of_col[static_cast<std::size_t>(col0)] = match_of_col[static_cast<std::size_t>(col1)];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<Index> col_of_row(static_cast<std::size_t>(n), -1);
  for (Index col = 1; col <= n; ++col) {
    col_of_row[static_cast<std::size_t>(match_of_col[static_cast<std::size_t>(col)] - 1)] = col - 1;
  }
  return col_of_row;
}

/// Contingency table of two labelings with labels compacted to 0..r-1 and
/// 0..c-1 in ascending label order.
struct Contingency {
  std::vector<std::vector<Index>> counts;  // [truth][predicted]
  std::vector<Index> truth_sizes;
  std::vector<Index> predicted_sizes;
  Index n = 0;
};

inline Contingency contingency(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::LengthMismatch, "label vectors differ in length (" + std::to_string(truth.size()) +
                                               " vs " + std::to_string(predicted.size()) + ")");
  }
  if (truth.empty()) throw Error(ErrorCode::EmptySet, "label vectors are empty");
  auto compact = [](std::span<const int> labels) {
    std::map<int, Index> ids;
    for (int l : labels) ids.emplace(l, 0);
    Index next = 0;
    for (auto& [label, id] : ids) id = next++;
    std::vector<Index> out;
    out.reserve(labels.size());
    for (int l : labels) out.push_back(ids.at(l));
    return std::pair{out, next};
  };
  const auto [t, rows] = compact(truth);
  const auto [p, cols] = compact(predicted);

  Contingency c;
  c.n = static_cast<Index>(truth.size());
  c.counts.assign(static_cast<std::size_t>(rows), std::vector<Index>(static_cast<std::size_t>(cols), 0));
  c.truth_sizes.assign(static_cast<std::size_t>(rows), 0);
  c.predicted_sizes.assign(static_cast<std::size_t>(cols), 0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    ++c.counts[static_cast<std::size_t>(t[i])][static_cast<std::size_t>(p[i])];
    ++c.truth_sizes[static_cast<std::size_t>(t[i])];
    ++c.predicted_sizes[static_cast<std::size_t>(p[i])];
  }
  return c;
}

/// Fraction of points whose predicted label maps to the true label under the
/// best injective mapping. The confusion matrix is zero-padded to square.
inline double acc(std::span<const int> truth, std::span<const int> predicted) {
  const Contingency c = contingency(truth, predicted);
  const std::size_t rows = c.truth_sizes.size();
  const std::size_t cols = c.predicted_sizes.size();
  const std::size_t side = std::max(rows, cols);
  std::vector<std::vector<double>> cost(side, std::vector<double>(side, 0.0));
  for (std::size_t p = 0; p < cols; ++p) {
    for (std::size_t t = 0; t < rows; ++t) cost[p][t] = -static_cast<double>(c.counts[t][p]);
  }
  const auto mapping = solve_assignment(cost);
  Index matched = 0;
  for (std::size_t p = 0; p < cols; ++p) {
    const auto t = static_cast<std::size_t>(mapping[p]);
    if (t < rows) matched += c.counts[t][p];
  }
  return static_cast<double>(matched) / static_cast<double>(c.n);
}

/// Mutual information over the geometric mean of the two entropies, natural
/// log. Zero when either side is a single cluster.
inline double nmi(std::span<const int> truth, std::span<const int> predicted) {
  const Contingency c = contingency(truth, predicted);
  const double n = static_cast<double>(c.n);
  double mutual = 0.0;
  for (std::size_t t = 0; t < c.truth_sizes.size(); ++t) {
    for (std::size_t p = 0; p < c.predicted_sizes.size(); ++p) {
      const auto nij = static_cast<double>(c.counts[t][p]);
      if (nij == 0.0) continue;
      mutual += nij * std::log(n * nij / (static_cast<double>(c.truth_sizes[t]) *
                                          static_cast<double>(c.predicted_sizes[p])));
    }
  }
  auto entropy_term = [n](const std::vector<Index>& sizes) {
    double h = 0.0;
    for (Index s : sizes) {
      if (s > 0) h += static_cast<double>(s) * std::log(static_cast<double>(s) / n);
    }
    return h;
  };
  const double denom = std::sqrt(entropy_term(c.truth_sizes) * entropy_term(c.predicted_sizes));
  if (!(denom > 0.0)) return 0.0;
  return std::clamp(mutual / denom, 0.0, 1.0);
}

}  // namespace lodd
