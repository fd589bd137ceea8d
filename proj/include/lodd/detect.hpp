#pragma once

// Boundary point detection: KNN search, per-point LoDD, ascending sort, and a
// split of the lowest-scoring floor(n * ratio) points into the boundary set.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "core.hpp"
#include "metric.hpp"
#include "neighbors.hpp"
#include "random.hpp"
#include "ratio.hpp"

namespace lodd {

struct DetectionReport {
  DetectionResult result;
  LoddScores scores;
  /// Present when the ratio was estimated adaptively.
  std::optional<RatioEstimate> estimate;
};

/// Orders ids ascending by (score, id) and marks the first floor(n * ratio).
inline DetectionResult split_by_scores(const std::vector<double>& scores, double ratio) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw Error(ErrorCode::RatioOutOfRange, "ratio must lie in [0,1]");
  const auto n = static_cast<Index>(scores.size());
  DetectionResult out;
  out.order.resize(static_cast<std::size_t>(n));
  std::iota(out.order.begin(), out.order.end(), Index{0});
  std::sort(out.order.begin(), out.order.end(), [&](Index a, Index b) {
    const double sa = scores[static_cast<std::size_t>(a)];
    const double sb = scores[static_cast<std::size_t>(b)];
    return sa < sb || (sa == sb && a < b);
  });
  out.effective_ratio = ratio;
  out.boundary_count = boundary_count_for(n, ratio);
  out.boundary_mask.assign(static_cast<std::size_t>(n), false);
  for (Index j = 0; j < out.boundary_count; ++j) {
    out.boundary_mask[static_cast<std::size_t>(out.order[static_cast<std::size_t>(j)])] = true;
  }
  return out;
}

inline DetectionReport detect_with_report(const PointSet& point_set, const Params& params) {
  require_valid(point_set, params);
  const NeighborIndex index = build_index(point_set, params.k, SearchStrategy::Auto, params.threads);

  DetectionReport report;
  report.scores = score_all(point_set, index, params.omega, params.threads);
  report.scores.params = params;

  double ratio = 0.0;
  if (params.adaptive) {
    report.estimate = estimate_ratio(point_set, index, params.cluster_count);
    ratio = report.estimate->ratio;
  } else {
    ratio = *params.ratio;
  }
  report.result = split_by_scores(report.scores.values, ratio);
  return report;
}

inline DetectionResult detect(const PointSet& point_set, const Params& params) {
  return detect_with_report(point_set, params).result;
}

struct BenchmarkRow {
  Index n = 0;
  double seconds = 0.0;
  Index boundary_count = 0;
};

/// Isotropic standard Gaussian sample, d x n, drawn column by column.
inline PointSet gaussian_cloud(Index n, Index d, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  Matrix m(d, n);
  for (Index i = 0; i < n; ++i) {
    for (Index f = 0; f < d; ++f) m(f, i) = rng.normal();
  }
  return PointSet(std::move(m));
}

/// Times detect on Gaussian data of each size. Only the detection call is
/// timed; data generation is excluded.
inline std::vector<BenchmarkRow> scaling_benchmark(const std::vector<Index>& sizes, Index d, int k,
                                                   const Params& base = Params{}, std::uint64_t seed = 7) {
  for (std::size_t j = 1; j < sizes.size(); ++j) {
    if (sizes[j] < sizes[j - 1]) throw Error(ErrorCode::InvalidArgument, "sizes must be ascending");
  }
  std::vector<BenchmarkRow> rows;
  for (Index n : sizes) {
    const PointSet data = gaussian_cloud(n, d, seed);
    Params params = base;
    params.k = k;
    const auto start = std::chrono::steady_clock::now();
    const DetectionResult result = detect(data, params);
    const auto stop = std::chrono::steady_clock::now();
    rows.push_back({n, std::chrono::duration<double>(stop - start).count(), result.boundary_count});
  }
  return rows;
}

/// Least-squares slope of log(seconds) against log(n).
inline double fit_loglog_exponent(const std::vector<BenchmarkRow>& rows) {
  if (rows.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two rows to fit");
  double mx = 0.0, my = 0.0;
  for (const auto& r : rows) {
    mx += std::log(static_cast<double>(r.n));
    my += std::log(std::max(r.seconds, 1e-9));
  }
  mx /= static_cast<double>(rows.size());
  my /= static_cast<double>(rows.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& r : rows) {
    const double dx = std::log(static_cast<double>(r.n)) - mx;
    sxy += dx * (std::log(std::max(r.seconds, 1e-9)) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw Error(ErrorCode::InvalidArgument, "sizes must not all be equal");
  return sxy / sxx;
}

}  // namespace lodd
