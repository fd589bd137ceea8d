#pragma once

// Boundary-peeled clustering: detect boundary points, cluster the remaining
// internal points with K-means seeded by density peaks, then give each
// boundary point the label of its nearest internal point.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "core.hpp"
#include "detect.hpp"
#include "neighbors.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace lodd {

/// Fraction of the pairwise-distance distribution below the density cutoff.
inline constexpr double kCutoffQuantile = 0.05;
/// Above this many points the cutoff quantile is estimated from sampled pairs.
inline constexpr Index kExactCutoffMaxPoints = 10000;
inline constexpr std::int64_t kCutoffSamplePairs = 10'000'000;
inline constexpr std::uint64_t kCutoffSampleSeed = 0x10dd5eedULL;
inline constexpr int kMaxLloydIterations = 300;

struct DensityPeakScores {
  double cutoff = 0.0;
  std::vector<Index> density;
  std::vector<double> min_dis;
  std::vector<double> score;
  /// Ids of the c highest scores, best first.
  std::vector<Index> seeds;
};

struct ClusterAssignment {
  std::vector<int> label_of;
  /// d x c cluster centers.
  Matrix centers;
  std::vector<Index> seeds;
  int iterations = 0;
};

namespace detail {

inline double point_distance(const Matrix& pts, Index a, Index b) {
  return std::sqrt(squared_distance(pts.col(a).data(), pts.col(b).data(), pts.rows()));
}

/// Nearest-rank quantile: the ceil(q * P)-th smallest of P pair distances.
inline double exact_pair_quantile(const Matrix& pts, double q) {
  const Index n = pts.cols();
  const std::int64_t pairs = static_cast<std::int64_t>(n) * (n - 1) / 2;
  if (pairs == 0) return 0.0;
  const auto rank = static_cast<std::size_t>(
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(q * static_cast<double>(pairs)))));
  // Keeps only the smallest `rank` values seen so far, compacting when the
  // buffer doubles, so memory stays O(rank) instead of O(n^2).
  std::vector<double> kept;
  kept.reserve(2 * rank);
  double threshold = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double dist = point_distance(pts, i, j);
      if (dist >= threshold) continue;
      kept.push_back(dist);
      if (kept.size() >= 2 * rank) {
        std::nth_element(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(rank - 1), kept.end());
        kept.resize(rank);
        threshold = *std::max_element(kept.begin(), kept.end());
      }
    }
  }
  std::nth_element(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(rank - 1), kept.end());
  return kept[rank - 1];
}

inline double sampled_pair_quantile(const Matrix& pts, double q) {
  const Index n = pts.cols();
  Xoshiro256 rng(kCutoffSampleSeed);
  std::vector<double> sample;
  sample.reserve(static_cast<std::size_t>(kCutoffSamplePairs));
  while (static_cast<std::int64_t>(sample.size()) < kCutoffSamplePairs) {
    const auto a = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    const auto b = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    if (a == b) continue;
    sample.push_back(point_distance(pts, a, b));
  }
  const auto rank = static_cast<std::size_t>(
      std::max(1.0, std::ceil(q * static_cast<double>(sample.size()))));
  std::nth_element(sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(rank - 1), sample.end());
  return sample[rank - 1];
}

template <typename T>
std::vector<double> minmax_scaled(const std::vector<T>& values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = static_cast<double>(*lo_it);
  const double range = static_cast<double>(*hi_it) - lo;
  if (range <= 0.0) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (static_cast<double>(values[i]) - lo) / range;
  return out;
}

}  // namespace detail

/// Density-peak seeding. density(i) counts points strictly closer than the
/// 5% pair-distance quantile; min_dis(i) is the distance to the nearest point
/// ranked denser (density descending, then id ascending), and the densest
/// point takes the largest pairwise distance. Seeds are the c best of
/// normalized density + normalized min_dis, ties to the smaller id.
inline DensityPeakScores density_peak_seeds(const PointSet& point_set, int c, unsigned threads = 0) {
  const Index n = point_set.size();
  if (c < 1) throw Error(ErrorCode::InvalidArgument, "cluster count must be >= 1");
  if (c > n) {
    throw Error(ErrorCode::CTooLarge, "c=" + std::to_string(c) + " exceeds n=" + std::to_string(n));
  }
  const Matrix& pts = point_set.points();

  DensityPeakScores out;
  out.cutoff = n <= kExactCutoffMaxPoints ? detail::exact_pair_quantile(pts, kCutoffQuantile)
                                          : detail::sampled_pair_quantile(pts, kCutoffQuantile);

  out.density.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> farthest(static_cast<std::size_t>(n), 0.0);
  parallel_for(n, threads, [&](Index i) {
    Index count = 0;
    double far = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dist = detail::point_distance(pts, i, j);
      if (dist < out.cutoff) ++count;
      far = std::max(far, dist);
    }
    out.density[static_cast<std::size_t>(i)] = count;
    farthest[static_cast<std::size_t>(i)] = far;
  });
  const double max_pair = *std::max_element(farthest.begin(), farthest.end());

  std::vector<Index> rank_of(static_cast<std::size_t>(n));
  {
    std::vector<Index> by_density(static_cast<std::size_t>(n));
    std::iota(by_density.begin(), by_density.end(), Index{0});
    std::sort(by_density.begin(), by_density.end(), [&](Index a, Index b) {
      const Index da = out.density[static_cast<std::size_t>(a)];
      const Index db = out.density[static_cast<std::size_t>(b)];
      return da > db || (da == db && a < b);
    });
    for (Index r = 0; r < n; ++r) rank_of[static_cast<std::size_t>(by_density[static_cast<std::size_t>(r)])] = r;
  }

  out.min_dis.assign(static_cast<std::size_t>(n), max_pair);
  parallel_for(n, threads, [&](Index i) {
    const Index rank = rank_of[static_cast<std::size_t>(i)];
    if (rank == 0) return;
    double best = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      if (rank_of[static_cast<std::size_t>(j)] < rank) best = std::min(best, detail::point_distance(pts, i, j));
    }
    out.min_dis[static_cast<std::size_t>(i)] = best;
  });

  const auto nd = detail::minmax_scaled(out.density);
  const auto nm = detail::minmax_scaled(out.min_dis);
  out.score.resize(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < out.score.size(); ++i) out.score[i] = nd[i] + nm[i];

  std::vector<Index> by_score(static_cast<std::size_t>(n));
  std::iota(by_score.begin(), by_score.end(), Index{0});
  std::partial_sort(by_score.begin(), by_score.begin() + c, by_score.end(), [&](Index a, Index b) {
    const double sa = out.score[static_cast<std::size_t>(a)];
    const double sb = out.score[static_cast<std::size_t>(b)];
    return sa > sb || (sa == sb && a < b);
  });
  out.seeds.assign(by_score.begin(), by_score.begin() + c);
  return out;
}

/// Lloyd iterations from the given d x c centers until the assignment stops
/// changing or kMaxLloydIterations passes. Assignment ties go to the lower
/// cluster index. An emptied cluster is re-seeded with the point farthest
/// from its own center.
inline ClusterAssignment kmeans(const PointSet& point_set, const Matrix& initial_centers) {
  const Index n = point_set.size();
  const Index d = point_set.dim();
  const Index c = initial_centers.cols();
  if (c < 1) throw Error(ErrorCode::InvalidArgument, "k-means needs at least one center");
  if (initial_centers.rows() != d) throw Error(ErrorCode::WrongDimension, "center dimension differs from data");
  const Matrix& pts = point_set.points();

  ClusterAssignment out;
  out.centers = initial_centers;
  out.label_of.assign(static_cast<std::size_t>(n), -1);
  std::vector<double> dist_to_center(static_cast<std::size_t>(n), 0.0);

  for (int iter = 1; iter <= kMaxLloydIterations; ++iter) {
    out.iterations = iter;
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < c; ++j) {
        const double d2 = detail::squared_distance(pts.col(i).data(), out.centers.col(j).data(), d);
        if (d2 < best_d2) {
          best_d2 = d2;
          best = static_cast<int>(j);
        }
      }
      dist_to_center[static_cast<std::size_t>(i)] = best_d2;
      if (out.label_of[static_cast<std::size_t>(i)] != best) {
        out.label_of[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;

    Matrix sums = Matrix::Zero(d, c);
    std::vector<Index> counts(static_cast<std::size_t>(c), 0);
    for (Index i = 0; i < n; ++i) {
      const int l = out.label_of[static_cast<std::size_t>(i)];
      sums.col(l) += pts.col(i);
      ++counts[static_cast<std::size_t>(l)];
    }
    for (Index j = 0; j < c; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) {
        out.centers.col(j) = sums.col(j) / static_cast<double>(counts[static_cast<std::size_t>(j)]);
        continue;
      }
      Index far = 0;
      for (Index i = 1; i < n; ++i) {
        if (dist_to_center[static_cast<std::size_t>(i)] > dist_to_center[static_cast<std::size_t>(far)]) far = i;
      }
      out.centers.col(j) = pts.col(far);
      out.label_of[static_cast<std::size_t>(far)] = static_cast<int>(j);
      dist_to_center[static_cast<std::size_t>(far)] = 0.0;
    }
  }
  return out;
}

struct PeelReport {
  ClusterAssignment assignment;
  DetectionReport detection;
};

/// Peel boundary points, cluster the internal points, re-attach the boundary
/// points to the label of their nearest internal point (ties to smaller id).
inline PeelReport peel_cluster_with_report(const PointSet& point_set, const Params& params, int c) {
  if (c < 1) throw Error(ErrorCode::InvalidArgument, "cluster count must be >= 1");
  PeelReport report;
  report.detection = detect_with_report(point_set, params);
  const DetectionResult& det = report.detection.result;
  const std::vector<Index> internal = det.internal_ids();
  if (internal.empty()) throw Error(ErrorCode::AllBoundary, "every point was classified as boundary");

  const PointSet core = point_set.subset(internal);
  const DensityPeakScores peaks = density_peak_seeds(core, c, params.threads);
  Matrix centers(core.dim(), c);
  for (int j = 0; j < c; ++j) centers.col(j) = core.point(peaks.seeds[static_cast<std::size_t>(j)]);

  ClusterAssignment inner = kmeans(core, centers);

  ClusterAssignment& out = report.assignment;
  out.centers = std::move(inner.centers);
  out.iterations = inner.iterations;
  for (Index s : peaks.seeds) out.seeds.push_back(internal[static_cast<std::size_t>(s)]);
  out.label_of.assign(static_cast<std::size_t>(point_set.size()), -1);
  for (std::size_t j = 0; j < internal.size(); ++j) {
    out.label_of[static_cast<std::size_t>(internal[j])] = inner.label_of[j];
  }
  const NeighborSearcher searcher(core);
  for (Index id : det.boundary_ids()) {
    const Index nearest = searcher.nearest(point_set.points().col(id).data());
    out.label_of[static_cast<std::size_t>(id)] = inner.label_of[static_cast<std::size_t>(nearest)];
  }
  return report;
}

inline ClusterAssignment peel_cluster(const PointSet& point_set, const Params& params, int c) {
  return peel_cluster_with_report(point_set, params, c).assignment;
}

}  // namespace lodd
