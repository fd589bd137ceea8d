#pragma once

// Adaptive boundary-fraction estimate under the grid-structure assumption: a
// cluster of m points is modeled as a D-dimensional lattice of side m^(1/D),
// whose interior holds (m^(1/D) - 2)^D points. Everything else is boundary,
// and the overall fraction is capped at one half.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "core.hpp"
#include "neighbors.hpp"
#include "pca.hpp"

namespace lodd {

/// Cumulative explained-variance threshold that fixes the intrinsic dimension.
inline constexpr double kIntrinsicVarianceShare = 0.8;
/// Upper limit on the estimated boundary fraction.
inline constexpr double kMaxBoundaryRatio = 0.5;

enum class RatioMode { KnownClusters, KnnComponents };

struct RatioEstimate {
  int intrinsic_dim = 2;
  std::vector<Index> components;
  /// Estimated boundary point count, after the 0.5 n cap.
  double boundary_count = 0.0;
  double ratio = 0.0;
  RatioMode mode = RatioMode::KnnComponents;
};

struct BoundaryCountBounds {
  double lower = 0.0;
  double upper = 0.0;
};

namespace detail {

inline double nth_root(double x, int degree) {
  switch (degree) {
    case 1: return x;
    case 2: return std::sqrt(x);
    case 3: return std::cbrt(x);
    default: return std::pow(x, 1.0 / degree);
  }
}

inline double integer_power(double x, int degree) {
  double r = 1.0;
  for (int i = 0; i < degree; ++i) r *= x;
  return r;
}

}  // namespace detail

/// Interior capacity (m^(1/D) - 2)^D of one cluster of m points; clusters
/// smaller than 2^D have no interior.
inline double interior_capacity(double size, int dim) {
  if (size < detail::integer_power(2.0, dim)) return 0.0;
  const double side = detail::nth_root(size, dim) - 2.0;
  return side <= 0.0 ? 0.0 : detail::integer_power(side, dim);
}

/// Smallest D with cumulative principal-component share >= 0.8, floored at 2.
inline int intrinsic_dimension(const PointSet& point_set) {
  if (point_set.size() < 2) throw Error(ErrorCode::InvalidArgument, "intrinsic dimension needs n >= 2");
  const PcaModel model = fit_pca(point_set);
  if (!(model.total_variance() > 0.0)) {
    throw Error(ErrorCode::DegenerateData, "all points are identical (zero total variance)");
  }
  const auto fractions = model.explained_fractions();
  double cumulative = 0.0;
  int dim = static_cast<int>(fractions.size());
  for (std::size_t j = 0; j < fractions.size(); ++j) {
    cumulative += fractions[j];
    // 1e-12 keeps exact splits such as 4 x 0.2 from missing the threshold by an ulp.
    if (cumulative >= kIntrinsicVarianceShare - 1e-12) {
      dim = static_cast<int>(j) + 1;
      break;
    }
  }
  return std::max(2, dim);
}

/// Range of the boundary count of an n-point lattice cluster in d dimensions:
/// lower = n - (n^(1/d) - 2)^d (4 sqrt(n) - 4 when d = 2), upper = n.
inline BoundaryCountBounds boundary_count_bounds(Index n, int d) {
  if (d < 2) throw Error(ErrorCode::DimensionTooSmall, "bounds need d >= 2");
  const double nn = static_cast<double>(n);
  if (nn < detail::integer_power(2.0, d)) {
    throw Error(ErrorCode::ConstraintViolated,
                "d=" + std::to_string(d) + " exceeds log2(n) for n=" + std::to_string(n));
  }
  BoundaryCountBounds b;
  b.upper = nn;
  b.lower = d == 2 ? 4.0 * std::sqrt(nn) - 4.0 : nn - interior_capacity(nn, d);
  return b;
}

namespace detail {

inline RatioEstimate finish_estimate(Index n, double interior, int dim, std::vector<Index> components,
                                     RatioMode mode) {
  const double nn = static_cast<double>(n);
  RatioEstimate est;
  est.intrinsic_dim = dim;
  est.components = std::move(components);
  est.mode = mode;
  est.ratio = std::min(kMaxBoundaryRatio, 1.0 - interior / nn);
  est.boundary_count = std::min(kMaxBoundaryRatio * nn, nn - interior);
  return est;
}

}  // namespace detail

/// Known cluster count c: c equal clusters of n/c points each.
inline RatioEstimate estimate_ratio_known_c(Index n, int c, int dim) {
  if (n < 1) throw Error(ErrorCode::EmptySet, "n must be >= 1");
  if (c < 1) throw Error(ErrorCode::InvalidArgument, "cluster count must be >= 1");
  if (dim < 2) throw Error(ErrorCode::DimensionTooSmall, "intrinsic dimension must be >= 2");
  const double size = static_cast<double>(n) / static_cast<double>(c);
  const double interior = static_cast<double>(c) * interior_capacity(size, dim);
  // Component sizes are reported rounded down; the estimate uses the real n/c.
  std::vector<Index> comps(static_cast<std::size_t>(c), n / c);
  return detail::finish_estimate(n, interior, dim, std::move(comps), RatioMode::KnownClusters);
}

/// Unknown cluster count: every KNN-graph component is its own cluster.
inline RatioEstimate estimate_ratio_components(const std::vector<Index>& component_sizes, int dim) {
  if (component_sizes.empty()) throw Error(ErrorCode::EmptySet, "no components");
  if (dim < 2) throw Error(ErrorCode::DimensionTooSmall, "intrinsic dimension must be >= 2");
  Index n = 0;
  // Equal sizes are grouped so that c equal components give exactly the same
  // arithmetic as the known-c estimate.
  std::map<Index, Index> multiplicity;
  for (Index s : component_sizes) {
    if (s < 1) throw Error(ErrorCode::InvalidArgument, "component sizes must be positive");
    n += s;
    ++multiplicity[s];
  }
  double interior = 0.0;
  for (const auto& [size, count] : multiplicity) {
    interior += static_cast<double>(count) * interior_capacity(static_cast<double>(size), dim);
  }
  return detail::finish_estimate(n, interior, dim, component_sizes, RatioMode::KnnComponents);
}

/// Full adaptive estimate for a point set whose neighbor index is already built.
inline RatioEstimate estimate_ratio(const PointSet& point_set, const NeighborIndex& index,
                                    std::optional<int> cluster_count = std::nullopt) {
  const int dim = intrinsic_dimension(point_set);
  if (cluster_count) return estimate_ratio_known_c(point_set.size(), *cluster_count, dim);
  return estimate_ratio_components(knn_graph_components(index).sizes, dim);
}

inline const char* to_string(RatioMode mode) {
  return mode == RatioMode::KnownClusters ? "known-c" : "knn-components";
}

}  // namespace lodd
