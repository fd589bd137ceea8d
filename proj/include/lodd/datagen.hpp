#pragma once

// Seeded synthetic point sets: lattices, Gaussian mixtures, a ring-and-blob
// layout with a weakly connected pair and a sparse cluster, and 3-D surfaces
// with holes. All randomness comes from Xoshiro256 (see random.hpp), so every
// generator is a pure function of its arguments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "neighbors.hpp"
#include "random.hpp"

namespace lodd {

struct GeneratedSet {
  PointSet points;
  /// Per-point boundary ground truth, where the shape defines one.
  std::optional<std::vector<bool>> boundary_truth;
};

enum class GenKind { Grid, GaussianMixture, RingBlob, SphereHoles, SurfaceHoles };

inline std::optional<GenKind> parse_gen_kind(const std::string& s) {
  if (s == "grid") return GenKind::Grid;
  if (s == "gaussian-mixture") return GenKind::GaussianMixture;
  if (s == "ring-blob") return GenKind::RingBlob;
  if (s == "sphere-holes") return GenKind::SphereHoles;
  if (s == "surface-holes") return GenKind::SurfaceHoles;
  return std::nullopt;
}

struct GenSpec {
  GenKind kind = GenKind::Grid;
  std::uint64_t seed = 0;
  bool with_boundary_truth = true;
  // grid, surface-holes
  Index rows = 10;
  Index cols = 10;
  double spacing = 1.0;
  // sphere-holes
  Index n = 5000;
  // sphere-holes, surface-holes
  int holes = 3;
  double hole_radius = 0.3;
  // gaussian-mixture
  int clusters = 2;
  Index per_cluster = 200;
  Index dim = 2;
  double separation = 6.0;
  double sigma = 1.0;
};

/// rows x cols lattice; points on the outer rows or columns are boundary.
inline GeneratedSet gen_grid(Index rows, Index cols, double spacing = 1.0) {
  if (rows < 2 || cols < 2) throw Error(ErrorCode::InvalidArgument, "grid needs rows, cols >= 2");
  if (!(spacing > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid spacing must be positive");
  Matrix m(2, rows * cols);
  std::vector<bool> truth(static_cast<std::size_t>(rows * cols));
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      const Index id = r * cols + c;
      m(0, id) = static_cast<double>(c) * spacing;
      m(1, id) = static_cast<double>(r) * spacing;
      truth[static_cast<std::size_t>(id)] = r == 0 || r == rows - 1 || c == 0 || c == cols - 1;
    }
  }
  return {PointSet(std::move(m)), std::move(truth)};
}

/// `clusters` isotropic Gaussians of `per_cluster` points each. Means lie on
/// the first axis, `separation` standard deviations apart. Labels attached.
inline GeneratedSet gen_mixture(int clusters, Index per_cluster, Index dim, double separation, double sigma,
                                std::uint64_t seed) {
  if (clusters < 1 || per_cluster < 1 || dim < 1) {
    throw Error(ErrorCode::InvalidArgument, "mixture counts must be positive");
  }
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  Xoshiro256 rng(seed);
  const Index n = clusters * per_cluster;
  Matrix m(dim, n);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int c = 0; c < clusters; ++c) {
    for (Index j = 0; j < per_cluster; ++j) {
      const Index id = c * per_cluster + j;
      for (Index f = 0; f < dim; ++f) m(f, id) = rng.normal(0.0, sigma);
      m(0, id) += static_cast<double>(c) * separation * sigma;
      labels[static_cast<std::size_t>(id)] = c;
    }
  }
  return {PointSet(std::move(m), std::move(labels)), std::nullopt};
}

namespace detail {

inline void uniform_disk(Xoshiro256& rng, double cx, double cy, double radius, Index count, int label,
                         std::vector<std::vector<double>>& rows, std::vector<int>& labels) {
  for (Index j = 0; j < count; ++j) {
    const double r = radius * std::sqrt(rng.uniform());
    const double a = 2.0 * std::numbers::pi * rng.uniform();
    rows.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
    labels.push_back(label);
  }
}

inline void bridged_pair(Xoshiro256& rng, double cx, double cy, Index per_blob, Index bridge_points, int first_label,
                         std::vector<std::vector<double>>& rows, std::vector<int>& labels) {
  constexpr double kRadius = 1.0;
  constexpr double kGap = 1.0;  // edge-to-edge distance spanned by the bridge
  const double right_cx = cx + 2.0 * kRadius + kGap;
  uniform_disk(rng, cx, cy, kRadius, per_blob, first_label, rows, labels);
  uniform_disk(rng, right_cx, cy, kRadius, per_blob, first_label + 1, rows, labels);
  for (Index j = 0; j < bridge_points; ++j) {
    const double t = (static_cast<double>(j) + 0.5) / static_cast<double>(bridge_points);
    const double x = cx + kRadius + t * kGap;
    rows.push_back({x, cy + rng.uniform(-0.02, 0.02)});
    labels.push_back(t < 0.5 ? first_label : first_label + 1);
  }
}

}  // namespace detail

/// Two uniform unit disks whose facing edges are joined by a thin line of
/// bridge points. Labels 0 and 1; bridge points take the nearer disk's label.
inline GeneratedSet gen_bridged_pair(Index per_blob, Index bridge_points, std::uint64_t seed) {
  if (per_blob < 1) throw Error(ErrorCode::InvalidArgument, "per_blob must be positive");
  Xoshiro256 rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  detail::bridged_pair(rng, 0.0, 0.0, per_blob, bridge_points, 0, rows, labels);
  return {PointSet::from_rows(rows, std::move(labels)), std::nullopt};
}

/// Ring-and-blob layout: a dense disk (label 0) inside a ring (label 1), a
/// bridged pair of disks (labels 2, 3) and a sparse disk (label 4) whose
/// density is about 11x lower than the central disk.
inline GeneratedSet gen_ring_blob(std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  detail::uniform_disk(rng, 0.0, 0.0, 1.0, 300, 0, rows, labels);
  for (Index j = 0; j < 600; ++j) {
    const double r = std::sqrt(rng.uniform(2.5 * 2.5, 3.0 * 3.0));
    const double a = 2.0 * std::numbers::pi * rng.uniform();
    rows.push_back({r * std::cos(a), r * std::sin(a)});
    labels.push_back(1);
  }
  detail::bridged_pair(rng, 6.0, -1.0, 200, 12, 2, rows, labels);
  detail::uniform_disk(rng, 8.0, 5.0, 1.5, 60, 4, rows, labels);
  return {PointSet::from_rows(rows, std::move(labels)), std::nullopt};
}

namespace detail {

/// Mean nearest-neighbor distance of a point set.
inline double mean_nn_distance(const PointSet& ps) {
  const NeighborIndex index = build_index(ps, 1);
  double sum = 0.0;
  for (Index i = 0; i < ps.size(); ++i) sum += index.distance(i, 0);
  return sum / static_cast<double>(ps.size());
}

inline Eigen::Vector3d random_unit_vector(Xoshiro256& rng) {
  for (;;) {
    Eigen::Vector3d v(rng.normal(), rng.normal(), rng.normal());
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

inline double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace detail

inline constexpr int kMaxPlacementAttempts = 1000;

/// Fibonacci lattice of n points on the unit sphere with `hole_count`
/// spherical caps of angular radius `hole_radius` removed. A point is boundary
/// truth when its angular distance to a hole center lies within one mean
/// nearest-neighbor spacing outside the cap edge. The output holds fewer than
/// n points.
inline GeneratedSet gen_sphere_holes(Index n, int hole_count, double hole_radius, std::uint64_t seed) {
  if (n < 100) throw Error(ErrorCode::InvalidArgument, "sphere needs n >= 100");
  if (hole_count < 0) throw Error(ErrorCode::InvalidArgument, "hole count must be >= 0");
  if (hole_count > 0 && !(hole_radius > 0.0 && hole_radius < std::numbers::pi / 2)) {
    throw Error(ErrorCode::InvalidArgument, "hole radius must lie in (0, pi/2)");
  }
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Eigen::Vector3d> lattice(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * static_cast<double>(i);
    lattice[static_cast<std::size_t>(i)] = {r * std::cos(phi), r * std::sin(phi), z};
  }

  // Holes keep a margin of a few lattice spacings between rims.
  Xoshiro256 rng(seed);
  const double approx_spacing = std::sqrt(4.0 * std::numbers::pi / static_cast<double>(n));
  const double min_separation = 2.0 * hole_radius + 4.0 * approx_spacing;
  std::vector<Eigen::Vector3d> centers;
  int attempts = 0;
  while (static_cast<int>(centers.size()) < hole_count) {
    if (++attempts > kMaxPlacementAttempts) {
      throw Error(ErrorCode::PlacementFailure,
                  "could not place " + std::to_string(hole_count) + " non-overlapping holes");
    }
    const Eigen::Vector3d c = detail::random_unit_vector(rng);
    const bool clear = std::all_of(centers.begin(), centers.end(), [&](const Eigen::Vector3d& o) {
      return detail::angle_between(c, o) >= min_separation;
    });
    if (clear) centers.push_back(c);
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> nearest_hole_angle;
  for (const auto& p : lattice) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& c : centers) nearest = std::min(nearest, detail::angle_between(p, c));
    if (nearest < hole_radius) continue;
    rows.push_back({p.x(), p.y(), p.z()});
    nearest_hole_angle.push_back(nearest);
  }
  PointSet points = PointSet::from_rows(rows);

  std::vector<bool> truth(rows.size(), false);
  if (hole_count > 0) {
    // Chord length to arc angle on the unit sphere.
    const double band = 2.0 * std::asin(std::min(1.0, detail::mean_nn_distance(points) / 2.0));
    for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = nearest_hole_angle[i] < hole_radius + band;
  }
  return {std::move(points), std::move(truth)};
}

/// Jittered rows x cols sample of the height field z = 0.15 sin(2 pi x)
/// cos(2 pi y) over the unit square, with circular holes (in the xy plane)
/// removed. Boundary truth: within one grid spacing of the square's edge or
/// outside a hole rim.
inline GeneratedSet gen_surface_holes(Index rows, Index cols, int hole_count, double hole_radius,
                                      std::uint64_t seed) {
  if (rows < 4 || cols < 4) throw Error(ErrorCode::InvalidArgument, "surface needs rows, cols >= 4");
  if (hole_count < 0) throw Error(ErrorCode::InvalidArgument, "hole count must be >= 0");
  if (hole_count > 0 && !(hole_radius > 0.0 && hole_radius < 0.25)) {
    throw Error(ErrorCode::InvalidArgument, "hole radius must lie in (0, 0.25)");
  }
  Xoshiro256 rng(seed);
  const double hx = 1.0 / static_cast<double>(cols - 1);
  const double hy = 1.0 / static_cast<double>(rows - 1);
  const double band = std::max(hx, hy);

  std::vector<Eigen::Vector2d> centers;
  int attempts = 0;
  const double margin = hole_radius + 3.0 * band;
  while (static_cast<int>(centers.size()) < hole_count) {
    if (++attempts > kMaxPlacementAttempts) {
      throw Error(ErrorCode::PlacementFailure,
                  "could not place " + std::to_string(hole_count) + " non-overlapping holes");
    }
    const Eigen::Vector2d c(rng.uniform(margin, 1.0 - margin), rng.uniform(margin, 1.0 - margin));
    const bool clear = std::all_of(centers.begin(), centers.end(), [&](const Eigen::Vector2d& o) {
      return (c - o).norm() >= 2.0 * hole_radius + 4.0 * band;
    });
    if (clear) centers.push_back(c);
  }

  std::vector<std::vector<double>> pts;
  std::vector<bool> truth;
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      double x = static_cast<double>(c) * hx;
      double y = static_cast<double>(r) * hy;
      // Jitter interior lattice sites only, keeping the square's edge straight.
      const double jx = rng.uniform(-0.2, 0.2) * hx;
      const double jy = rng.uniform(-0.2, 0.2) * hy;
      if (c > 0 && c < cols - 1) x += jx;
      if (r > 0 && r < rows - 1) y += jy;
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& h : centers) nearest = std::min(nearest, (Eigen::Vector2d(x, y) - h).norm());
      if (nearest < hole_radius) continue;
      const double edge = std::min({x, 1.0 - x, y, 1.0 - y});
      const double z = 0.15 * std::sin(2.0 * std::numbers::pi * x) * std::cos(2.0 * std::numbers::pi * y);
      pts.push_back({x, y, z});
      truth.push_back(edge < band || nearest < hole_radius + band);
    }
  }
  return {PointSet::from_rows(pts), std::move(truth)};
}

/// Dispatches a GenSpec to its generator.
inline GeneratedSet generate(const GenSpec& spec) {
  GeneratedSet out;
  switch (spec.kind) {
    case GenKind::Grid: out = gen_grid(spec.rows, spec.cols, spec.spacing); break;
    case GenKind::GaussianMixture:
      out = gen_mixture(spec.clusters, spec.per_cluster, spec.dim, spec.separation, spec.sigma, spec.seed);
      break;
    case GenKind::RingBlob: out = gen_ring_blob(spec.seed); break;
    case GenKind::SphereHoles: out = gen_sphere_holes(spec.n, spec.holes, spec.hole_radius, spec.seed); break;
    case GenKind::SurfaceHoles:
      out = gen_surface_holes(spec.rows, spec.cols, spec.holes, spec.hole_radius, spec.seed);
      break;
  }
  if (!spec.with_boundary_truth) out.boundary_truth.reset();
  return out;
}

}  // namespace lodd
