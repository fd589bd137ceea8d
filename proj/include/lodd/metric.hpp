#pragma once

// Local direction dispersion (LoDD): each neighbor is projected onto the unit
// sphere around the query point, and the centrality is read off the spectrum
// of the population covariance of those unit directions. With S the sum of
// the eigenvalues and Q the sum of their squares,
//
//   L = (d - w) / (d - 1) * S^2 - d (1 - w) / (d - 1) * Q,
//
// where S = tr(C) and Q = tr(C^2) = ||C||_F^2, so the production path never
// decomposes C. L lies in [0, 1]; it is 1 when all d eigenvalues equal 1/d and
// 0 when every direction coincides.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "core.hpp"
#include "neighbors.hpp"
#include "parallel.hpp"

namespace lodd {

/// Slack allowed outside [0, 1] before a LoDD value is treated as an error.
inline constexpr double kLoddSlack = 1e-9;

struct UnitNeighborhood {
  /// d x m, one unit direction per usable neighbor.
  Matrix directions;
  /// Neighbors at distance zero from the query, excluded from directions.
  Index skipped = 0;

  Index count() const { return directions.cols(); }
};

class NeighborhoodCovariance {
 public:
  explicit NeighborhoodCovariance(Matrix matrix) : matrix_(std::move(matrix)) {}

  const Matrix& matrix() const { return matrix_; }
  Index dim() const { return matrix_.rows(); }

  double trace() const { return matrix_.trace(); }
  /// tr(C^2), the squared Frobenius norm of the symmetric C.
  double trace_of_square() const { return matrix_.squaredNorm(); }

  /// Descending eigenvalues, computed on first use. Diagnostic only.
  const std::vector<double>& eigenvalues() const {
    if (!eigenvalues_) {
      Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_, Eigen::EigenvaluesOnly);
      const Vector& ascending = solver.eigenvalues();
      eigenvalues_.emplace(ascending.data(), ascending.data() + ascending.size());
      std::reverse(eigenvalues_->begin(), eigenvalues_->end());
    }
    return *eigenvalues_;
  }

 private:
  Matrix matrix_;
  mutable std::optional<std::vector<double>> eigenvalues_;
};

/// Maps each neighbor to (x_j - x_i) / ||x_j - x_i||. Neighbors coincident with
/// the query are counted in `skipped` instead.
template <typename QueryVec, typename NeighborMat>
UnitNeighborhood project_to_unit_sphere(const QueryVec& query, const NeighborMat& neighbors) {
  const Index d = query.size();
  if (neighbors.cols() == 0) throw Error(ErrorCode::InvalidArgument, "neighbor list is empty");
  if (neighbors.rows() != d) throw Error(ErrorCode::WrongDimension, "neighbor dimension differs from query");

  UnitNeighborhood out;
  out.directions.resize(d, neighbors.cols());
  Index m = 0;
  for (Index j = 0; j < neighbors.cols(); ++j) {
    Vector offset = neighbors.col(j) - query;
    const double norm = offset.norm();
    if (norm == 0.0) {
      ++out.skipped;
      continue;
    }
    out.directions.col(m++) = offset / norm;
  }
  if (m == 0) throw Error(ErrorCode::AllCoincident, "every neighbor coincides with the query");
  out.directions.conservativeResize(d, m);
  return out;
}

/// Mean-centered population covariance (divisor m) of the unit directions.
inline NeighborhoodCovariance covariance(const UnitNeighborhood& nbhd) {
  const Index m = nbhd.count();
  if (m < 2) throw Error(ErrorCode::TooFewDirections, "covariance needs at least 2 directions");
  const Vector centroid = nbhd.directions.rowwise().mean();
  const Matrix centered = nbhd.directions.colwise() - centroid;
  return NeighborhoodCovariance((centered * centered.transpose()) / static_cast<double>(m));
}

/// The LoDD polynomial in S = sum(lambda) and Q = sum(lambda^2), unclamped.
inline double lodd_value(double sum, double sum_of_squares, double omega, Index d) {
  if (d < 2) throw Error(ErrorCode::DimensionTooSmall, "LoDD needs d >= 2");
  const double dd = static_cast<double>(d);
  return (dd - omega) / (dd - 1.0) * sum * sum - dd * (1.0 - omega) / (dd - 1.0) * sum_of_squares;
}

namespace detail {

inline double checked_lodd(double raw) {
  if (!(raw >= -kLoddSlack && raw <= 1.0 + kLoddSlack)) {
    throw Error(ErrorCode::NumericalRange, "LoDD value " + std::to_string(raw) + " outside [0,1]");
  }
  return std::clamp(raw, 0.0, 1.0);
}

}  // namespace detail

/// LoDD from an eigenvalue list; missing trailing eigenvalues count as zero.
inline double lodd_from_eigenvalues(std::span<const double> eigenvalues, double omega, Index d) {
  if (d < 2) throw Error(ErrorCode::DimensionTooSmall, "LoDD needs d >= 2");
  if (static_cast<Index>(eigenvalues.size()) > d) {
    throw Error(ErrorCode::WrongDimension, "more eigenvalues than dimensions");
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double lambda : eigenvalues) {
    sum += lambda;
    sum_sq += lambda * lambda;
  }
  return detail::checked_lodd(lodd_value(sum, sum_sq, omega, d));
}

inline double lodd_from_traces(const NeighborhoodCovariance& cov, double omega, Index d) {
  if (d < 2) throw Error(ErrorCode::DimensionTooSmall, "LoDD needs d >= 2");
  return detail::checked_lodd(lodd_value(cov.trace(), cov.trace_of_square(), omega, d));
}

namespace detail {

/// Per-worker scratch for the trace-only scoring path.
struct ScoringScratch {
  Matrix centered;  // d x m
  Matrix product;
};

/// Raw LoDD of one query point, or 0 when fewer than two usable directions
/// remain. tr(C^2) is taken from the d x d covariance when m >= d and from
/// the m x m Gram matrix otherwise; both have the same Frobenius norm.
inline double score_point(const Matrix& pts, const NeighborIndex& index, Index i, double omega,
                          ScoringScratch& scratch) {
  const Index d = pts.rows();
  scratch.centered.resize(d, index.k);
  const auto query = pts.col(i);
  Index m = 0;
  for (int j = 0; j < index.k; ++j) {
    const Index nb = index.id(i, j);
    double norm_sq = 0.0;
    for (Index f = 0; f < d; ++f) {
      const double t = pts(f, nb) - query(f);
      scratch.centered(f, m) = t;
      norm_sq += t * t;
    }
    if (norm_sq == 0.0) continue;
    scratch.centered.col(m) /= std::sqrt(norm_sq);
    ++m;
  }
  if (m < 2) return 0.0;

  auto dirs = scratch.centered.leftCols(m);
  const Vector centroid = dirs.rowwise().mean();
  dirs.colwise() -= centroid;
  const double inv_m = 1.0 / static_cast<double>(m);
  const double trace = dirs.squaredNorm() * inv_m;
  if (m >= d) {
    scratch.product.noalias() = dirs * dirs.transpose();
  } else {
    scratch.product.noalias() = dirs.transpose() * dirs;
  }
  const double trace_sq = scratch.product.squaredNorm() * inv_m * inv_m;
  return lodd_value(trace, trace_sq, omega, d);
}

}  // namespace detail

/// LoDD of every point against a prebuilt neighbor index. Points whose
/// neighborhood leaves fewer than two usable directions score 0.
inline LoddScores score_all(const PointSet& point_set, const NeighborIndex& index, double omega,
                            unsigned threads = 0) {
  const Index n = point_set.size();
  const Index d = point_set.dim();
  if (d < 2) throw Error(ErrorCode::DimensionTooSmall, "LoDD needs d >= 2");
  if (index.n != n) throw Error(ErrorCode::LengthMismatch, "neighbor index does not match point set");
  if (!(omega > 0.0 && omega < 1.0)) throw Error(ErrorCode::OmegaOutOfRange, "omega must lie in (0,1)");

  LoddScores scores;
  scores.values.assign(static_cast<std::size_t>(n), 0.0);
  scores.params.k = index.k;
  scores.params.omega = omega;
  const Matrix& pts = point_set.points();

  constexpr Index kBlock = 256;
  const Index blocks = (n + kBlock - 1) / kBlock;
  parallel_for(blocks, threads, [&](Index b) {
    detail::ScoringScratch scratch;
    for (Index i = b * kBlock; i < std::min(n, (b + 1) * kBlock); ++i) {
      scores.values[static_cast<std::size_t>(i)] =
          detail::checked_lodd(detail::score_point(pts, index, i, omega, scratch));
    }
  });
  return scores;
}

/// Reference 2-D direction centrality: variance of the k central angles
/// between consecutive neighbor directions, with the wrap-around gap closing
/// the circle. Coincident neighbors are excluded before counting k.
template <typename QueryVec, typename NeighborMat>
double dcm_2d(const QueryVec& query, const NeighborMat& neighbors) {
  if (query.size() != 2 || neighbors.rows() != 2) {
    throw Error(ErrorCode::WrongDimension, "DCM is defined for 2-D points only");
  }
  const UnitNeighborhood nbhd = project_to_unit_sphere(query, neighbors);
  const Index k = nbhd.count();
  if (k < 2) throw Error(ErrorCode::TooFewDirections, "DCM needs at least 2 non-coincident neighbors");

  std::vector<double> angles(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j) {
    angles[static_cast<std::size_t>(j)] = std::atan2(nbhd.directions(1, j), nbhd.directions(0, j));
  }
  std::sort(angles.begin(), angles.end());

  const double even = 2.0 * std::numbers::pi / static_cast<double>(k);
  double acc = 0.0;
  for (Index j = 0; j < k; ++j) {
    const double gap = j + 1 < k ? angles[static_cast<std::size_t>(j + 1)] - angles[static_cast<std::size_t>(j)]
                                 : angles.front() + 2.0 * std::numbers::pi - angles.back();
    acc += (gap - even) * (gap - even);
  }
  return acc / static_cast<double>(k);
}

}  // namespace lodd
