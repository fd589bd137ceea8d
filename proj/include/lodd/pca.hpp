#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "core.hpp"

namespace lodd {

/// Principal axes of a point set, ordered by descending variance. Each axis
/// is signed so that its largest-magnitude loading is positive (the first such
/// loading on exact magnitude ties).
struct PcaModel {
  Vector mean;
  /// d x d, column j is the j-th principal direction.
  Matrix components;
  /// Population variances along each component, descending.
  Vector variances;

  double total_variance() const { return variances.sum(); }

  std::vector<double> explained_fractions() const {
    const double total = total_variance();
    std::vector<double> out(static_cast<std::size_t>(variances.size()), 0.0);
    if (total <= 0.0) return out;
    for (Index j = 0; j < variances.size(); ++j) out[static_cast<std::size_t>(j)] = variances(j) / total;
    return out;
  }
};

inline PcaModel fit_pca(const PointSet& point_set) {
  const Matrix& x = point_set.points();
  const Index d = x.rows();
  PcaModel model;
  model.mean = x.rowwise().mean();
  const Matrix centered = x.colwise() - model.mean;
  const Matrix cov = (centered * centered.transpose()) / static_cast<double>(x.cols());

  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  model.components.resize(d, d);
  model.variances.resize(d);
  for (Index j = 0; j < d; ++j) {
    const Index src = d - 1 - j;  // solver returns ascending order
    model.variances(j) = std::max(0.0, solver.eigenvalues()(src));
    Vector axis = solver.eigenvectors().col(src);
    Index pivot = 0;
    for (Index f = 1; f < d; ++f) {
      if (std::abs(axis(f)) > std::abs(axis(pivot))) pivot = f;
    }
    if (axis(pivot) < 0.0) axis = -axis;
    model.components.col(j) = axis;
  }
  return model;
}

/// Mean-centered projection onto the leading target_dim principal axes.
inline PointSet pca_project(const PointSet& point_set, Index target_dim) {
  if (target_dim < 1 || target_dim > point_set.dim()) {
    throw Error(ErrorCode::InvalidArgument, "target_dim must satisfy 1 <= target_dim <= d");
  }
  const PcaModel model = fit_pca(point_set);
  const Matrix centered = point_set.points().colwise() - model.mean;
  Matrix projected = model.components.leftCols(target_dim).transpose() * centered;
  return PointSet(std::move(projected), point_set.labels());
}

}  // namespace lodd
