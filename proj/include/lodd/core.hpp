#pragma once

// Shared domain types for the LoDD boundary detector: point sets, parameter
// bundle, score vectors and detection results.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lodd {

using Index = std::ptrdiff_t;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ErrorCode {
  NonFinite,
  EmptySet,
  KTooLarge,
  OmegaOutOfRange,
  RatioOutOfRange,
  InvalidArgument,
  AllCoincident,
  TooFewDirections,
  DimensionTooSmall,
  WrongDimension,
  NumericalRange,
  DegenerateData,
  ConstraintViolated,
  CTooLarge,
  AllBoundary,
  LengthMismatch,
  PlacementFailure,
  ParseError,
  RaggedRows,
  NonNumeric,
  IoError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::OmegaOutOfRange: return "OmegaOutOfRange";
    case ErrorCode::RatioOutOfRange: return "RatioOutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AllCoincident: return "AllCoincident";
    case ErrorCode::TooFewDirections: return "TooFewDirections";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::WrongDimension: return "WrongDimension";
    case ErrorCode::NumericalRange: return "NumericalRange";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::ConstraintViolated: return "ConstraintViolated";
    case ErrorCode::CTooLarge: return "CTooLarge";
    case ErrorCode::AllBoundary: return "AllBoundary";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::PlacementFailure: return "PlacementFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::NonNumeric: return "NonNumeric";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code that
/// names the violated invariant.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Immutable d x n point collection. Column i holds point i; the point id is
/// its column index, so duplicate coordinates are representable.
class PointSet {
 public:
  PointSet() = default;

  explicit PointSet(Matrix points, std::optional<std::vector<int>> labels = std::nullopt)
      : points_(std::move(points)), labels_(std::move(labels)) {
    if (points_.rows() < 1 || points_.cols() < 1) {
      throw Error(ErrorCode::EmptySet, "point set needs n >= 1 and d >= 1");
    }
    if (!points_.allFinite()) {
      for (Index i = 0; i < points_.cols(); ++i) {
        for (Index f = 0; f < points_.rows(); ++f) {
          if (!std::isfinite(points_(f, i))) {
            throw Error(ErrorCode::NonFinite, "coordinate " + std::to_string(f) + " of point " +
                                                  std::to_string(i) + " is not finite");
          }
        }
      }
    }
    if (labels_ && static_cast<Index>(labels_->size()) != points_.cols()) {
      throw Error(ErrorCode::LengthMismatch, "labels.length (" + std::to_string(labels_->size()) +
                                                 ") != n (" + std::to_string(points_.cols()) + ")");
    }
  }

  /// Builds from row-major point rows (one inner vector per point).
  static PointSet from_rows(const std::vector<std::vector<double>>& rows,
                            std::optional<std::vector<int>> labels = std::nullopt) {
    if (rows.empty() || rows.front().empty()) {
      throw Error(ErrorCode::EmptySet, "point set needs n >= 1 and d >= 1");
    }
    const auto d = static_cast<Index>(rows.front().size());
    Matrix m(d, static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<Index>(rows[i].size()) != d) {
        throw Error(ErrorCode::RaggedRows, "row " + std::to_string(i) + " has " +
                                               std::to_string(rows[i].size()) + " values, expected " +
                                               std::to_string(d));
      }
      for (Index f = 0; f < d; ++f) m(f, static_cast<Index>(i)) = rows[i][static_cast<std::size_t>(f)];
    }
    return PointSet(std::move(m), std::move(labels));
  }

  Index size() const noexcept { return points_.cols(); }
  Index dim() const noexcept { return points_.rows(); }

  const Matrix& points() const noexcept { return points_; }
  auto point(Index i) const { return points_.col(i); }

  bool has_labels() const noexcept { return labels_.has_value(); }
  const std::optional<std::vector<int>>& labels() const noexcept { return labels_; }

  /// Sub-collection of the given ids, in the given order. Labels follow.
  PointSet subset(const std::vector<Index>& ids) const {
    Matrix m(dim(), static_cast<Index>(ids.size()));
    std::optional<std::vector<int>> sub_labels;
    if (labels_) sub_labels.emplace();
    for (std::size_t j = 0; j < ids.size(); ++j) {
      m.col(static_cast<Index>(j)) = points_.col(ids[j]);
      if (labels_) sub_labels->push_back((*labels_)[static_cast<std::size_t>(ids[j])]);
    }
    return PointSet(std::move(m), std::move(sub_labels));
  }

  PointSet with_labels(std::optional<std::vector<int>> labels) const {
    return PointSet(points_, std::move(labels));
  }

 private:
  Matrix points_;
  std::optional<std::vector<int>> labels_;
};

inline constexpr double kDefaultOmega = 0.5;

/// Inputs of the detector. Exactly one of {ratio, adaptive} governs the split.
struct Params {
  int k = 20;
  double omega = kDefaultOmega;
  std::optional<double> ratio;
  bool adaptive = true;
  std::optional<int> cluster_count;
  /// Worker count for the per-point maps; 0 means all hardware threads.
  unsigned threads = 0;

  static Params fixed_ratio(int k, double ratio, double omega = kDefaultOmega) {
    Params p;
    p.k = k;
    p.omega = omega;
    p.ratio = ratio;
    p.adaptive = false;
    return p;
  }

  static Params adaptive_ratio(int k, std::optional<int> clusters = std::nullopt,
                               double omega = kDefaultOmega) {
    Params p;
    p.k = k;
    p.omega = omega;
    p.adaptive = true;
    p.cluster_count = clusters;
    return p;
  }
};

struct LoddScores {
  std::vector<double> values;
  Params params;
};

struct DetectionResult {
  std::vector<bool> boundary_mask;
  /// Point ids sorted ascending by (score, id).
  std::vector<Index> order;
  double effective_ratio = 0.0;
  Index boundary_count = 0;

  std::vector<Index> boundary_ids() const {
    return {order.begin(), order.begin() + boundary_count};
  }
  std::vector<Index> internal_ids() const {
    std::vector<Index> ids;
    for (Index i = 0; i < static_cast<Index>(boundary_mask.size()); ++i) {
      if (!boundary_mask[static_cast<std::size_t>(i)]) ids.push_back(i);
    }
    return ids;
  }
};

/// Number of boundary points selected for a ratio: floor(n * ratio). A
/// relative slack of 1e-9 absorbs products such as 400 * (1 - 0.81) that land
/// one ulp below an integer.
inline Index boundary_count_for(Index n, double ratio) {
  const double raw = static_cast<double>(n) * ratio;
  auto count = static_cast<Index>(std::floor(raw + 1e-9 * std::max(1.0, raw)));
  return std::clamp<Index>(count, 0, n);
}

/// Returns the first violated invariant, or nullopt when the inputs are usable.
inline std::optional<Error> validate(const PointSet& point_set, const Params& params) {
  const Index n = point_set.size();
  if (n < 1 || point_set.dim() < 1) {
    return Error(ErrorCode::EmptySet, "point set needs n >= 1 and d >= 1");
  }
  if (!point_set.points().allFinite()) {
    return Error(ErrorCode::NonFinite, "point set contains NaN or Inf");
  }
  if (params.k < 1 || params.k >= n) {
    return Error(ErrorCode::KTooLarge, "k must satisfy 1 <= k <= n-1 (k=" + std::to_string(params.k) +
                                           ", n=" + std::to_string(n) + ")");
  }
  if (!(params.omega > 0.0 && params.omega < 1.0)) {
    return Error(ErrorCode::OmegaOutOfRange, "omega must lie in (0,1)");
  }
  if (params.ratio && params.adaptive) {
    return Error(ErrorCode::InvalidArgument, "ratio and adaptive are mutually exclusive");
  }
  if (!params.ratio && !params.adaptive) {
    return Error(ErrorCode::InvalidArgument, "either ratio or adaptive must be set");
  }
  if (params.ratio && !(*params.ratio > 0.0 && *params.ratio <= 1.0)) {
    return Error(ErrorCode::RatioOutOfRange, "ratio must lie in (0,1]");
  }
  if (params.cluster_count && *params.cluster_count < 1) {
    return Error(ErrorCode::InvalidArgument, "cluster_count must be >= 1");
  }
  return std::nullopt;
}

inline void require_valid(const PointSet& point_set, const Params& params) {
  if (auto err = validate(point_set, params)) throw *err;
}

}  // namespace lodd
