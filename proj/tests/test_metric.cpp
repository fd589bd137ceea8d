#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "lodd/datagen.hpp"
#include "lodd/metric.hpp"
#include "lodd/neighbors.hpp"
#include "lodd/random.hpp"
#include "oracles.hpp"

using namespace lodd;
using std::numbers::pi;

namespace {

Matrix cols(const std::vector<std::vector<double>>& pts) {
  Matrix m(static_cast<Index>(pts.front().size()), static_cast<Index>(pts.size()));
  for (std::size_t j = 0; j < pts.size(); ++j) {
    for (std::size_t f = 0; f < pts[j].size(); ++f) m(static_cast<Index>(f), static_cast<Index>(j)) = pts[j][f];
  }
  return m;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

UnitNeighborhood directions(const std::vector<std::vector<double>>& dirs) {
  UnitNeighborhood n;
  n.directions = cols(dirs);
  return n;
}

Matrix random_rotation(Index d, Xoshiro256& rng) {
  Matrix g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ();
}

}  // namespace

TEST(Projection, Examples) {
  UnitNeighborhood a = project_to_unit_sphere(vec({0, 0}), cols({{3, 4}}));
  EXPECT_DOUBLE_EQ(a.directions(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(a.directions(1, 0), 0.8);
  UnitNeighborhood b = project_to_unit_sphere(vec({1, 1}), cols({{1, 3}}));
  EXPECT_DOUBLE_EQ(b.directions(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(b.directions(1, 0), 1.0);
  UnitNeighborhood c = project_to_unit_sphere(vec({0, 0}), cols({{0, 0}, {2, 0}}));
  ASSERT_EQ(c.count(), 1);
  EXPECT_EQ(c.skipped, 1);
  EXPECT_DOUBLE_EQ(c.directions(0, 0), 1.0);
}

TEST(Projection, Errors) {
  try {
    project_to_unit_sphere(vec({0, 0}), cols({{0, 0}, {0, 0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AllCoincident);
  }
  try {
    project_to_unit_sphere(vec({0, 0}), cols({{0, 0, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WrongDimension);
  }
}

TEST(Covariance, HalfAndHalf) {
  const NeighborhoodCovariance c = covariance(directions({{1, 0}, {-1, 0}}));
  EXPECT_DOUBLE_EQ(c.matrix()(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(c.matrix()(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(c.matrix()(0, 1), 0.0);
  EXPECT_NEAR(c.eigenvalues()[0], 1.0, 1e-15);
  EXPECT_NEAR(c.eigenvalues()[1], 0.0, 1e-15);
}

TEST(Covariance, Square) {
  const NeighborhoodCovariance c = covariance(directions({{1, 0}, {0, 1}, {-1, 0}, {0, -1}}));
  EXPECT_NEAR(c.eigenvalues()[0], 0.5, 1e-15);
  EXPECT_NEAR(c.eigenvalues()[1], 0.5, 1e-15);
}

TEST(Covariance, IdenticalDirections) {
  const NeighborhoodCovariance c = covariance(directions({{0, 1}, {0, 1}, {0, 1}}));
  EXPECT_EQ(c.matrix().norm(), 0.0);
  EXPECT_EQ(c.trace(), 0.0);
}

TEST(Covariance, NeedsTwoDirections) {
  EXPECT_THROW(covariance(directions({{0, 1}})), Error);
}

TEST(LoddFromEigenvalues, Examples) {
  const std::vector<double> a{0.5, 0.5}, b{1.0, 0.0}, c{1.0 / 3, 1.0 / 3, 1.0 / 3}, z{0.0, 0.0};
  EXPECT_NEAR(lodd_from_eigenvalues(a, 0.5, 2), 1.0, 1e-15);
  EXPECT_NEAR(lodd_from_eigenvalues(b, 0.5, 2), 0.5, 1e-15);
  EXPECT_NEAR(lodd_from_eigenvalues(c, 0.5, 3), 1.0, 1e-15);
  EXPECT_NEAR(oracle::lodd_pairwise(c, 0.5, 3), 1.0, 1e-15);
  for (double omega : {0.1, 0.5, 0.9}) EXPECT_EQ(lodd_from_eigenvalues(z, omega, 2), 0.0);
}

TEST(LoddFromTraces, Examples) {
  Matrix half(2, 2);
  half << 0.5, 0, 0, 0.5;
  Matrix line(2, 2);
  line << 1, 0, 0, 0;
  EXPECT_NEAR(lodd_from_traces(NeighborhoodCovariance(half), 0.5, 2), 1.0, 1e-15);
  EXPECT_NEAR(lodd_from_traces(NeighborhoodCovariance(line), 0.5, 2), 0.5, 1e-15);
}

TEST(LoddFromTraces, MatchesEigenOracles) {
  Xoshiro256 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const auto d = static_cast<std::size_t>(2 + rng.below(49));
    const auto m = static_cast<std::size_t>(2 + rng.below(60));
    const double omega = rng.uniform(0.01, 0.99);
    const auto dirs = oracle::random_directions(rng, m, d);
    const NeighborhoodCovariance cov = covariance(directions(dirs));
    const double traced = lodd_from_traces(cov, omega, static_cast<Index>(d));
    const auto jacobi = oracle::jacobi_eigenvalues(oracle::direction_covariance(dirs));
    EXPECT_NEAR(traced, lodd_from_eigenvalues(cov.eigenvalues(), omega, static_cast<Index>(d)), 1e-9);
    EXPECT_NEAR(traced, oracle::lodd_pairwise(jacobi, omega, static_cast<Index>(d)), 1e-9);
  }
}

TEST(Metric, RangeProperty) {
  Xoshiro256 rng(5);
  for (int trial = 0; trial < 20000; ++trial) {
    const auto d = static_cast<std::size_t>(2 + rng.below(19));
    const auto m = static_cast<std::size_t>(3 + rng.below(48));
    const double omega = std::array{0.1, 0.5, 0.9}[rng.below(3)];
    auto dirs = oracle::random_directions(rng, m, d);
    // Half the trials concentrate directions in a cone to probe low scores.
    if (trial % 2) {
      for (auto& v : dirs) {
        v[0] += 3.0;
        double norm = 0.0;
        for (double x : v) norm += x * x;
        for (double& x : v) x /= std::sqrt(norm);
      }
    }
    const double raw = lodd_value(covariance(directions(dirs)).trace(),
                                  covariance(directions(dirs)).trace_of_square(), omega, static_cast<Index>(d));
    ASSERT_GE(raw, -1e-9);
    ASSERT_LE(raw, 1.0 + 1e-9);
  }
}

TEST(Metric, TraceEqualsOneMinusCentroidNormSquared) {
  Xoshiro256 rng(6);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto d = static_cast<std::size_t>(2 + rng.below(19));
    const auto dirs = oracle::random_directions(rng, static_cast<std::size_t>(2 + rng.below(40)), d);
    std::vector<double> centroid(d, 0.0);
    for (const auto& v : dirs) {
      for (std::size_t f = 0; f < d; ++f) centroid[f] += v[f] / static_cast<double>(dirs.size());
    }
    double c2 = 0.0;
    for (double x : centroid) c2 += x * x;
    const std::vector<double> ev = covariance(directions(dirs)).eigenvalues();
    double sum = 0.0;
    for (double l : ev) sum += l;
    EXPECT_NEAR(sum, 1.0 - c2, 1e-12);
  }
}

TEST(Metric, RegularPolygonHasEqualEigenvaluesAndUnitScore) {
  Xoshiro256 rng(7);
  for (int k = 3; k <= 40; ++k) {
    const double theta = rng.uniform(0.0, 2 * pi);
    std::vector<std::vector<double>> dirs;
    for (int j = 0; j < k; ++j) {
      const double a = theta + 2 * pi * j / k;
      dirs.push_back({std::cos(a), std::sin(a)});
    }
    const NeighborhoodCovariance c = covariance(directions(dirs));
    EXPECT_NEAR(c.eigenvalues()[0], 0.5, 1e-9);
    EXPECT_NEAR(c.eigenvalues()[1], 0.5, 1e-9);
    for (double omega : {0.05, 0.5, 0.95}) EXPECT_NEAR(lodd_from_traces(c, omega, 2), 1.0, 1e-9);
  }
}

TEST(Metric, ScaleInvariancePerNeighbor) {
  Xoshiro256 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = 2 + static_cast<Index>(rng.below(8));
    const Index k = 3 + static_cast<Index>(rng.below(20));
    Vector q(d);
    for (Index f = 0; f < d; ++f) q(f) = rng.normal();
    Matrix nb(d, k), scaled(d, k);
    for (Index j = 0; j < k; ++j) {
      for (Index f = 0; f < d; ++f) nb(f, j) = q(f) + rng.normal();
      scaled.col(j) = q + rng.uniform(0.01, 100.0) * (nb.col(j) - q);
    }
    const double a = lodd_from_traces(covariance(project_to_unit_sphere(q, nb)), 0.5, d);
    const double b = lodd_from_traces(covariance(project_to_unit_sphere(q, scaled)), 0.5, d);
    EXPECT_NEAR(a, b, 1e-9);
  }
}

TEST(ScoreAll, GridInteriorBeatsPerimeter) {
  const GeneratedSet grid = gen_grid(10, 10);
  const LoddScores s = score_all(grid.points, build_index(grid.points, 8), 0.5);
  double min_interior = 2.0, max_perimeter = -1.0;
  for (Index i = 0; i < 100; ++i) {
    if ((*grid.boundary_truth)[static_cast<std::size_t>(i)]) {
      max_perimeter = std::max(max_perimeter, s.values[static_cast<std::size_t>(i)]);
    } else {
      min_interior = std::min(min_interior, s.values[static_cast<std::size_t>(i)]);
    }
  }
  EXPECT_GT(min_interior, max_perimeter);
  EXPECT_NEAR(min_interior, 1.0, 1e-12);
}

TEST(ScoreAll, MatchesPerPointEigenPath) {
  const PointSet ps = gen_mixture(2, 150, 3, 4.0, 1.0, 3).points;
  const NeighborIndex index = build_index(ps, 12);
  const LoddScores s = score_all(ps, index, 0.3);
  for (Index i = 0; i < ps.size(); ++i) {
    Matrix nb(3, 12);
    for (int j = 0; j < 12; ++j) nb.col(j) = ps.point(index.id(i, j));
    const auto cov = covariance(project_to_unit_sphere(ps.point(i), nb));
    EXPECT_NEAR(s.values[static_cast<std::size_t>(i)], lodd_from_eigenvalues(cov.eigenvalues(), 0.3, 3), 1e-9);
  }
}

TEST(ScoreAll, GramRouteMatchesCovarianceRoute) {
  // k < d forces the Gram route.
  const PointSet ps = gen_mixture(1, 200, 30, 0.0, 1.0, 4).points;
  const NeighborIndex index = build_index(ps, 10);
  const LoddScores s = score_all(ps, index, 0.5);
  for (Index i = 0; i < ps.size(); ++i) {
    Matrix nb(30, 10);
    for (int j = 0; j < 10; ++j) nb.col(j) = ps.point(index.id(i, j));
    const auto cov = covariance(project_to_unit_sphere(ps.point(i), nb));
    EXPECT_NEAR(s.values[static_cast<std::size_t>(i)], lodd_from_traces(cov, 0.5, 30), 1e-12);
  }
}

TEST(ScoreAll, TightBlobExtremesRankLow) {
  const PointSet ps = gen_mixture(1, 400, 2, 0.0, 0.1, 21).points;
  const LoddScores s = score_all(ps, build_index(ps, 20), 0.5);
  std::vector<double> sorted = s.values;
  std::sort(sorted.begin(), sorted.end());
  const double cutoff = sorted[static_cast<std::size_t>(0.2 * 400) - 1];
  for (Index f = 0; f < 2; ++f) {
    Index lo = 0, hi = 0;
    ps.points().row(f).minCoeff(&lo);
    ps.points().row(f).maxCoeff(&hi);
    EXPECT_LE(s.values[static_cast<std::size_t>(lo)], cutoff);
    EXPECT_LE(s.values[static_cast<std::size_t>(hi)], cutoff);
  }
}

TEST(ScoreAll, IsometryInvariance) {
  Xoshiro256 rng(12);
  const PointSet ps = gen_mixture(2, 200, 4, 3.0, 1.0, 12).points;
  const Matrix r = random_rotation(4, rng);
  Vector t(4);
  t << 5, -3, 2, 10;
  const PointSet moved((r * ps.points()).colwise() + t);
  const LoddScores a = score_all(ps, build_index(ps, 15), 0.5);
  const LoddScores b = score_all(moved, build_index(moved, 15), 0.5);
  for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-9);
}

TEST(ScoreAll, CoincidentNeighborhoodsScoreZero) {
  const PointSet ps = PointSet::from_rows({{0, 0}, {0, 0}, {0, 0}, {5, 5}, {6, 5}, {5, 6}});
  const LoddScores s = score_all(ps, build_index(ps, 2), 0.5);
  EXPECT_EQ(s.values[0], 0.0);
  EXPECT_EQ(s.values[1], 0.0);
  EXPECT_EQ(s.values[2], 0.0);
}

TEST(ScoreAll, IndependentOfThreadCount) {
  const PointSet ps = gen_mixture(3, 1000, 5, 3.0, 1.0, 1).points;
  const NeighborIndex index = build_index(ps, 20);
  EXPECT_EQ(score_all(ps, index, 0.5, 1).values, score_all(ps, index, 0.5, 3).values);
}

TEST(Dcm, Examples) {
  const Vector o = vec({0, 0});
  EXPECT_NEAR(dcm_2d(o, cols({{1, 0}, {0, 1}, {-1, 0}, {0, -1}})), 0.0, 1e-15);
  EXPECT_NEAR(dcm_2d(o, cols({{1, 0}, {2, 0}, {-1, 0}, {-2, 0}})), pi * pi / 4, 1e-12);
  Matrix same(2, 8);
  for (Index j = 0; j < 8; ++j) same.col(j) = vec({1.0 + static_cast<double>(j), 0});
  EXPECT_NEAR(dcm_2d(o, same), 7 * pi * pi / 16, 1e-12);
}

TEST(Dcm, DegenerateBlindnessOnCollinearSplits) {
  // Two groups of four on a line; k = 4.
  const std::vector<double> xs{0, 1, 2, 3, 7, 8, 9, 10};
  std::vector<std::vector<double>> rows;
  for (double x : xs) rows.push_back({x, 0});
  const PointSet ps = PointSet::from_rows(rows);
  const NeighborIndex index = build_index(ps, 4);
  auto neighbors = [&](Index i) {
    Matrix nb(2, 4);
    for (int j = 0; j < 4; ++j) nb.col(j) = ps.point(index.id(i, j));
    return nb;
  };
  const double dcm_balanced = dcm_2d(ps.point(2), neighbors(2));
  const double dcm_skewed = dcm_2d(ps.point(4), neighbors(4));
  EXPECT_NEAR(dcm_balanced, dcm_skewed, 1e-12);
  EXPECT_NEAR(dcm_balanced, pi * pi / 4, 1e-12);

  const LoddScores s = score_all(ps, index, 0.5);
  EXPECT_NEAR(s.values[2], 0.5, 1e-12);
  EXPECT_NEAR(s.values[4], 0.28125, 1e-12);
  EXPECT_GT(s.values[2], s.values[4]);
}

TEST(Dcm, Errors) {
  EXPECT_THROW(dcm_2d(vec({0, 0, 0}), cols({{1, 0, 0}, {0, 1, 0}})), Error);
  EXPECT_THROW(dcm_2d(vec({0, 0}), cols({{1, 0}, {0, 0}})), Error);
}
