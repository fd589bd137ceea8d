#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "lodd/cluster.hpp"
#include "lodd/datagen.hpp"
#include "lodd/eval.hpp"

using namespace lodd;

namespace {

PointSet two_blobs(std::uint64_t seed) { return gen_mixture(2, 100, 2, 20.0, 0.5, seed).points; }

}  // namespace

TEST(DensityPeaks, OneSeedPerBlob) {
  const PointSet ps = two_blobs(1);
  const DensityPeakScores s = density_peak_seeds(ps, 2);
  ASSERT_EQ(s.seeds.size(), 2u);
  std::set<int> blobs;
  for (Index id : s.seeds) blobs.insert((*ps.labels())[static_cast<std::size_t>(id)]);
  EXPECT_EQ(blobs.size(), 2u);
}

TEST(DensityPeaks, SingleSeedIsTopScore) {
  const PointSet ps = two_blobs(2);
  const DensityPeakScores s = density_peak_seeds(ps, 1);
  const double top = *std::max_element(s.score.begin(), s.score.end());
  EXPECT_EQ(s.score[static_cast<std::size_t>(s.seeds[0])], top);
}

TEST(DensityPeaks, EquilateralTriangleAllSeeds) {
  const PointSet ps = PointSet::from_rows({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}});
  const DensityPeakScores s = density_peak_seeds(ps, 3);
  EXPECT_EQ(std::set<Index>(s.seeds.begin(), s.seeds.end()), (std::set<Index>{0, 1, 2}));
}

TEST(DensityPeaks, DefinitionsHoldOnSmallSet) {
  const PointSet ps = gen_mixture(3, 40, 2, 3.0, 1.0, 5).points;
  const DensityPeakScores s = density_peak_seeds(ps, 3);
  const Index n = ps.size();
  std::vector<double> pairs;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) pairs.push_back((ps.point(i) - ps.point(j)).norm());
  }
  std::sort(pairs.begin(), pairs.end());
  const auto rank = static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(pairs.size())));
  EXPECT_EQ(s.cutoff, pairs[rank - 1]);
  for (Index i = 0; i < n; ++i) {
    Index count = 0;
    for (Index j = 0; j < n; ++j) {
      if (j != i && (ps.point(i) - ps.point(j)).norm() < s.cutoff) ++count;
    }
    EXPECT_EQ(s.density[static_cast<std::size_t>(i)], count);
  }
  // The densest point (smallest id on ties) holds the largest pair distance.
  Index top = 0;
  for (Index i = 1; i < n; ++i) {
    if (s.density[static_cast<std::size_t>(i)] > s.density[static_cast<std::size_t>(top)]) top = i;
  }
  EXPECT_EQ(s.min_dis[static_cast<std::size_t>(top)], pairs.back());
  for (double v : s.score) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 2.0);
  }
  EXPECT_EQ(std::set<Index>(s.seeds.begin(), s.seeds.end()).size(), 3u);
}

TEST(DensityPeaks, Deterministic) {
  const PointSet ps = gen_mixture(3, 100, 2, 3.0, 1.0, 6).points;
  EXPECT_EQ(density_peak_seeds(ps, 3, 1).seeds, density_peak_seeds(ps, 3, 4).seeds);
}

TEST(DensityPeaks, CTooLarge) {
  try {
    density_peak_seeds(PointSet::from_rows({{0, 0}, {1, 1}}), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CTooLarge);
  }
}

TEST(KMeans, SeparatedBlobsRecoverMembership) {
  const PointSet ps = two_blobs(3);
  Matrix centers(2, 2);
  centers.col(0) = ps.point(0);
  centers.col(1) = ps.point(150);
  const ClusterAssignment a = kmeans(ps, centers);
  EXPECT_DOUBLE_EQ(acc(*ps.labels(), a.label_of), 1.0);
}

TEST(KMeans, IdenticalPointsTerminate) {
  const PointSet ps(Matrix::Ones(2, 20));
  Matrix centers = Matrix::Ones(2, 2);
  const ClusterAssignment a = kmeans(ps, centers);
  EXPECT_LE(a.iterations, kMaxLloydIterations);
  for (int l : a.label_of) EXPECT_GE(l, 0);
}

TEST(KMeans, OptimalCentersFixpoint) {
  const PointSet ps = two_blobs(4);
  Matrix centers(2, 2);
  centers.col(0) = ps.points().leftCols(100).rowwise().mean();
  centers.col(1) = ps.points().rightCols(100).rowwise().mean();
  const ClusterAssignment a = kmeans(ps, centers);
  EXPECT_LE(a.iterations, 2);
  EXPECT_DOUBLE_EQ(acc(*ps.labels(), a.label_of), 1.0);
  EXPECT_NEAR((a.centers - centers).norm(), 0.0, 1e-12);
}

TEST(KMeans, EveryLabelOccupied) {
  // Two centers start on the same spot; one cluster empties and must be re-seeded.
  const PointSet ps = gen_mixture(2, 50, 2, 10.0, 1.0, 8).points;
  Matrix centers(2, 3);
  centers.col(0) = ps.point(0);
  centers.col(1) = ps.point(0);
  centers.col(2) = ps.point(60);
  const ClusterAssignment a = kmeans(ps, centers);
  std::set<int> used(a.label_of.begin(), a.label_of.end());
  EXPECT_EQ(used.size(), 3u);
}

TEST(Peel, SeparatedGaussiansPerfect) {
  const PointSet ps = gen_mixture(2, 200, 2, 6.0, 1.0, 42).points;
  const ClusterAssignment a = peel_cluster(ps, Params::fixed_ratio(20, 0.3), 2);
  EXPECT_DOUBLE_EQ(acc(*ps.labels(), a.label_of), 1.0);
}

TEST(Peel, SingleClusterAllZero) {
  const PointSet ps = gen_mixture(2, 50, 2, 6.0, 1.0, 1).points;
  const ClusterAssignment a = peel_cluster(ps, Params::fixed_ratio(10, 0.3), 1);
  for (int l : a.label_of) EXPECT_EQ(l, 0);
}

TEST(Peel, BridgedPairSeparated) {
  const PointSet ps = gen_bridged_pair(200, 12, 5).points;
  const ClusterAssignment a = peel_cluster(ps, Params::fixed_ratio(20, 0.5), 2);
  std::set<int> left, right;
  for (Index i = 0; i < 200; ++i) left.insert(a.label_of[static_cast<std::size_t>(i)]);
  for (Index i = 200; i < 400; ++i) right.insert(a.label_of[static_cast<std::size_t>(i)]);
  ASSERT_EQ(left.size(), 1u);
  ASSERT_EQ(right.size(), 1u);
  EXPECT_NE(*left.begin(), *right.begin());
}

TEST(Peel, InternalLabelsComeFromKMeans) {
  const PointSet ps = gen_mixture(3, 100, 2, 5.0, 1.0, 9).points;
  const PeelReport rep = peel_cluster_with_report(ps, Params::fixed_ratio(15, 0.3), 3);
  const auto internal = rep.detection.result.internal_ids();
  const PointSet core = ps.subset(internal);
  const DensityPeakScores peaks = density_peak_seeds(core, 3);
  Matrix centers(2, 3);
  for (int j = 0; j < 3; ++j) centers.col(j) = core.point(peaks.seeds[static_cast<std::size_t>(j)]);
  const ClusterAssignment inner = kmeans(core, centers);
  for (std::size_t j = 0; j < internal.size(); ++j) {
    EXPECT_EQ(rep.assignment.label_of[static_cast<std::size_t>(internal[j])], inner.label_of[j]);
  }
}

TEST(Peel, TinyRatioEqualsPlainSeededKMeans) {
  const PointSet ps = gen_mixture(2, 60, 2, 5.0, 1.0, 10).points;
  // floor(120 * 0.005) = 0 points peeled.
  const ClusterAssignment a = peel_cluster(ps, Params::fixed_ratio(10, 0.005), 2);
  const DensityPeakScores peaks = density_peak_seeds(ps, 2);
  Matrix centers(2, 2);
  for (int j = 0; j < 2; ++j) centers.col(j) = ps.point(peaks.seeds[static_cast<std::size_t>(j)]);
  EXPECT_EQ(a.label_of, kmeans(ps, centers).label_of);
}

TEST(Peel, AllBoundary) {
  const PointSet ps = gen_mixture(1, 30, 2, 0.0, 1.0, 1).points;
  try {
    peel_cluster(ps, Params::fixed_ratio(5, 1.0), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AllBoundary);
  }
}
