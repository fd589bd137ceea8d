#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "lodd/core.hpp"
#include "lodd/random.hpp"

using namespace lodd;

namespace {

PointSet random_points(Index n, Index d, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  Matrix m(d, n);
  for (Index i = 0; i < n; ++i) {
    for (Index f = 0; f < d; ++f) m(f, i) = rng.uniform();
  }
  return PointSet(std::move(m));
}

ErrorCode code_of(const std::optional<Error>& e) { return e ? e->code() : ErrorCode::IoError; }

}  // namespace

TEST(PointSet, RejectsNonFinite) {
  Matrix m = Matrix::Zero(2, 3);
  m(1, 2) = std::numeric_limits<double>::quiet_NaN();
  try {
    PointSet ps(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFinite);
  }
}

TEST(PointSet, LabelsMustMatchSize) {
  EXPECT_THROW(PointSet(Matrix::Zero(2, 3), std::vector<int>{0, 1}), Error);
}

TEST(PointSet, FromRowsRejectsRaggedRows) {
  try {
    PointSet::from_rows({{0, 0}, {1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RaggedRows);
  }
}

TEST(PointSet, SubsetKeepsOrderAndLabels) {
  const PointSet ps = PointSet::from_rows({{0, 0}, {1, 0}, {2, 0}}, std::vector<int>{7, 8, 9});
  const PointSet sub = ps.subset({2, 0});
  ASSERT_EQ(sub.size(), 2);
  EXPECT_EQ(sub.points()(0, 0), 2.0);
  EXPECT_EQ((*sub.labels())[0], 9);
  EXPECT_EQ((*sub.labels())[1], 7);
}

TEST(Validate, AcceptsWellFormedInput) {
  EXPECT_FALSE(validate(random_points(100, 2, 1), Params::fixed_ratio(8, 0.2)).has_value());
}

TEST(Validate, KTooLarge) {
  EXPECT_EQ(code_of(validate(random_points(5, 2, 1), Params::fixed_ratio(8, 0.2))), ErrorCode::KTooLarge);
  EXPECT_EQ(code_of(validate(random_points(5, 2, 1), Params::fixed_ratio(5, 0.2))), ErrorCode::KTooLarge);
  EXPECT_EQ(code_of(validate(random_points(5, 2, 1), Params::fixed_ratio(0, 0.2))), ErrorCode::KTooLarge);
}

TEST(Validate, OmegaAndRatioRanges) {
  const PointSet ps = random_points(50, 2, 3);
  EXPECT_EQ(code_of(validate(ps, Params::fixed_ratio(8, 0.2, 0.0))), ErrorCode::OmegaOutOfRange);
  EXPECT_EQ(code_of(validate(ps, Params::fixed_ratio(8, 0.2, 1.0))), ErrorCode::OmegaOutOfRange);
  EXPECT_EQ(code_of(validate(ps, Params::fixed_ratio(8, 0.0))), ErrorCode::RatioOutOfRange);
  EXPECT_EQ(code_of(validate(ps, Params::fixed_ratio(8, 1.5))), ErrorCode::RatioOutOfRange);
  EXPECT_FALSE(validate(ps, Params::fixed_ratio(8, 1.0)).has_value());
}

TEST(Validate, RatioAndAdaptiveAreExclusive) {
  Params p = Params::fixed_ratio(8, 0.2);
  p.adaptive = true;
  EXPECT_EQ(code_of(validate(random_points(50, 2, 3), p)), ErrorCode::InvalidArgument);
  p = Params::adaptive_ratio(8, 0);
  EXPECT_EQ(code_of(validate(random_points(50, 2, 3), p)), ErrorCode::InvalidArgument);
}

TEST(Validate, IsPure) {
  const PointSet ps = random_points(10, 3, 9);
  const Params p = Params::fixed_ratio(12, 0.2);
  EXPECT_EQ(code_of(validate(ps, p)), code_of(validate(ps, p)));
}

TEST(BoundaryCount, FloorOfProduct) {
  EXPECT_EQ(boundary_count_for(100, 0.36), 36);
  EXPECT_EQ(boundary_count_for(10, 0.25), 2);
  EXPECT_EQ(boundary_count_for(400, 1.0 - 324.0 / 400.0), 76);
  EXPECT_EQ(boundary_count_for(7, 1.0), 7);
  EXPECT_EQ(boundary_count_for(7, 0.0), 0);
}

TEST(Errors, EveryCodeHasAName) {
  for (int c = 0; c <= static_cast<int>(ErrorCode::IoError); ++c) {
    EXPECT_STRNE(to_string(static_cast<ErrorCode>(c)), "");
  }
}
