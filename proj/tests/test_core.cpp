#include "mppv/core.hpp"

#include <gtest/gtest.h>

#include <vector>

namespace mppv {
namespace {

TEST(CountingPath, ValidatesConstruction) {
  EXPECT_NO_THROW(CountingPath(10.0, {1.0, 2.0, 10.0}));
  EXPECT_NO_THROW(CountingPath(10.0, {}));
  EXPECT_THROW(CountingPath(0.0, {}), DomainError);
  EXPECT_THROW(CountingPath(-1.0, {}), DomainError);
  EXPECT_THROW(CountingPath(10.0, {0.0, 1.0}), DomainError);        // event at 0
  EXPECT_THROW(CountingPath(10.0, {2.0, 1.0}), DomainError);        // unordered
  EXPECT_THROW(CountingPath(10.0, {1.0, 1.0}), DomainError);        // tie
  EXPECT_THROW(CountingPath(10.0, {1.0, 10.5}), DomainError);       // past horizon
}

TEST(CountingPath, CountIsRightContinuous) {
  const CountingPath p(10.0, {1.0, 2.0, 2.5});
  EXPECT_EQ(p.count_at(0.0), 0);
  EXPECT_EQ(p.count_at(0.999), 0);
  EXPECT_EQ(p.count_at(1.0), 1);  // event at t counts at t
  EXPECT_EQ(p.count_at(2.0), 2);
  EXPECT_EQ(p.count_at(2.4), 2);
  EXPECT_EQ(p.count_at(10.0), 3);
  EXPECT_THROW(p.count_at(10.000001), DomainError);
  EXPECT_THROW(p.count_at(-0.1), DomainError);
}

TEST(FddQuery, ValidatesGridAndCounts) {
  EXPECT_NO_THROW(FddQuery({1.0, 2.0}, {0, 3}));
  EXPECT_THROW(FddQuery({}, {}), DomainError);
  EXPECT_THROW(FddQuery({1.0}, {0, 1}), DomainError);
  EXPECT_THROW(FddQuery({2.0, 1.0}, {0, 1}), DomainError);
  EXPECT_THROW(FddQuery({1.0, 1.0}, {0, 1}), DomainError);
  EXPECT_THROW(FddQuery({0.0, 1.0}, {0, 1}), DomainError);
  EXPECT_THROW(FddQuery({1.0, 2.0}, {0, -1}), DomainError);
}

TEST(FddQuery, CumulativeConversionRoundTrips) {
  const FddQuery q = FddQuery::from_cumulative({1.0, 2.0, 4.0}, {2, 2, 5});
  EXPECT_EQ(q.increments, (std::vector<std::int64_t>{2, 0, 3}));
  EXPECT_EQ(q.cumulative(), (std::vector<std::int64_t>{2, 2, 5}));
  EXPECT_EQ(q.total(), 5);
  EXPECT_THROW(FddQuery::from_cumulative({1.0, 2.0}, {3, 2}), DomainError);
}

TEST(PathHelpers, InterarrivalsRoundTrip) {
  const CountingPath p(10.0, {0.5, 1.25, 4.0});
  const std::vector<double> gaps = interarrivals_of(p);
  ASSERT_EQ(gaps.size(), 3u);
  EXPECT_DOUBLE_EQ(gaps[0], 0.5);
  EXPECT_DOUBLE_EQ(gaps[1], 0.75);
  EXPECT_DOUBLE_EQ(gaps[2], 2.75);

  const CountingPath q = path_from_interarrivals(10.0, gaps);
  ASSERT_EQ(q.events().size(), 3u);
  EXPECT_DOUBLE_EQ(q.events()[2], 4.0);
  EXPECT_EQ(arrivals_of(q), arrivals_of(p));

  EXPECT_THROW(path_from_interarrivals(1.0, std::vector<double>{0.6, 0.6}), DomainError);
  EXPECT_THROW(path_from_interarrivals(1.0, std::vector<double>{-0.1}), DomainError);
}

TEST(PathHelpers, IncrementsOverCells) {
  const CountingPath p(10.0, {1.0, 2.0, 2.5, 7.0});
  const std::vector<double> grid{1.0, 2.5, 8.0};
  // Cells (0,1], (1,2.5], (2.5,8]: boundary events belong to the left cell.
  EXPECT_EQ(increments_of(p, grid), (std::vector<std::int64_t>{1, 2, 1}));
  EXPECT_EQ(count_at(p, grid), (std::vector<std::int64_t>{1, 3, 4}));
  EXPECT_THROW(increments_of(p, std::vector<double>{2.0, 2.0}), DomainError);
  EXPECT_THROW(increments_of(p, std::vector<double>{2.0, 11.0}), DomainError);
}

}  // namespace
}  // namespace mppv
