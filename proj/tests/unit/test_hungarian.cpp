#include <gtest/gtest.h>

#include <cmath>

#include "detraceval/hungarian.hpp"
#include "detraceval/synth.hpp"
#include "support.hpp"

using namespace detraceval;

TEST(Hungarian, DiagonalDominant) {
  Eigen::MatrixXd c(2, 2);
  c << 1, 2, 2, 1;
  const Assignment a = hungarian(c);
  EXPECT_EQ(a.row_to_col, (std::vector<int>{0, 1}));
  EXPECT_EQ(a.cost, 2.0);
  EXPECT_EQ(a.cardinality, 2);
}

TEST(Hungarian, SingleEntry) {
  Eigen::MatrixXd c(1, 1);
  c << 0;
  const Assignment a = hungarian(c);
  EXPECT_EQ(a.row_to_col, (std::vector<int>{0}));
  EXPECT_EQ(a.cost, 0.0);
}

TEST(Hungarian, EmptyAndAllForbidden) {
  EXPECT_TRUE(hungarian(Eigen::MatrixXd(0, 3)).row_to_col.empty());
  Eigen::MatrixXd c = Eigen::MatrixXd::Constant(2, 3, kForbiddenCost<double>);
  const Assignment a = hungarian(c);
  EXPECT_EQ(a.row_to_col, (std::vector<int>{-1, -1}));
  EXPECT_EQ(a.cardinality, 0);
}

TEST(Hungarian, CardinalityBeatsCost) {
  // Taking (0,0) alone is cheapest, but two pairs are possible.
  Eigen::MatrixXd c(2, 2);
  const double x = kForbiddenCost<double>;
  c << 0, 100, 100, x;
  const Assignment a = hungarian(c);
  EXPECT_EQ(a.cardinality, 2);
  EXPECT_EQ(a.row_to_col, (std::vector<int>{1, 0}));
  EXPECT_EQ(a.cost, 200.0);
}

TEST(Hungarian, RectangularBothWays) {
  Eigen::MatrixXd wide(2, 4);
  wide << 5, 1, 9, 9, 1, 5, 9, 0;
  const Assignment w = hungarian(wide);
  EXPECT_EQ(w.row_to_col, (std::vector<int>{1, 3}));
  EXPECT_EQ(w.cost, 1.0);
  const Assignment t = hungarian(Eigen::MatrixXd(wide.transpose()));
  EXPECT_EQ(t.cost, 1.0);
  EXPECT_EQ(t.row_to_col, (std::vector<int>{-1, 0, -1, 1}));
}

TEST(Hungarian, ExpressionArguments) {
  Eigen::MatrixXd c(3, 3);
  c << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  // block and scalar-multiple expressions are accepted directly
  EXPECT_EQ(hungarian(c.topLeftCorner(2, 2)).cost, 3.0);
  EXPECT_EQ(hungarian(-c).cost, -11.0);
  EXPECT_EQ(hungarian(c).cost, 5.0);
  const Eigen::MatrixXf f = c.cast<float>();
  EXPECT_EQ(hungarian(f).cost, 5.0f);
}

TEST(Hungarian, RandomSquareMatchesPermutations) {
  synth::Rng rng(42);
  for (int k = 0; k < 200; ++k) {
    Eigen::MatrixXd c(5, 5);
    for (int i = 0; i < 25; ++i) c.data()[i] = std::floor(rng.uniform() * 100.0);
    EXPECT_EQ(hungarian(c).cost, testsupport::brute_force_min_cost(c)) << c;
  }
}

TEST(Hungarian, RandomRealCostsWithinRounding) {
  synth::Rng rng(43);
  for (int k = 0; k < 300; ++k) {
    const int rows = 1 + static_cast<int>(rng.uniform() * 6), cols = 1 + static_cast<int>(rng.uniform() * 6);
    Eigen::MatrixXd c(rows, cols);
    for (int i = 0; i < c.size(); ++i) {
      c.data()[i] = rng.uniform() < 0.2 ? kForbiddenCost<double> : rng.uniform(-1, 1);
    }
    int card = 0;
    const double want = testsupport::brute_force_min_cost(c, &card);
    const Assignment a = hungarian(c);
    EXPECT_EQ(a.cardinality, card);
    EXPECT_NEAR(a.cost, want, 1e-12);
  }
}

TEST(Hungarian, ResultIsAValidMatching) {
  synth::Rng rng(44);
  for (int k = 0; k < 100; ++k) {
    Eigen::MatrixXd c(4, 6);
    for (int i = 0; i < c.size(); ++i) c.data()[i] = rng.uniform() < 0.4 ? kForbiddenCost<double> : rng.uniform();
    const Assignment a = hungarian(c);
    std::vector<int> seen(6, 0);
    for (int i = 0; i < 4; ++i) {
      const int j = a.row_to_col[static_cast<std::size_t>(i)];
      if (j < 0) continue;
      EXPECT_TRUE(std::isfinite(c(i, j)));
      EXPECT_EQ(seen[static_cast<std::size_t>(j)]++, 0);
    }
  }
}
