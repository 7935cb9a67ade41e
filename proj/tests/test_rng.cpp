#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "disbec/rng.hpp"

using namespace disbec;

TEST(CounterRng, DeterministicAcrossInstances) {
  CounterRng a(42, 0), b(42, 0);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(CounterRng, StreamsDiffer) {
  CounterRng a(42, 0), b(42, 1), c(43, 0);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 64; ++i) {
    auto x = a.next_u64();
    if (x == b.next_u64()) ++same_ab;
    if (x == c.next_u64()) ++same_ac;
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(CounterRng, DoublesInOpenUnitInterval) {
  CounterRng r(7, 3);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double u = r.next_double();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_LT(lo, 1e-4);
  EXPECT_GT(hi, 1.0 - 1e-4);
}

TEST(CounterRng, ExponentialMeanAndVariance) {
  CounterRng r(123, 0);
  const int n = 200000;
  const double nu = 25.0;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = r.next_exponential(nu);
    ASSERT_GT(x, 0.0);
    s += x;
    s2 += x * x;
  }
  double mean = s / n;
  double var = s2 / n - mean * mean;
  // mean 1/nu, variance 1/nu^2; sampling noise ~ 1/(nu sqrt(n))
  EXPECT_NEAR(mean * nu, 1.0, 0.01);
  EXPECT_NEAR(var * nu * nu, 1.0, 0.03);
}

TEST(CounterRng, AdjacentSeedsUncorrelated) {
  const int n = 20000;
  CounterRng a(1000, 0), b(1001, 0);
  double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = a.next_double(), y = b.next_double();
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  double cov = sxy / n - (sx / n) * (sy / n);
  double vx = sxx / n - (sx / n) * (sx / n);
  double vy = syy / n - (sy / n) * (sy / n);
  double corr = cov / std::sqrt(vx * vy);
  EXPECT_LT(std::fabs(corr), 4.0 / std::sqrt(double(n)));
}
