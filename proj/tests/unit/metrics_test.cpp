/**
 * Copyright 2026 The visbias Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "visbias/error.hpp"
#include "visbias/metrics.hpp"

using namespace visbias;

namespace {

long double ref_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Rank by counting: below + (ties + 1) / 2.
std::vector<double> ref_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double below = 0, equal = 0;
    for (double w : v) {
      if (w < v[i]) below += 1;
      if (w == v[i]) equal += 1;
    }
    r[i] = below + (equal + 1) / 2;
  }
  return r;
}

}  // namespace

TEST(Metrics, TrivialCases) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> rev{5, 4, 3, 2, 1};
  EXPECT_EQ(pearson(x, x), 1.0);
  EXPECT_EQ(pearson(x, rev), -1.0);
  EXPECT_EQ(spearman(x, x), 1.0);
  EXPECT_EQ(spearman(x, rev), -1.0);
}

TEST(Metrics, AverageRanksWithTies) {
  const std::vector<double> v{3, 1, 3, 2};
  EXPECT_EQ(average_ranks(v), (std::vector<double>{3.5, 1, 3.5, 2}));
}

TEST(Metrics, ErrorsOnDegenerateInput) {
  const std::vector<double> c{2, 2, 2};
  const std::vector<double> x{1, 2, 3};
  EXPECT_THROW(pearson(c, x), Error);
  EXPECT_THROW(pearson(std::vector<double>{1}, std::vector<double>{1}), Error);
  EXPECT_THROW(pearson(x, std::vector<double>{1, 2}), Error);
  EXPECT_THROW(mean(std::vector<double>{}), Error);
}

TEST(Metrics, MatchesBruteForceReference) {
  std::mt19937_64 gen(42);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + gen() % 19;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(gen() % 6);
      y[i] = static_cast<double>(gen() % 6) + (trial % 2 ? static_cast<double>(gen() % 1000) / 1000.0 : 0.0);
    }
    const auto rx = ref_ranks(x), ry = ref_ranks(y);
    if (ref_pearson(x, y) != ref_pearson(x, y) || ref_pearson(rx, ry) != ref_pearson(rx, ry)) {
      EXPECT_THROW(pearson(x, y), Error);
      continue;
    }
    EXPECT_NEAR(pearson(x, y), static_cast<double>(ref_pearson(x, y)), 1e-9);
    EXPECT_NEAR(spearman(x, y), static_cast<double>(ref_pearson(rx, ry)), 1e-9);
    EXPECT_EQ(average_ranks(x), rx);
    ++checked;
  }
  EXPECT_GT(checked, 900);
}
