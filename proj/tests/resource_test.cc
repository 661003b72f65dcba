// Copyright 2026 The chshauth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "chshauth/resource.h"

#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <thread>

#include "chshauth/chsh.h"
#include "chshauth/errors.h"

namespace chshauth {
namespace {

using std::numbers::pi;

class ResourceTest : public ::testing::Test {
 protected:
  LevelTable table_ = build_level_table(2);
};

TEST_F(ResourceTest, ProvisionedBatchIsFreshAtLevelTheta) {
  const PairBatch b = provision("s", 1, 10, table_, 7);
  EXPECT_EQ(b.count(), 10);
  EXPECT_EQ(b.level(), 1);
  EXPECT_NEAR(b.theta(), pi / 12, 1e-15);
  EXPECT_EQ(audit_batch(b), (BatchAudit{10, 0, 0}));
}

TEST_F(ResourceTest, ProvisionErrors) {
  EXPECT_THROW(provision("s", 3, 10, table_, 7), ResourceError);
  EXPECT_THROW(provision("s", 0, 10, table_, 7), ResourceError);
  EXPECT_THROW(provision("s", 1, 0, table_, 7), ResourceError);
}

TEST_F(ResourceTest, EachHalfMeasuredOnce) {
  PairBatch b = provision("s", 2, 3, table_, 7);
  const MeasurementSetting z(0.0);
  b.measure_half(0, Party::kB, z);
  EXPECT_EQ(b.status(0), PairStatus::kHalfMeasured);
  EXPECT_THROW(b.measure_half(0, Party::kB, z), ResourceError);
  b.measure_half(0, Party::kA, z);
  EXPECT_EQ(b.status(0), PairStatus::kConsumed);
  EXPECT_THROW(b.measure_half(0, Party::kA, z), ResourceError);
  EXPECT_THROW(b.measure_half(3, Party::kA, z), ResourceError);
  EXPECT_THROW(b.measure_half(-1, Party::kA, z), ResourceError);
  EXPECT_EQ(audit_batch(b), (BatchAudit{2, 0, 1}));
}

TEST_F(ResourceTest, BellPairsAgreeInZ) {
  // Level 2 of two is the maximally entangled state.
  PairBatch b = provision("s", 2, 1000, table_, 11);
  const MeasurementSetting z(0.0);
  for (std::int64_t i = 0; i < b.count(); ++i) {
    const int first = b.measure_half(i, i % 2 ? Party::kA : Party::kB, z);
    const int second = b.measure_half(i, i % 2 ? Party::kB : Party::kA, z);
    EXPECT_EQ(first, second);
  }
}

TEST_F(ResourceTest, CounterBasedDrawsIgnoreInterleaving) {
  PairBatch forward = provision("s", 1, 200, table_, 5);
  PairBatch backward = provision("s", 1, 200, table_, 5);
  const MeasurementSetting a(0.3);
  const MeasurementSetting b(-1.1);
  std::vector<std::pair<int, int>> f(200);
  std::vector<std::pair<int, int>> r(200);
  for (std::int64_t i = 0; i < 200; ++i) {
    f[i].second = forward.measure_half(i, Party::kB, b);
  }
  for (std::int64_t i = 0; i < 200; ++i) {
    f[i].first = forward.measure_half(i, Party::kA, a);
  }
  for (std::int64_t i = 199; i >= 0; --i) {
    r[i].second = backward.measure_half(i, Party::kB, b);
    r[i].first = backward.measure_half(i, Party::kA, a);
  }
  EXPECT_EQ(f, r);
}

TEST_F(ResourceTest, OptimalPlayWinRateNearOmega) {
  // 20000 games at level 1; 5 sigma of a Bernoulli(0.78) mean is ~0.015.
  PairBatch batch = provision("s", 1, 20000, table_, 3);
  const auto strategy = optimal_strategy(table_.level(1).theta);
  std::mt19937_64 rng(9);
  int wins = 0;
  for (std::int64_t i = 0; i < batch.count(); ++i) {
    const int s = static_cast<int>(rng() & 1);
    const int t = static_cast<int>(rng() & 1);
    const int b = batch.measure_half(i, Party::kB, strategy.bob[t]);
    const int a = batch.measure_half(i, Party::kA, strategy.alice[s]);
    wins += is_win({s, t}, a, b);
  }
  EXPECT_NEAR(wins / 20000.0, table_.level(1).omega, 0.015);
}

TEST_F(ResourceTest, DistributorBindsOneBatchPerSession) {
  Distributor d(table_, 1);
  EXPECT_THROW(d.provision("s1", "alice", 4), ResourceError);
  d.assign("alice", 1);
  EXPECT_EQ(d.assigned_level("alice"), 1);
  EXPECT_EQ(d.assigned_level("bob"), std::nullopt);
  EXPECT_THROW(d.assign("bob", 3), ResourceError);
  d.provision("s1", "alice", 4);
  // A second batch cannot be attached to the same session.
  EXPECT_THROW(d.provision("s1", "alice", 4), ResourceError);
  EXPECT_THROW(d.measure("s2", 0, Party::kA, MeasurementSetting(0)),
               ResourceError);
  d.measure("s1", 0, Party::kA, MeasurementSetting(0));
  EXPECT_EQ(d.audit("s1"), (BatchAudit{3, 1, 0}));
  d.release("s1");
  EXPECT_THROW(d.audit("s1"), ResourceError);
}

TEST_F(ResourceTest, DistributorIsDeterministicInSeed) {
  auto outcomes = [&](std::uint64_t seed) {
    Distributor d(table_, seed);
    d.assign("u", 1);
    d.provision("s", "u", 64);
    std::vector<int> out;
    for (int i = 0; i < 64; ++i) {
      out.push_back(d.measure("s", i, Party::kB, MeasurementSetting(0.4)));
    }
    return out;
  };
  EXPECT_EQ(outcomes(5), outcomes(5));
  EXPECT_NE(outcomes(5), outcomes(6));
}

TEST_F(ResourceTest, ConcurrentSessionsDoNotInterfere) {
  Distributor d(table_, 2);
  d.assign("u", 2);
  for (int s = 0; s < 4; ++s) d.provision("s" + std::to_string(s), "u", 500);
  std::vector<std::thread> threads;
  for (int s = 0; s < 4; ++s) {
    threads.emplace_back([&d, s] {
      for (int i = 0; i < 500; ++i) {
        d.measure("s" + std::to_string(s), i, Party::kA, MeasurementSetting(0));
        d.measure("s" + std::to_string(s), i, Party::kB, MeasurementSetting(0));
      }
    });
  }
  for (auto& t : threads) t.join();
  for (int s = 0; s < 4; ++s) {
    EXPECT_EQ(d.audit("s" + std::to_string(s)), (BatchAudit{0, 0, 500}));
  }
}

}  // namespace
}  // namespace chshauth
