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

#include "chshauth/session.h"

#include <gtest/gtest.h>

#include "chshauth/errors.h"

namespace chshauth {
namespace {

class SessionTest : public ::testing::Test {
 protected:
  LevelTable table_ = build_level_table(2);
  ProtocolParams paper_ = plan_params(128, 2, PlanMode::kPaper, table_);
  ProtocolParams strict_ = plan_params(20, 2, PlanMode::kStrict, table_);
  SessionOptions batched_{.batched = true};
};

SessionSpec spec(int true_level, int requested, const std::string& behavior) {
  return {"user", true_level, requested, UserBehavior::Parse(behavior)};
}

TEST_F(SessionTest, HonestUserGrantedAtTrueLevel) {
  for (int k : {1, 2}) {
    const SessionResult r = run_session(paper_, table_, spec(k, k, "honest"), 9);
    EXPECT_TRUE(r.granted_at(k)) << r.verdict.abort_reason;
    EXPECT_EQ(r.user_phase, Phase::kDone);
    EXPECT_EQ(r.authorizer_phase, Phase::kDone);
    EXPECT_EQ(static_cast<std::int64_t>(r.transcript.rounds.size()), paper_.n);
    EXPECT_EQ(verify_transcript(r.transcript, paper_, table_), r.verdict);
  }
}

TEST_F(SessionTest, BatchedHonestUserGranted) {
  const SessionResult r =
      run_session(paper_, table_, spec(2, 2, "honest"), 9, batched_);
  EXPECT_TRUE(r.granted_at(2));
  EXPECT_EQ(r.transcript.user_commitments.size(), 1u);
  EXPECT_EQ(verify_transcript(r.transcript, paper_, table_), r.verdict);
}

TEST_F(SessionTest, DeterministicUnderSeed) {
  const auto a = run_session(paper_, table_, spec(2, 2, "honest"), 17);
  const auto b = run_session(paper_, table_, spec(2, 2, "honest"), 17);
  const auto c = run_session(paper_, table_, spec(2, 2, "honest"), 18);
  EXPECT_EQ(to_json(a.transcript).dump(), to_json(b.transcript).dump());
  EXPECT_NE(to_json(a.transcript).dump(), to_json(c.transcript).dump());
}

TEST_F(SessionTest, UnderResourcedUserAborts) {
  for (const char* behavior : {"honest", "cross-level"}) {
    const SessionResult r =
        run_session(strict_, table_, spec(1, 2, behavior), 4, batched_);
    EXPECT_FALSE(r.verdict.granted()) << behavior;
    EXPECT_EQ(r.verdict.abort_reason, "level-mismatch");
    EXPECT_EQ(r.user_phase, Phase::kAborted);
  }
}

TEST_F(SessionTest, CrossLevelUserLandsInItsOwnInterval) {
  SessionOptions options = batched_;
  options.policy.grant_matching_level = true;
  const SessionResult r =
      run_session(strict_, table_, spec(1, 2, "cross-level"), 4, options);
  // The Authorizer would hand out level 1; the User wanted 2 and refuses.
  EXPECT_EQ(r.verdict, Verdict::Granted(1));
  EXPECT_EQ(r.user_phase, Phase::kAborted);
  EXPECT_EQ(r.user_abort_reason, "verdict-mismatch");
  EXPECT_FALSE(r.granted_at(2));
}

TEST_F(SessionTest, ClassicalAndFabricatingUsersAbort) {
  for (const char* behavior : {"classical", "fabricate"}) {
    for (int k : {1, 2}) {
      const SessionResult r =
          run_session(strict_, table_, spec(2, k, behavior), 5, batched_);
      EXPECT_EQ(r.verdict, Verdict::Aborted("level-mismatch")) << behavior;
    }
  }
}

TEST_F(SessionTest, DelayedRevealIsCaughtByCommitment) {
  for (bool batched : {false, true}) {
    const SessionResult r = run_session(paper_, table_,
                                        spec(2, 2, "delayed-reveal"), 6,
                                        {.batched = batched});
    EXPECT_EQ(r.verdict, Verdict::Aborted("commitment-mismatch"));
    EXPECT_EQ(r.user_phase, Phase::kAborted);
  }
}

TEST_F(SessionTest, WithheldCommitTimesOut) {
  for (bool batched : {false, true}) {
    const SessionResult r = run_session(paper_, table_,
                                        spec(2, 2, "withhold-commit"), 6,
                                        {.batched = batched});
    EXPECT_EQ(r.verdict, Verdict::Aborted("timeout"));
    EXPECT_EQ(r.authorizer_phase, Phase::kAborted);
    EXPECT_EQ(r.user_phase, Phase::kAborted);
    EXPECT_TRUE(r.transcript.rounds.empty());
  }
}

TEST_F(SessionTest, OptimalAnglesAdversaryIsHonestPlay) {
  const auto s = optimal_strategy(table_.level(2).theta);
  const std::string angles = "angles:" + std::to_string(s.bob[0].angle()) +
                             "," + std::to_string(s.bob[1].angle());
  const SessionResult r = run_session(paper_, table_, spec(2, 2, angles), 7);
  EXPECT_TRUE(r.granted_at(2));
}

TEST_F(SessionTest, UnassignedLevelAborts) {
  EXPECT_THROW(run_session(paper_, table_, spec(3, 2, "honest"), 1),
               ResourceError);
  const SessionResult r = run_session(paper_, table_, spec(2, 5, "honest"), 1);
  EXPECT_EQ(r.verdict, Verdict::Aborted("invalid-level"));
}

TEST_F(SessionTest, PerRoundSoundnessAtSmallScale) {
  // One level, strict, lambda 20: about 8.4k rounds per session.
  const LevelTable one = build_level_table(1);
  const ProtocolParams p = plan_params(20, 1, PlanMode::kStrict, one);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SessionResult classical =
        run_session(p, one, spec(1, 1, "classical"), seed);
    EXPECT_EQ(classical.verdict, Verdict::Aborted("level-mismatch"));
    const SessionResult fabricated =
        run_session(p, one, spec(1, 1, "fabricate"), seed);
    EXPECT_EQ(fabricated.verdict, Verdict::Aborted("level-mismatch"));
  }
  EXPECT_TRUE(run_session(p, one, spec(1, 1, "honest"), 3).granted_at(1));
}

TEST_F(SessionTest, PropertyVerdictDeterminism) {
  const char* behaviors[] = {"honest", "classical", "fabricate", "cross-level"};
  const ProtocolParams small = plan_with_rounds(2, PlanMode::kPaper, 256, table_);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::string b = behaviors[seed % 4];
    const int requested = b == "cross-level" ? 2 : 1 + static_cast<int>(seed % 2);
    const int true_level = b == "cross-level" ? 1 : 2;
    for (bool batched : {false, true}) {
      const SessionResult r =
          run_session(small, table_, spec(true_level, requested, b), seed,
                      {.batched = batched});
      ASSERT_EQ(static_cast<std::int64_t>(r.transcript.rounds.size()), small.n);
      EXPECT_EQ(verify_transcript(r.transcript, small, table_), r.verdict);
      EXPECT_EQ(verify_transcript(transcript_from_json(to_json(r.transcript)),
                                  small, table_),
                r.verdict);
    }
  }
}

}  // namespace
}  // namespace chshauth
