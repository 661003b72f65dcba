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

// Runs the acceptance criteria end to end and prints one PASS/FAIL line per
// criterion. Exits nonzero if any criterion fails or exceeds its time limit.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chshauth/chsh.h"
#include "chshauth/codec.h"
#include "chshauth/commit.h"
#include "chshauth/planner.h"
#include "chshauth/protocol.h"
#include "chshauth/resource.h"
#include "chshauth/session.h"
#include "chshauth/simulate.h"
#include "test_util.h"

namespace chshauth {
namespace {

using std::numbers::pi;

// Collects failures for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++count_;
  }
  void note(const std::string& text) { notes_ += text; }
  bool ok() const { return count_ == 0; }
  std::string detail() const {
    if (ok()) return notes_;
    std::string s = std::to_string(count_) + " failure(s): ";
    for (const auto& f : failures_) s += f + "; ";
    return s;
  }

 private:
  int count_ = 0;
  std::vector<std::string> failures_;
  std::string notes_;
};

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

void table_reproduction(Check& c) {
  const std::int64_t want_n[2][3] = {{4096, 16384, 36864},
                                     {8192, 32768, 73728}};
  const std::int64_t want_eps[2][3] = {{768, 1536, 2304},
                                       {1536, 3072, 4608}};
  const int lambdas[2] = {128, 256};
  for (int li = 0; li < 2; ++li) {
    for (int col = 0; col < 3; ++col) {
      const int ell = 2 * (col + 1);
      const LevelTable table = build_level_table(ell);
      const ProtocolParams p =
          plan_params(lambdas[li], ell, PlanMode::kPaper, table);
      const std::string where = "lambda=" + std::to_string(lambdas[li]) +
                                " ell=" + std::to_string(ell);
      c.expect(p.n == want_n[li][col], where + " N=" + std::to_string(p.n));
      c.expect(p.epsilon == want_eps[li][col],
               where + " eps=" + std::to_string(p.epsilon));
    }
  }
  c.note("12/12 cells");
}

void tsirelson_values(Check& c) {
  const double tsirelson = std::pow(std::cos(pi / 8), 2);
  c.expect(std::abs(omega_of_concurrence(1.0) - tsirelson) <= 1e-12,
           "omega(1)=" + fmt(omega_of_concurrence(1.0)));
  c.expect(std::abs(omega_of_concurrence(0.0) - 0.75) <= 1e-12,
           "omega(0)=" + fmt(omega_of_concurrence(0.0)));
  for (int i = 0; i < 50; ++i) {
    const double theta = (pi / 4) * i / 49.0;
    const double d = std::abs(omega_of_theta(theta) -
                              omega_of_concurrence(std::sin(2 * theta)));
    c.expect(d <= 1e-12, "theta=" + fmt(theta));
  }
}

void classical_bound(Check& c) {
  const auto all = all_classical_strategies();
  c.expect(all.size() == 16, "strategy count " + std::to_string(all.size()));
  double best = 0.0;
  for (const auto& s : all) {
    best = std::max(best, classical_win_probability(s));
  }
  c.expect(best == 0.75, "max=" + fmt(best));
  c.expect(classical_maximum().second == 0.75, "classical_maximum");
}

// Independent oracle: win probability from Eigen matrices for observables in
// the x-z plane, maximized numerically. For fixed Alice angles Bob's best
// reply is exact (align with the conditional Bloch vector), which leaves a
// two-dimensional search over Alice's angles.
class WinOracle {
 public:
  explicit WinOracle(double theta) {
    psi_.setZero();
    psi_(0) = std::cos(theta);
    psi_(3) = std::sin(theta);
    z_ << 1, 0, 0, -1;
    x_ << 0, 1, 1, 0;
  }

  double value(double a0, double a1) const {
    const Eigen::Vector2d r0 = bloch(a0), r1 = bloch(a1);
    // t=0 correlator sum A0B0 + A1B0, t=1: A0B1 - A1B1.
    return 0.5 + ((r0 + r1).norm() + (r0 - r1).norm()) / 8.0;
  }

 private:
  Eigen::Matrix2d observable(double angle) const {
    return std::cos(angle) * z_ + std::sin(angle) * x_;
  }
  double expect(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) const {
    Eigen::Matrix4d k;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    }
    return psi_.dot(k * psi_);
  }
  // (<A Z>, <A X>) for Alice's observable at `angle`.
  Eigen::Vector2d bloch(double angle) const {
    const Eigen::Matrix2d a = observable(angle);
    return {expect(a, z_), expect(a, x_)};
  }

  Eigen::Vector4d psi_;
  Eigen::Matrix2d z_, x_;
};

double golden_max(const std::function<double(double)>& f, double lo,
                  double hi) {
  const double g = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    }
  }
  return (lo + hi) / 2;
}

// The grid is shifted by `offset` so the optimum never sits on a node.
double numerical_maximum(double theta, double offset) {
  const WinOracle oracle(theta);
  constexpr int kGrid = 96;
  double best = -1, a0 = 0, a1 = 0;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      const double x = offset + 2 * pi * i / kGrid;
      const double y = offset + 2 * pi * j / kGrid;
      const double v = oracle.value(x, y);
      if (v > best) best = v, a0 = x, a1 = y;
    }
  }
  const double step = 2 * pi / kGrid;
  for (int sweep = 0; sweep < 60; ++sweep) {
    a0 = golden_max([&](double x) { return oracle.value(x, a1); }, a0 - step,
                    a0 + step);
    a1 = golden_max([&](double y) { return oracle.value(a0, y); }, a1 - step,
                    a1 + step);
  }
  return oracle.value(a0, a1);
}

void strategy_optimality(Check& c) {
  std::mt19937_64 rng(404);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const double theta = testing::uniform(rng, 0.0, pi / 4);
    const double found =
        numerical_maximum(theta, testing::uniform(rng, 0.0, 0.05));
    const double d = std::abs(found - omega_of_theta(theta));
    worst = std::max(worst, d);
    c.expect(d <= 1e-6, "theta=" + fmt(theta) + " numeric=" + fmt(found));
    // The library's own strategy must reach the bound as well.
    const double lib = win_probability(make_partially_entangled(theta),
                                       optimal_strategy(theta));
    c.expect(std::abs(lib - omega_of_theta(theta)) <= 1e-12,
             "optimal_strategy theta=" + fmt(theta));
  }
  c.note("max |numeric - omega| = " + fmt(worst));
}

void concurrence_agreement(Check& c) {
  std::mt19937_64 rng(505);
  for (int i = 0; i < 100; ++i) {
    const TwoQubitPureState s = testing::random_pure_state(rng);
    const double a = concurrence_pure(s);
    const double b = concurrence_density(density_matrix(s));
    c.expect(std::abs(a - b) <= 1e-9, "state " + std::to_string(i) + ": " +
                                          fmt(a) + " vs " + fmt(b));
  }
  for (int i = 0; i < 50; ++i) {
    const double theta = (pi / 4) * i / 49.0;
    const double cc = concurrence_pure(make_partially_entangled(theta));
    c.expect(std::abs(cc - std::sin(2 * theta)) <= 1e-12,
             "theta=" + fmt(theta));
  }
}

void sampling_fidelity(Check& c) {
  constexpr std::int64_t kGames = 100000;
  // Chi-square critical value, 2 degrees of freedom, significance 1e-3.
  constexpr double kCritical = 13.815510557964274;
  std::mt19937_64 rng(606);
  double worst_sigma = 0, worst_chi = 0;
  for (int trial = 0; trial < 10; ++trial) {
    // theta in (0, pi/4] through a one-level table with C = sin 2 theta.
    const double conc = testing::uniform(rng, 0.05, 1.0);
    const LevelTable table({conc});
    const double theta = table.level(1).theta;
    QuantumStrategy strategy;
    for (auto& s : strategy.alice) s = testing::random_setting(rng);
    for (auto& s : strategy.bob) s = testing::random_setting(rng);
    PairBatch batch = provision("fidelity", 1, kGames, table, rng());
    const double p =
        win_probability(make_partially_entangled(theta), strategy);

    std::int64_t wins = 0;
    // counts[party][own setting][peer setting][outcome]
    std::int64_t counts[2][2][2][2] = {};
    for (std::int64_t g = 0; g < kGames; ++g) {
      const int s = testing::bit(rng), t = testing::bit(rng);
      int a, b;
      if (testing::bit(rng)) {
        a = batch.measure_half(g, Party::kA, strategy.alice[s]);
        b = batch.measure_half(g, Party::kB, strategy.bob[t]);
      } else {
        b = batch.measure_half(g, Party::kB, strategy.bob[t]);
        a = batch.measure_half(g, Party::kA, strategy.alice[s]);
      }
      wins += is_win({s, t}, a, b);
      ++counts[0][s][t][a];
      ++counts[1][t][s][b];
    }
    const double sigma = std::sqrt(kGames * p * (1 - p));
    const double z = std::abs(wins - kGames * p) / sigma;
    worst_sigma = std::max(worst_sigma, z);
    c.expect(z <= 4.0, "trial " + std::to_string(trial) + " z=" + fmt(z));

    // No-signaling: a party's outcome must not depend on the peer's setting.
    // For each own setting, a 2x2 contingency test (peer setting x outcome).
    for (int party = 0; party < 2; ++party) {
      double chi = 0;
      for (int own = 0; own < 2; ++own) {
        const auto& n = counts[party][own];
        const double total = n[0][0] + n[0][1] + n[1][0] + n[1][1];
        for (int peer = 0; peer < 2; ++peer) {
          for (int o = 0; o < 2; ++o) {
            const double row = n[peer][0] + n[peer][1];
            const double col = n[0][o] + n[1][o];
            const double e = row * col / total;
            if (e > 0) chi += (n[peer][o] - e) * (n[peer][o] - e) / e;
          }
        }
      }
      worst_chi = std::max(worst_chi, chi);
      c.expect(chi < kCritical, "trial " + std::to_string(trial) + " party " +
                                    std::to_string(party) + " X2=" + fmt(chi));
    }
    c.expect(audit_batch(batch).consumed == kGames, "unconsumed pairs");
  }
  c.note("max |z| = " + fmt(worst_sigma) + ", max X2 = " + fmt(worst_chi));
}

void completeness(Check& c) {
  const LevelTable table = build_level_table(2);
  const ProtocolParams params = plan_params(128, 2, PlanMode::kPaper, table);
  c.expect(params.n == 4096, "N=" + std::to_string(params.n));
  std::ostringstream notes;
  for (int k = 1; k <= 2; ++k) {
    int granted = 0;
    for (std::uint64_t m = 0; m < 100; ++m) {
      const SessionResult r =
          run_session(params, table, {"user", k, k, {}}, 7000 + m);
      if (r.granted_at(k)) {
        ++granted;
      } else {
        c.expect(false, "level " + std::to_string(k) + " run " +
                            std::to_string(m) + ": " +
                            r.verdict.abort_reason + " " +
                            r.user_abort_reason);
      }
      c.expect(verify_transcript(r.transcript, params, table) == r.verdict,
               "stored transcript disagrees with live verdict");
    }
    notes << "level " << k << ": " << granted << "/100 granted; ";
  }
  c.note(notes.str());
}

void soundness(Check& c) {
  const LevelTable table = build_level_table(2);
  const ProtocolParams params = plan_params(20, 2, PlanMode::kStrict, table);
  c.expect(check_no_overlap(params, table).pass(), "strict plan overlaps");
  struct Case {
    const char* name;
    int true_level;
    int requested;
    const char* behavior;
  };
  const Case cases[] = {{"classical", 2, 1, "classical"},
                        {"classical", 2, 2, "classical"},
                        {"cross-level", 1, 2, "cross-level"},
                        {"fabricate", 1, 1, "fabricate"},
                        {"fabricate", 2, 2, "fabricate"}};
  // Classical requests alternate levels: 500 runs at each.
  std::ostringstream notes;
  std::uint64_t seed = 8000;
  for (const Case& k : cases) {
    SimulationConfig cfg;
    cfg.params = params;
    cfg.true_level = k.true_level;
    cfg.requested_level = k.requested;
    cfg.behavior = UserBehavior::Parse(k.behavior);
    cfg.runs = std::string(k.name) == "cross-level" ? 1000 : 500;
    cfg.seed = seed++;
    cfg.batched = true;
    const auto rows = simulate(cfg, table);
    const SimulationSummary s = summarize(rows);
    c.expect(s.accepted == 0, std::string(k.name) + " requesting " +
                                  std::to_string(k.requested) + ": " +
                                  std::to_string(s.accepted) + " accepted");
    for (const RunRow& row : rows) {
      c.expect(row.verdict.rfind("granted", 0) != 0,
               std::string(k.name) + " run granted " + row.verdict);
    }
    notes << k.name << " k=" << k.requested << ": " << s.accepted << "/"
          << s.runs << " (mean W " << static_cast<std::int64_t>(s.mean_wins)
          << "); ";
  }
  c.note(notes.str());
}

void overlap_finding(Check& c) {
  const LevelTable table = build_level_table(2);
  const OverlapReport paper =
      check_no_overlap(plan_params(128, 2, PlanMode::kPaper, table), table);
  c.expect(!paper.pass(), "paper mode reported as disjoint");
  c.expect(!paper.pairs.empty() && !paper.pairs[0].disjoint,
           "paper pair (1,2) disjoint");
  for (int lambda : {20, 128}) {
    const OverlapReport strict = check_no_overlap(
        plan_params(lambda, 2, PlanMode::kStrict, table), table);
    c.expect(strict.pass(),
             "strict lambda=" + std::to_string(lambda) + " not disjoint");
  }
  if (!paper.pairs.empty()) {
    c.note("paper margin " + std::to_string(paper.pairs[0].margin) +
           ", classical inside: " + (paper.classical_excluded ? "no" : "yes"));
  }
}

void wire_run(Check& c) {
  const LevelTable table = build_level_table(2);
  const ProtocolParams params = plan_params(128, 2, PlanMode::kPaper, table);
  constexpr std::uint64_t kSeed = 31337;
  Distributor distributor(table, kSeed);
  distributor.assign("alice", 2);
  distributor.assign("bob", 1);
  DistributorServer dist(distributor, "127.0.0.1", 0);
  dist.start();

  ServerConfig sc;
  sc.port = 0;
  sc.distributor_port = dist.port();
  sc.params = params;
  sc.seed = kSeed;
  sc.timeout = std::chrono::milliseconds(10000);
  AuthorizerServer server(sc, table,
                          load_database(CHSHAUTH_TEST_DATA "/db2.ndjson", 2));
  server.start();

  const std::vector<std::string> ids = {"memo-1", "memo-2", "ledger"};
  const std::vector<int> tags = {1, 1, 2};
  const std::pair<const char*, int> users[] = {{"alice", 2}, {"bob", 1}};
  for (std::uint64_t i = 0; i < 2; ++i) {
    const auto [id, k] = users[i];
    ClientConfig cc;
    cc.port = server.port();
    cc.distributor_port = dist.port();
    cc.params = params;
    cc.seed = kSeed;
    cc.timeout = std::chrono::milliseconds(10000);
    cc.user = {id, k, 0, {}};
    cc.query_ids = ids;
    const ClientResult r = run_user_client(cc, table);
    c.expect(r.phase == Phase::kDone && r.verdict == Verdict::Granted(k),
             std::string(id) + " not granted: " + r.abort_reason);
    c.expect(r.queries.size() == ids.size(), "missing query replies");
    for (std::size_t q = 0; q < r.queries.size(); ++q) {
      const bool allowed = tags[q] <= k;
      c.expect(r.queries[q].status == (allowed ? "ok" : "denied"),
               ids[q] + " for level " + std::to_string(k) + ": " +
                   r.queries[q].status);
      c.expect(r.queries[q].data.empty() != allowed, "payload presence");
    }
    server.wait(i + 1);
    const SessionRecord rec = server.records().at(i);
    const SessionResult loop = run_session(params, table, {id, k, k, {}},
                                           kSeed, {.session_index = i});
    c.expect(to_json(rec.transcript).dump() == to_json(loop.transcript).dump(),
             std::string(id) + " transcript differs from loopback run");
    c.expect(rec.verdict == loop.verdict, "verdict differs from loopback");
  }
  server.stop();
  dist.stop();
  c.note("2 sessions, transcripts byte-identical");
}

// Flips a random nonempty subset of {question, answer, one salt bit}.
void mutate(std::mt19937_64& rng, int& question, int& answer, Salt& salt) {
  int mask = 0;
  while (mask == 0) mask = static_cast<int>(rng() % 8);
  if (mask & 1) question ^= 1;
  if (mask & 2) answer ^= 1;
  if (mask & 4) salt[rng() % salt.size()] ^= 1 << (rng() % 8);
}

void commit_binding(Check& c) {
  std::mt19937_64 rng(1111);
  const LevelTable table = build_level_table(2);
  const ProtocolParams params = plan_with_rounds(2, PlanMode::kPaper, 8, table);
  int machine_cases = 0;
  for (int i = 0; i < 10000; ++i) {
    // Hash level.
    const auto round = static_cast<std::int64_t>(rng() % 1000000);
    const Role role = testing::bit(rng) ? Role::kUser : Role::kAuthorizer;
    int q = testing::bit(rng), a = testing::bit(rng);
    Salt salt = testing::random_bytes<16>(rng);
    const Digest d = commit(round, role, q, a, salt);
    c.expect(verify_reveal(d, round, role, q, a, salt), "honest reveal");
    mutate(rng, q, a, salt);
    c.expect(!verify_reveal(d, round, role, q, a, salt),
             "mutated reveal accepted, case " + std::to_string(i));

    // Protocol level: tamper with a live reveal at a random round and
    // direction; the receiving machine must abort.
    Distributor distributor(table, rng());
    distributor.assign("u", 2);
    Rng ur(rng()), ar(rng());
    Services us{&distributor, &ur}, as{&distributor, &ar};
    UserMachine user({"u", 2, 0, {}}, table, params, false);
    AuthorizerMachine auth("s", table, params, false);
    const std::int64_t target = static_cast<std::int64_t>(rng() % params.n);
    const bool tamper_user = testing::bit(rng);
    const auto accept = auth.step(user.step(StartEvent{}, us)[0], as);
    Message next_commit = user.step(accept.at(0), us).at(0);
    for (std::int64_t r = 0; r <= target; ++r) {
      const auto auth_out = auth.step(next_commit, as);  // commit, reveal
      const auto user_reveal = user.step(auth_out.at(0), us);
      if (r < target) {
        auth.step(user_reveal.at(0), as);
        next_commit = user.step(auth_out.at(1), us).at(0);
        continue;
      }
      if (tamper_user) {
        auto rv = std::get<RoundReveal>(user_reveal.at(0));
        mutate(rng, rv.question, rv.answer, rv.salt);
        const auto out = auth.step(Message(rv), as);
        c.expect(auth.phase() == Phase::kAborted &&
                     auth.abort_reason() == "commitment-mismatch",
                 "authorizer accepted a mutated reveal");
        c.expect(!out.empty() && out[0] == Message(Abort{"commitment-mismatch"}),
                 "authorizer did not send abort");
      } else {
        auto rv = std::get<RoundReveal>(auth_out.at(1));
        mutate(rng, rv.question, rv.answer, rv.salt);
        user.step(Message(rv), us);
        c.expect(user.phase() == Phase::kAborted &&
                     user.abort_reason() == "commitment-mismatch",
                 "user accepted a mutated reveal");
      }
      ++machine_cases;
    }
  }
  c.note("10000 hash-level and " + std::to_string(machine_cases) +
         " protocol-level mutations rejected");
}

struct Criterion {
  int number;
  const char* name;
  double limit_seconds;
  void (*run)(Check&);
};

}  // namespace
}  // namespace chshauth

// With arguments, runs only the listed criterion numbers.
int main(int argc, char** argv) {
  using namespace chshauth;
  const Criterion criteria[] = {
      {1, "table reproduction", 1, table_reproduction},
      {2, "tsirelson and classical values", 1, tsirelson_values},
      {3, "classical bound", 1, classical_bound},
      {4, "strategy optimality", 30, strategy_optimality},
      {5, "concurrence", 5, concurrence_agreement},
      {6, "sampling fidelity", 60, sampling_fidelity},
      {7, "completeness", 120, completeness},
      {8, "soundness", 300, soundness},
      {9, "overlap finding", 1, overlap_finding},
      {10, "wire run", 60, wire_run},
      {11, "commit-reveal binding", 30, commit_binding},
  };
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  int failed = 0, ran = 0;
  for (const Criterion& k : criteria) {
    if (!only.empty() &&
        std::find(only.begin(), only.end(), k.number) == only.end()) {
      continue;
    }
    ++ran;
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      k.run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    const bool in_time = secs <= k.limit_seconds;
    const bool pass = check.ok() && in_time;
    if (!pass) ++failed;
    std::printf("%s criterion %d: %s (%.2fs, limit %.0fs)%s%s%s\n",
                pass ? "PASS" : "FAIL", k.number, k.name, secs,
                k.limit_seconds, in_time ? "" : " [over time]",
                check.detail().empty() ? "" : " - ",
                check.detail().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
