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

// chshauth: plan parameters, print level tables, simulate sessions, and run
// the Authorizer, Distributor and User roles over TCP.
//
// Exit codes: 0 ok, 1 usage, 2 protocol abort, 3 planning failure.

#include <signal.h>

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chshauth/authdb.h"
#include "chshauth/codec.h"
#include "chshauth/errors.h"
#include "chshauth/planner.h"
#include "chshauth/protocol.h"
#include "chshauth/resource.h"
#include "chshauth/session.h"
#include "chshauth/simulate.h"
#include "chshauth/tcp.h"

namespace {

using namespace chshauth;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAbort = 2;
constexpr int kExitPlanning = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PlanFlags {
  int lambda = 128;
  int ell = 2;
  std::string mode = "paper";
  std::int64_t rounds = 0;  // 0 = planned

  void add(CLI::App* app) {
    app->add_option("--lambda", lambda, "Security exponent in bits")
        ->capture_default_str();
    app->add_option("--ell", ell, "Number of levels")->capture_default_str();
    app->add_option("--mode", mode, "paper or strict")
        ->check(CLI::IsMember({"paper", "strict"}))
        ->capture_default_str();
    app->add_option("--rounds", rounds, "Override the planned round count N");
  }

  LevelTable table() const { return build_level_table(ell); }

  ProtocolParams params(const LevelTable& t) const {
    const PlanMode m = parse_plan_mode(mode);
    return rounds > 0 ? plan_with_rounds(ell, m, rounds, t)
                      : plan_params(lambda, ell, m, t);
  }
};

struct SessionFlags {
  bool batched = false;
  bool grant_matching = false;
  std::uint64_t seed = 1;
  int timeout_ms = static_cast<int>(kDefaultTimeout.count());

  void add(CLI::App* app) {
    app->add_flag("--batched", batched, "Commit and reveal all rounds at once");
    app->add_flag("--grant-matching", grant_matching,
                  "Grant the level whose interval holds the win count");
    app->add_option("--seed", seed, "Master seed")->capture_default_str();
    app->add_option("--timeout-ms", timeout_ms, "Per-message timeout")
        ->capture_default_str();
  }
};

std::pair<std::string, std::uint16_t> parse_address(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw UsageError("expected host:port");
  const int port = std::stoi(text.substr(colon + 1));
  if (port < 0 || port > 65535) throw UsageError("port out of range");
  return {text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

// Splits "cross-level:K" into the behavior and the requested level.
UserBehavior parse_adversary(const std::string& spec,
                             std::optional<int>& requested) {
  if (spec.starts_with("cross-level:")) {
    requested = std::stoi(spec.substr(12));
  }
  return UserBehavior::Parse(spec);
}

void block_signals(sigset_t& set) {
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
}

void print_plan(const ProtocolParams& p, const LevelTable& table,
                const OverlapReport& report) {
  std::cout << "mode      " << to_string(p.mode) << "\n"
            << "lambda    " << p.lambda << "\n"
            << "ell       " << p.ell << "\n"
            << "c         " << p.c << "\n"
            << "N         " << p.n << "\n"
            << "mu        " << p.mu << "\n"
            << "epsilon   " << p.epsilon << "\n"
            << "tail      2^-" << chernoff_exponent(p.c, p.n) << "\n\n";
  std::cout << "level  C         omega         interval\n";
  for (const Level& l : table.levels()) {
    const AcceptanceInterval iv = acceptance_interval(l.index, p, table);
    std::cout << std::setw(5) << l.index << "  " << std::setw(8)
              << std::fixed << std::setprecision(6) << l.concurrence << "  "
              << std::setprecision(10) << l.omega << "  [" << iv.lo << ", "
              << iv.hi << "]\n";
  }
  std::cout.unsetf(std::ios::fixed);
  std::cout << std::setprecision(6) << "\n";
  for (const auto& pair : report.pairs) {
    std::cout << "levels " << pair.lower_level << "-" << pair.upper_level
              << ": " << (pair.disjoint ? "disjoint" : "OVERLAP")
              << " (margin " << pair.margin << ")\n";
  }
  std::cout << "classical 3N/4: "
            << (report.classical_excluded ? "excluded" : "INSIDE an interval")
            << " (margin " << report.classical_margin << ")\n";
}

nlohmann::json plan_json(const ProtocolParams& p, const LevelTable& table,
                         const OverlapReport& report) {
  nlohmann::json levels = to_json(table);
  for (auto& l : levels) {
    const AcceptanceInterval iv =
        acceptance_interval(l["level"].get<int>(), p, table);
    l["center"] = iv.center;
    l["lo"] = iv.lo;
    l["hi"] = iv.hi;
  }
  return {{"params", to_json(p)},
          {"chernoff_exponent", chernoff_exponent(p.c, p.n)},
          {"levels", levels},
          {"overlap", to_json(report)}};
}

void print_verdict(std::ostream& out, const std::optional<Verdict>& verdict,
                   const std::string& abort_reason) {
  if (verdict && verdict->granted()) {
    out << "granted level " << *verdict->granted_level << "\n";
  } else {
    out << "aborted: " << abort_reason << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CHSH-game leveled authorization"};
  app.require_subcommand(1);

  // plan
  PlanFlags plan_flags;
  bool plan_json_out = false;
  bool expect_disjoint = false;
  std::string plan_csv;
  auto* plan = app.add_subcommand("plan", "Plan protocol parameters");
  plan_flags.add(plan);
  plan->add_flag("--json", plan_json_out, "Print JSON");
  plan->add_option("--csv", plan_csv, "Write the level table as CSV");
  plan->add_flag("--expect-disjoint", expect_disjoint,
                 "Exit 3 unless all intervals are disjoint");

  // table
  PlanFlags table_flags;
  bool table_json = false;
  std::string table_csv;
  auto* table_cmd = app.add_subcommand("table", "Print the level table");
  table_flags.add(table_cmd);
  table_cmd->add_flag("--json", table_json, "Print JSON");
  table_cmd->add_option("--csv", table_csv, "Write CSV to a file");

  // simulate
  PlanFlags sim_flags;
  SessionFlags sim_session;
  int sim_level = 0;
  std::optional<int> sim_request;
  std::string sim_adversary = "none";
  std::int64_t sim_runs = 100;
  int sim_jobs = 1;
  bool sim_json = false;
  std::string sim_csv;
  auto* sim = app.add_subcommand("simulate", "Run sessions over loopback");
  sim_flags.add(sim);
  sim_session.add(sim);
  sim->add_option("--level", sim_level, "Level of the user's pairs (default ell)");
  sim->add_option("--request", sim_request, "Requested level (default --level)");
  sim->add_option("--adversary", sim_adversary,
                  "none|classical|cross-level:K|fabricate|angles:B0,B1|"
                  "delayed-reveal|withhold-commit")
      ->capture_default_str();
  sim->add_option("--runs,-M", sim_runs, "Number of sessions")
      ->capture_default_str();
  sim->add_option("--jobs,-j", sim_jobs, "Worker threads")->capture_default_str();
  sim->add_flag("--json", sim_json, "Print the summary as JSON");
  sim->add_option("--csv", sim_csv, "Write per-run rows");

  // serve
  PlanFlags serve_flags;
  SessionFlags serve_session;
  std::string serve_host = "127.0.0.1";
  int serve_port = kDefaultPort;
  std::string serve_distributor = "127.0.0.1:" + std::to_string(kDefaultPort + 1);
  std::string serve_db;
  std::string serve_transcripts;
  std::size_t serve_sessions = 0;
  auto* serve = app.add_subcommand("serve", "Run the Authorizer");
  serve_flags.add(serve);
  serve_session.add(serve);
  serve->add_option("--host", serve_host)->capture_default_str();
  serve->add_option("--port", serve_port, "0 picks a free port")
      ->capture_default_str();
  serve->add_option("--distributor", serve_distributor, "host:port")
      ->capture_default_str();
  serve->add_option("--db", serve_db, "NDJSON leveled database")->required();
  serve->add_option("--transcripts", serve_transcripts,
                    "Directory for session transcripts");
  serve->add_option("--sessions", serve_sessions,
                    "Exit after this many sessions (0 = run until signalled)");

  // distribute
  int dist_ell = 2;
  SessionFlags dist_session;
  std::string dist_host = "127.0.0.1";
  int dist_port = kDefaultPort + 1;
  std::vector<std::string> dist_assign;
  auto* dist = app.add_subcommand("distribute", "Run the Distributor");
  dist->add_option("--ell", dist_ell, "Number of levels")->capture_default_str();
  dist->add_option("--seed", dist_session.seed, "Master seed")
      ->capture_default_str();
  dist->add_option("--host", dist_host)->capture_default_str();
  dist->add_option("--port", dist_port, "0 picks a free port")
      ->capture_default_str();
  dist->add_option("--assign", dist_assign, "user=level, repeatable")
      ->required();

  // user and query
  PlanFlags user_flags;
  SessionFlags user_session;
  std::string user_connect = "127.0.0.1:" + std::to_string(kDefaultPort);
  std::string user_distributor =
      "127.0.0.1:" + std::to_string(kDefaultPort + 1);
  std::string user_id = "user";
  int user_level = 1;
  int user_true_level = 0;
  std::string user_adversary = "none";
  std::vector<std::string> user_queries;
  std::string user_transcript;
  bool user_json = false;
  auto* user = app.add_subcommand("user", "Run a User session");
  auto* query_cmd = app.add_subcommand(
      "query", "Run a User session and print the requested records");
  for (CLI::App* cmd : {user, query_cmd}) {
    user_flags.add(cmd);
    user_session.add(cmd);
    cmd->add_option("--connect", user_connect, "Authorizer host:port")
        ->capture_default_str();
    cmd->add_option("--distributor", user_distributor, "host:port")
        ->capture_default_str();
    cmd->add_option("--id", user_id, "User identifier")->capture_default_str();
    cmd->add_option("--level", user_level, "Requested level")
        ->capture_default_str();
    cmd->add_option("--true-level", user_true_level,
                    "Level actually held (cross-level adversary)");
    cmd->add_option("--adversary", user_adversary)->capture_default_str();
    cmd->add_option("--transcript", user_transcript, "Write the transcript");
    cmd->add_flag("--json", user_json, "Print JSON");
  }
  user->add_option("--query", user_queries, "Record id to fetch, repeatable");
  query_cmd->add_option("record", user_queries, "Record ids")->required();

  // stats
  std::string stats_csv;
  bool stats_json = false;
  auto* stats = app.add_subcommand("stats", "Summarize a simulate CSV");
  stats->add_option("csv", stats_csv, "Runs CSV")->required();
  stats->add_flag("--json", stats_json, "Print JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*plan) {
      const LevelTable table = plan_flags.table();
      const ProtocolParams p = plan_flags.params(table);
      const OverlapReport report = check_no_overlap(p, table);
      if (plan_json_out) {
        std::cout << plan_json(p, table, report).dump(2) << "\n";
      } else {
        print_plan(p, table, report);
      }
      if (!plan_csv.empty()) {
        std::ofstream out(plan_csv);
        write_table_csv(out, table, p);
      }
      return expect_disjoint && !report.pass() ? kExitPlanning : kExitOk;
    }

    if (*table_cmd) {
      const LevelTable table = table_flags.table();
      const ProtocolParams p = table_flags.params(table);
      if (table_json) {
        std::cout << plan_json(p, table, check_no_overlap(p, table))["levels"]
                         .dump(2)
                  << "\n";
      } else if (!table_csv.empty()) {
        std::ofstream out(table_csv);
        write_table_csv(out, table, p);
      } else {
        write_table_csv(std::cout, table, p);
      }
      return kExitOk;
    }

    if (*sim) {
      const LevelTable table = sim_flags.table();
      SimulationConfig config;
      config.true_level = sim_level > 0 ? sim_level : sim_flags.ell;
      std::optional<int> requested = sim_request;
      config.behavior = parse_adversary(sim_adversary, requested);
      config.requested_level = requested.value_or(config.true_level);
      config.runs = sim_runs;
      config.seed = sim_session.seed;
      config.batched = sim_session.batched;
      config.policy.grant_matching_level = sim_session.grant_matching;
      config.jobs = sim_jobs;
      config.params = sim_flags.params(table);
      try {
        validate(config, table);
      } catch (const DomainError& e) {
        throw UsageError(e.what());
      }
      const std::vector<RunRow> rows = simulate(config, table);
      if (!sim_csv.empty()) {
        std::ofstream out(sim_csv);
        write_runs_csv(out, rows);
      }
      const SimulationSummary s = summarize(rows);
      if (sim_json) {
        std::cout << to_json(s).dump(2) << "\n";
      } else {
        std::cout << "runs                " << s.runs << "\n"
                  << "accepted            " << s.accepted << "\n"
                  << "acceptance_fraction " << s.acceptance_fraction << "\n"
                  << "mean_wins           " << s.mean_wins << "\n"
                  << "std_wins            " << s.std_wins << "\n";
      }
      return kExitOk;
    }

    if (*serve) {
      const LevelTable table = serve_flags.table();
      ServerConfig config;
      config.host = serve_host;
      config.port = static_cast<std::uint16_t>(serve_port);
      std::tie(config.distributor_host, config.distributor_port) =
          parse_address(serve_distributor);
      config.params = serve_flags.params(table);
      config.batched = serve_session.batched;
      config.policy.grant_matching_level = serve_session.grant_matching;
      config.seed = serve_session.seed;
      config.timeout = std::chrono::milliseconds(serve_session.timeout_ms);
      if (!serve_transcripts.empty()) config.transcript_dir = serve_transcripts;
      sigset_t signals;
      block_signals(signals);
      AuthorizerServer server(config, table,
                              load_database(serve_db, serve_flags.ell));
      server.start();
      std::cout << "authorizer listening on " << serve_host << ":"
                << server.port() << std::endl;
      if (serve_sessions > 0) {
        server.wait(serve_sessions);
      } else {
        int sig = 0;
        sigwait(&signals, &sig);
      }
      server.stop();
      return kExitOk;
    }

    if (*dist) {
      sigset_t signals;
      block_signals(signals);
      const LevelTable table = build_level_table(dist_ell);
      Distributor distributor(table, dist_session.seed);
      for (const std::string& a : dist_assign) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) throw UsageError("--assign needs user=level");
        const int level = std::stoi(a.substr(eq + 1));
        if (level < 1 || level > dist_ell) throw UsageError("level out of range");
        distributor.assign(a.substr(0, eq), level);
      }
      DistributorServer server(distributor, dist_host,
                               static_cast<std::uint16_t>(dist_port));
      server.start();
      std::cout << "distributor listening on " << dist_host << ":"
                << server.port() << std::endl;
      int sig = 0;
      sigwait(&signals, &sig);
      server.stop();
      return kExitOk;
    }

    if (*user || *query_cmd) {
      const LevelTable table = user_flags.table();
      ClientConfig config;
      std::tie(config.host, config.port) = parse_address(user_connect);
      std::tie(config.distributor_host, config.distributor_port) =
          parse_address(user_distributor);
      config.params = user_flags.params(table);
      config.batched = user_session.batched;
      config.seed = user_session.seed;
      config.timeout = std::chrono::milliseconds(user_session.timeout_ms);
      std::optional<int> requested;
      config.user.behavior = parse_adversary(user_adversary, requested);
      config.user.user_id = user_id;
      config.user.requested_level = requested.value_or(user_level);
      config.user.true_level = user_true_level;
      config.query_ids = user_queries;

      const ClientResult result = run_user_client(config, table);
      if (!user_transcript.empty()) {
        std::ofstream out(user_transcript);
        out << to_json(result.transcript).dump() << "\n";
      }
      const bool granted = result.phase == Phase::kDone;
      if (user_json) {
        nlohmann::json j{{"session_id", result.transcript.session_id},
                         {"granted", granted},
                         {"wins", result.transcript.wins()}};
        if (granted) j["level"] = *result.verdict->granted_level;
        if (!granted) j["abort_reason"] = result.abort_reason;
        nlohmann::json queries = nlohmann::json::array();
        for (const QueryReply& q : result.queries) {
          queries.push_back(
              {{"id", q.record_id}, {"status", q.status}, {"data", q.data}});
        }
        j["queries"] = queries;
        std::cout << j.dump(2) << "\n";
      } else if (*query_cmd) {
        if (!granted) print_verdict(std::cerr, result.verdict, result.abort_reason);
        for (const QueryReply& q : result.queries) {
          std::cout << q.record_id << "\t" << q.status;
          if (q.status == "ok") {
            const auto bytes = base64_decode(q.data);
            std::cout << "\t" << std::string(bytes.begin(), bytes.end());
          }
          std::cout << "\n";
        }
      } else {
        std::cout << "session " << result.transcript.session_id << " wins "
                  << result.transcript.wins() << "\n";
        print_verdict(std::cout, result.verdict, result.abort_reason);
        for (const QueryReply& q : result.queries) {
          std::cout << "query " << q.record_id << " " << q.status << "\n";
        }
      }
      return granted ? kExitOk : kExitAbort;
    }

    if (*stats) {
      std::ifstream in(stats_csv);
      if (!in) throw UsageError("cannot open " + stats_csv);
      const SimulationSummary s = summarize(read_runs_csv(in));
      if (stats_json) {
        std::cout << to_json(s).dump(2) << "\n";
      } else {
        std::cout << "runs " << s.runs << " accepted " << s.accepted
                  << " fraction " << s.acceptance_fraction << " mean "
                  << s.mean_wins << " std " << s.std_wins << "\n";
      }
      return kExitOk;
    }
  } catch (const PlanningError& e) {
    std::cerr << "planning failed: " << e.what() << "\n";
    return kExitPlanning;
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const LoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAbort;
  }
  return kExitUsage;
}
