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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chshauth/chsh.h"
#include "chshauth/commit.h"
#include "chshauth/errors.h"
#include "chshauth/planner.h"
#include "chshauth/qsim.h"
#include "chshauth/session.h"
#include "chshauth/simulate.h"

namespace py = pybind11;

namespace {

using namespace chshauth;

// Hands structured results to Python as plain dicts and lists.
py::object to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

ProtocolParams plan(int lambda, int ell, const std::string& mode,
                    std::int64_t rounds) {
  const LevelTable table = build_level_table(ell);
  return rounds > 0 ? plan_with_rounds(ell, parse_plan_mode(mode), rounds, table)
                    : plan_params(lambda, ell, parse_plan_mode(mode), table);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "CHSH-game leveled authorization";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<PlanningError>(m, "PlanningError", PyExc_ValueError);

  m.def("omega_of_concurrence", &omega_of_concurrence, py::arg("concurrence"));
  m.def("omega_of_theta", &omega_of_theta, py::arg("theta"));
  m.def("classical_maximum", [] { return classical_maximum().second; });
  m.def(
      "concurrence_of_theta",
      [](double theta) {
        return concurrence_pure(make_partially_entangled(theta));
      },
      py::arg("theta"));
  m.def(
      "win_probability",
      [](double theta, std::array<double, 2> alice, std::array<double, 2> bob) {
        const QuantumStrategy s{
            {MeasurementSetting(alice[0]), MeasurementSetting(alice[1])},
            {MeasurementSetting(bob[0]), MeasurementSetting(bob[1])}};
        return win_probability(make_partially_entangled(theta), s);
      },
      py::arg("theta"), py::arg("alice"), py::arg("bob"));
  m.def(
      "optimal_win_probability",
      [](double theta) {
        return win_probability(make_partially_entangled(theta),
                               optimal_strategy(theta));
      },
      py::arg("theta"));

  m.def(
      "level_table",
      [](int ell) { return to_py(to_json(build_level_table(ell))); },
      py::arg("ell"));
  m.def(
      "plan",
      [](int lambda, int ell, const std::string& mode, std::int64_t rounds) {
        return to_py(to_json(plan(lambda, ell, mode, rounds)));
      },
      py::arg("lambda_"), py::arg("ell"), py::arg("mode") = "paper",
      py::arg("rounds") = 0);
  m.def(
      "acceptance_interval",
      [](int level, int lambda, int ell, const std::string& mode) {
        const AcceptanceInterval iv = acceptance_interval(
            level, plan(lambda, ell, mode, 0), build_level_table(ell));
        return py::make_tuple(iv.lo, iv.hi);
      },
      py::arg("level"), py::arg("lambda_"), py::arg("ell"),
      py::arg("mode") = "paper");
  m.def(
      "check_no_overlap",
      [](int lambda, int ell, const std::string& mode) {
        return to_py(to_json(check_no_overlap(plan(lambda, ell, mode, 0),
                                              build_level_table(ell))));
      },
      py::arg("lambda_"), py::arg("ell"), py::arg("mode") = "paper");

  m.def(
      "commit",
      [](std::int64_t round, const std::string& role, int question, int answer,
         py::bytes salt) {
        const std::string s = salt;
        if (s.size() != 16) throw DomainError("salt must be 16 bytes");
        Salt raw{};
        std::copy(s.begin(), s.end(), raw.begin());
        const Digest d = commit(round, role == "user" ? Role::kUser
                                                      : Role::kAuthorizer,
                                question, answer, raw);
        return py::bytes(reinterpret_cast<const char*>(d.data()), d.size());
      },
      py::arg("round"), py::arg("role"), py::arg("question"),
      py::arg("answer"), py::arg("salt"));

  m.def(
      "run_session",
      [](int lambda, int ell, const std::string& mode, int true_level,
         int requested_level, const std::string& behavior, std::uint64_t seed,
         bool batched, std::int64_t rounds) {
        const LevelTable table = build_level_table(ell);
        const SessionSpec spec{"user", true_level, requested_level,
                               UserBehavior::Parse(behavior)};
        SessionOptions options;
        options.batched = batched;
        const ProtocolParams params = plan(lambda, ell, mode, rounds);
        SessionResult r;
        {
          py::gil_scoped_release release;
          r = run_session(params, table, spec, seed, options);
        }
        nlohmann::json out{{"granted", r.verdict.granted()},
                           {"wins", r.transcript.wins()},
                           {"rounds", r.transcript.rounds.size()},
                           {"session_id", r.transcript.session_id}};
        if (r.verdict.granted()) out["level"] = *r.verdict.granted_level;
        else out["abort_reason"] = r.verdict.abort_reason;
        return to_py(out);
      },
      py::arg("lambda_"), py::arg("ell"), py::arg("mode") = "paper",
      py::arg("true_level") = 1, py::arg("requested_level") = 1,
      py::arg("behavior") = "honest", py::arg("seed") = 1,
      py::arg("batched") = false, py::arg("rounds") = 0);

  m.def(
      "simulate",
      [](int lambda, int ell, const std::string& mode, int true_level,
         int requested_level, const std::string& behavior, std::int64_t runs,
         std::uint64_t seed, bool batched, std::int64_t rounds) {
        const LevelTable table = build_level_table(ell);
        SimulationConfig config;
        config.params = plan(lambda, ell, mode, rounds);
        config.true_level = true_level;
        config.requested_level = requested_level;
        config.behavior = UserBehavior::Parse(behavior);
        config.runs = runs;
        config.seed = seed;
        config.batched = batched;
        std::vector<RunRow> rows;
        {
          py::gil_scoped_release release;
          rows = simulate(config, table);
        }
        return to_py(to_json(summarize(rows)));
      },
      py::arg("lambda_"), py::arg("ell"), py::arg("mode") = "paper",
      py::arg("true_level") = 1, py::arg("requested_level") = 1,
      py::arg("behavior") = "honest", py::arg("runs") = 1,
      py::arg("seed") = 1, py::arg("batched") = false, py::arg("rounds") = 0);
}
