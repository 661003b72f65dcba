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

#include "chshauth/authdb.h"

#include <fstream>
#include <istream>

#include <nlohmann/json.hpp>

#include "chshauth/codec.h"
#include "chshauth/errors.h"

namespace chshauth {

LeveledDatabase::LeveledDatabase(int level_count, std::vector<Record> records)
    : level_count_(level_count), records_(std::move(records)) {
  if (level_count_ < 1) throw LoadError("database needs at least one level");
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const Record& r = records_[i];
    if (r.level < 1 || r.level > level_count_) {
      throw LoadError("record " + r.id + " has level " +
                      std::to_string(r.level) + " outside [1, " +
                      std::to_string(level_count_) + "]");
    }
    if (!index_.emplace(r.id, i).second) {
      throw LoadError("duplicate record id " + r.id);
    }
  }
}

const Record* LeveledDatabase::find(std::string_view id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

LeveledDatabase load_database(std::istream& in, int level_count) {
  std::vector<Record> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      records.push_back({j.at("id").get<std::string>(),
                         j.at("level").get<int>(),
                         base64_decode(j.at("data").get<std::string>())});
    } catch (const std::exception& e) {
      throw LoadError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return LeveledDatabase(level_count, std::move(records));
}

LeveledDatabase load_database(const std::string& path, int level_count) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path);
  return load_database(in, level_count);
}

AccessGrant issue_grant(const Verdict& verdict, const std::string& user_id,
                        const std::string& session_id) {
  if (!verdict.granted()) {
    throw AccessError("no grant for an aborted session: " +
                      verdict.abort_reason);
  }
  return {user_id, *verdict.granted_level, session_id,
          std::chrono::system_clock::now()};
}

QueryResult query(const LeveledDatabase& db, const AccessGrant& grant,
                  std::string_view record_id) {
  const Record* r = db.find(record_id);
  if (r == nullptr) return {QueryStatus::kNotFound, {}};
  if (r->level > grant.level) return {QueryStatus::kDenied, {}};
  return {QueryStatus::kOk, r->payload};
}

std::string_view to_string(QueryStatus status) {
  switch (status) {
    case QueryStatus::kOk: return "ok";
    case QueryStatus::kDenied: return "denied";
    case QueryStatus::kNotFound: return "not_found";
  }
  return "not_found";
}

QueryReply to_reply(std::string_view record_id, const QueryResult& result) {
  return {std::string(record_id), std::string(to_string(result.status)),
          base64_encode(result.payload)};
}

}  // namespace chshauth
