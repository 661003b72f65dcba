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

// Leveled database DB = {L_1, ..., L_ell}. A grant for level k unlocks
// exactly the records tagged 1..k.

#ifndef CHSHAUTH_AUTHDB_H_
#define CHSHAUTH_AUTHDB_H_

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "chshauth/message.h"

namespace chshauth {

struct Record {
  std::string id;
  int level = 0;
  std::vector<std::uint8_t> payload;
};

class LeveledDatabase {
 public:
  // Throws LoadError on a level tag outside [1, level_count] or a duplicate
  // id.
  LeveledDatabase(int level_count, std::vector<Record> records);

  int level_count() const { return level_count_; }
  std::size_t size() const { return records_.size(); }
  const std::vector<Record>& records() const { return records_; }
  const Record* find(std::string_view id) const;

 private:
  int level_count_;
  std::vector<Record> records_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Newline-delimited JSON, one {"id": string, "level": int, "data": base64}
// per line; blank lines are skipped. Throws LoadError.
LeveledDatabase load_database(std::istream& in, int level_count);
LeveledDatabase load_database(const std::string& path, int level_count);

struct AccessGrant {
  std::string user_id;
  int level = 0;
  std::string session_id;
  std::chrono::system_clock::time_point issued_at;
};

// Throws AccessError unless the verdict granted a level.
AccessGrant issue_grant(const Verdict& verdict, const std::string& user_id,
                        const std::string& session_id);

enum class QueryStatus { kOk, kDenied, kNotFound };

struct QueryResult {
  QueryStatus status = QueryStatus::kNotFound;
  std::vector<std::uint8_t> payload;
};

QueryResult query(const LeveledDatabase& db, const AccessGrant& grant,
                  std::string_view record_id);

std::string_view to_string(QueryStatus status);

// Wire form of a query result.
QueryReply to_reply(std::string_view record_id, const QueryResult& result);

}  // namespace chshauth

#endif  // CHSHAUTH_AUTHDB_H_
