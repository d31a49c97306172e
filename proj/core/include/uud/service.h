// Copyright 2026 The uudiscover Authors
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

// Durable discovery sessions and the HTTP service that hosts them.
//
// Every session owns an append-only event log (one JSON object per line):
//
//   {"event":"created","session":...,"config":{...}}
//   {"event":"partitioned","search_space":N,"partitions":K,"budget":B}
//   {"event":"step","t":1,"arm":...,"instance":...,"label":...,...}
//
// The pipeline is deterministic in its config, so reopening a session
// recomputes the partitioning and replays the logged steps through the
// explorer, checking that every replayed proposal matches the log.
//
// HTTP endpoints (JSON bodies):
//
//   POST /sessions                  create from a config object
//   GET  /sessions/{id}             state
//   GET  /sessions/{id}/question    pending question (interactive sessions)
//   POST /sessions/{id}/answer      {"step": s, "label": "..."}
//   GET  /sessions/{id}/report      summary with per-partition counts
//
// Unknown ids answer 404, answers for a step that is not pending 409,
// malformed requests 400.

#ifndef UUD_SERVICE_H_
#define UUD_SERVICE_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "uud/bandit.h"
#include "uud/oracle.h"
#include "uud/session.h"

namespace uud {

// Appends lines and flushes them to stable storage before returning.
class EventLog {
 public:
  explicit EventLog(std::filesystem::path path);
  ~EventLog();
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  void Append(const std::string& line);
  const std::filesystem::path& path() const { return path_; }

  // Complete lines only; a torn final line left by a crash is skipped.
  static std::vector<std::string> ReadLines(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

enum class SessionPhase { kPartitioned, kExploring, kDone };
std::string SessionPhaseName(SessionPhase phase);

struct AnswerOutcome {
  AnswerStatus status = AnswerStatus::kStale;
  std::size_t steps = 0;  // committed steps after the call
};

class DiscoverySession {
 public:
  // Prepares the pipeline and writes the created/partitioned events. A
  // simulated session explores to completion before returning.
  static std::unique_ptr<DiscoverySession> Create(
      const std::string& id, const std::filesystem::path& dir,
      const SessionConfig& config);
  // Rebuilds a session from its event log.
  static std::unique_ptr<DiscoverySession> Open(
      const std::string& id, const std::filesystem::path& dir);

  const std::string& id() const { return id_; }
  SessionPhase phase() const;
  std::string StateJson() const;
  std::string ReportJson() const;
  ExplorationTrace Trace() const;

  // Interactive sessions: the question for the next step (the same one until
  // it is answered), or nullopt once exploration is over.
  std::optional<Question> CurrentQuestion();
  AnswerOutcome Answer(std::size_t step, const std::string& label);

 private:
  DiscoverySession(std::string id, std::filesystem::path dir,
                   SessionConfig config);
  void Start();
  void ApplyStep(const OracleVerdict& verdict, bool log);

  std::string id_;
  std::filesystem::path dir_;
  SessionConfig config_;
  PreparedSession prepared_;
  std::unique_ptr<Explorer> explorer_;
  std::unique_ptr<InteractiveOracle> human_;
  std::unique_ptr<EventLog> log_;
  bool question_posted_ = false;
  mutable std::mutex mu_;
};

std::string QuestionToJson(const Question& question, std::size_t budget);

// Owns every session under a data directory; sessions found on disk are
// reopened at construction.
class SessionManager {
 public:
  explicit SessionManager(std::filesystem::path data_dir);

  std::shared_ptr<DiscoverySession> Create(const SessionConfig& config);
  std::shared_ptr<DiscoverySession> Find(const std::string& id) const;
  std::vector<std::string> Ids() const;
  const std::vector<std::string>& load_errors() const { return load_errors_; }

 private:
  std::filesystem::path data_dir_;
  std::map<std::string, std::shared_ptr<DiscoverySession>> sessions_;
  std::size_t next_id_ = 1;
  std::vector<std::string> load_errors_;
  mutable std::mutex mu_;
};

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "uud-sessions";

  // UUD_PORT and UUD_DATA_DIR override the fields when set.
  void ApplyEnvironment();
};

class Service {
 public:
  explicit Service(SessionManager& sessions);
  ~Service();

  // Binds and serves until Stop(). Returns false if the port cannot be
  // bound.
  bool Listen(const std::string& host, int port);
  // Binds to a free port and returns it, or -1.
  int BindAnyPort(const std::string& host);
  bool ListenAfterBind();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace uud

#endif  // UUD_SERVICE_H_
