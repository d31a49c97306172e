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

#include "uud/service.h"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <utility>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "uud/error.h"
#include "uud/text.h"

namespace uud {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

constexpr char kEventsFile[] = "events.jsonl";

}  // namespace

EventLog::EventLog(std::filesystem::path path) : path_(std::move(path)) {
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw Error("cannot open " + path_.string() + ": " + std::strerror(errno));
  }
}

EventLog::~EventLog() {
  if (fd_ >= 0) ::close(fd_);
}

void EventLog::Append(const std::string& line) {
  const std::string record = line + "\n";
  std::size_t written = 0;
  while (written < record.size()) {
    const ssize_t n =
        ::write(fd_, record.data() + written, record.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error("write failed on " + path_.string() + ": " +
                  std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd_) != 0) {
    throw Error("fsync failed on " + path_.string() + ": " +
                std::strerror(errno));
  }
}

std::vector<std::string> EventLog::ReadLines(
    const std::filesystem::path& path) {
  const std::string text = ReadFile(path);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find('\n', start);
    if (end == std::string::npos) break;
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::string SessionPhaseName(SessionPhase phase) {
  switch (phase) {
    case SessionPhase::kPartitioned:
      return "partitioned";
    case SessionPhase::kExploring:
      return "exploring";
    case SessionPhase::kDone:
      return "done";
  }
  return "partitioned";
}

DiscoverySession::DiscoverySession(std::string id, std::filesystem::path dir,
                                   SessionConfig config)
    : id_(std::move(id)), dir_(std::move(dir)), config_(std::move(config)) {}

void DiscoverySession::Start() {
  prepared_ = Prepare(config_);
  explorer_ = std::make_unique<Explorer>(
      prepared_.arms, MakePolicy(PolicySpec::Parse(config_.policy)),
      UtilityConfig{config_.gamma, config_.critical_class}, prepared_.budget,
      config_.seed);
  if (config_.oracle == OracleMode::kInteractive) {
    human_ = std::make_unique<InteractiveOracle>(
        id_, prepared_.raw_space.schema, prepared_.raw_space.instances,
        config_.critical_class, prepared_.cost_model, prepared_.budget);
  }
}

void DiscoverySession::ApplyStep(const OracleVerdict& verdict, bool log) {
  const TraceStep& step = explorer_->Commit(verdict);
  question_posted_ = false;
  if (!log) return;
  OrderedJson j;
  j["event"] = "step";
  j["t"] = step.t;
  j["arm"] = step.arm;
  j["instance"] = step.instance_id;
  j["label"] = verdict.true_label;
  j["unknown_unknown"] = step.is_unknown_unknown;
  j["cost"] = step.cost;
  j["utility"] = step.utility;
  j["cumulative"] = step.cumulative_utility;
  log_->Append(j.dump());
}

namespace {

// Drives a simulated session until its budget is spent.
void RunToCompletion(Explorer& explorer, const PreparedSession& prepared,
                     const std::function<void(const OracleVerdict&)>& apply) {
  const std::size_t done = explorer.trace().steps.size();
  SimulatedOracle oracle(prepared.space, prepared.dataset.truth,
                         prepared.cost_model, prepared.budget - done);
  while (auto proposal = explorer.Next()) {
    QueryResult result = oracle.Query(proposal->instance_id);
    if (result.status != QueryStatus::kAnswered) {
      explorer.MarkTruncated();
      break;
    }
    apply(*result.verdict);
  }
}

SessionConfig WithAbsolutePaths(SessionConfig config) {
  auto absolute = [](std::filesystem::path& p) {
    if (!p.empty()) p = std::filesystem::absolute(p);
  };
  absolute(config.instances);
  absolute(config.schema);
  absolute(config.training);
  absolute(config.output_dir);
  return config;
}

}  // namespace

std::unique_ptr<DiscoverySession> DiscoverySession::Create(
    const std::string& id, const std::filesystem::path& dir,
    const SessionConfig& config) {
  std::unique_ptr<DiscoverySession> session(
      new DiscoverySession(id, dir, WithAbsolutePaths(config)));
  std::filesystem::create_directories(dir);
  if (std::filesystem::exists(dir / kEventsFile)) {
    throw Error("session '" + id + "' already exists");
  }
  session->Start();
  session->log_ = std::make_unique<EventLog>(dir / kEventsFile);
  OrderedJson created;
  created["event"] = "created";
  created["session"] = id;
  created["config"] = OrderedJson::parse(SessionConfigToJson(session->config_));
  session->log_->Append(created.dump());
  OrderedJson partitioned;
  partitioned["event"] = "partitioned";
  partitioned["search_space"] = session->prepared_.space.size();
  partitioned["partitions"] = session->prepared_.partitioning.size();
  partitioned["budget"] = session->prepared_.budget;
  session->log_->Append(partitioned.dump());
  if (session->config_.oracle == OracleMode::kSimulated) {
    DiscoverySession* s = session.get();
    RunToCompletion(*s->explorer_, s->prepared_,
                    [s](const OracleVerdict& v) { s->ApplyStep(v, true); });
  }
  return session;
}

std::unique_ptr<DiscoverySession> DiscoverySession::Open(
    const std::string& id, const std::filesystem::path& dir) {
  const std::filesystem::path path = dir / kEventsFile;
  const std::vector<std::string> lines = EventLog::ReadLines(path);
  // Drop a torn trailing record so that later appends start on a fresh line.
  std::uintmax_t complete = 0;
  for (const std::string& line : lines) complete += line.size() + 1;
  if (std::filesystem::file_size(path) != complete) {
    std::filesystem::resize_file(path, complete);
  }
  if (lines.empty()) throw Error("session log " + path.string() + " is empty");

  auto parse = [&](std::size_t i) {
    try {
      return Json::parse(lines[i]);
    } catch (const Json::parse_error& e) {
      throw ParseError(path.string(), i + 1, e.what());
    }
  };
  const Json created = parse(0);
  if (created.value("event", "") != "created") {
    throw ParseError(path.string(), 1, "first event must be 'created'");
  }
  SessionConfig config = ParseSessionConfig(created.at("config").dump(), {});
  std::unique_ptr<DiscoverySession> session(
      new DiscoverySession(id, dir, std::move(config)));
  session->Start();

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Json event = parse(i);
    const std::string kind = event.value("event", "");
    if (kind == "partitioned") {
      if (event.at("search_space").get<std::size_t>() !=
              session->prepared_.space.size() ||
          event.at("partitions").get<std::size_t>() !=
              session->prepared_.partitioning.size() ||
          event.at("budget").get<std::size_t>() != session->prepared_.budget) {
        throw Error("session '" + id +
                    "': recomputed partitioning differs from the log");
      }
      continue;
    }
    if (kind != "step") {
      throw ParseError(path.string(), i + 1, "unknown event '" + kind + "'");
    }
    const std::optional<Proposal> proposal = session->explorer_->Next();
    const std::string instance = event.at("instance").get<std::string>();
    if (!proposal || proposal->instance_id != instance ||
        proposal->t != event.at("t").get<std::size_t>()) {
      throw Error("session '" + id + "': step " + std::to_string(i) +
                  " of the log does not match the replayed exploration");
    }
    OracleVerdict verdict;
    verdict.instance_id = instance;
    verdict.true_label = event.at("label").get<std::string>();
    verdict.cost = event.at("cost").get<double>();
    verdict.is_unknown_unknown =
        verdict.true_label != session->config_.critical_class;
    session->ApplyStep(verdict, false);
    const TraceStep& replayed = session->explorer_->trace().steps.back();
    if (replayed.utility != event.at("utility").get<double>() ||
        replayed.cumulative_utility != event.at("cumulative").get<double>()) {
      throw Error("session '" + id + "': utility mismatch while replaying");
    }
  }
  session->log_ = std::make_unique<EventLog>(path);
  if (session->human_) {
    session->human_->SetAnswered(session->explorer_->trace().steps.size());
  } else if (!session->explorer_->done()) {
    DiscoverySession* s = session.get();
    RunToCompletion(*s->explorer_, s->prepared_,
                    [s](const OracleVerdict& v) { s->ApplyStep(v, true); });
  }
  return session;
}

SessionPhase DiscoverySession::phase() const {
  std::lock_guard lock(mu_);
  if (explorer_->done()) return SessionPhase::kDone;
  if (explorer_->trace().steps.empty() && !question_posted_) {
    return SessionPhase::kPartitioned;
  }
  return SessionPhase::kExploring;
}

std::string DiscoverySession::StateJson() const {
  const SessionPhase current = phase();
  std::lock_guard lock(mu_);
  OrderedJson j;
  j["session_id"] = id_;
  j["phase"] = SessionPhaseName(current);
  j["oracle"] = OracleModeName(config_.oracle);
  j["policy"] = explorer_->trace().policy;
  j["search_space"] = prepared_.space.size();
  j["partitions"] = prepared_.partitioning.size();
  j["budget"] = prepared_.budget;
  j["steps"] = explorer_->trace().steps.size();
  const auto& pending = explorer_->pending();
  if (pending && question_posted_) {
    j["pending_step"] = pending->t;
  } else {
    j["pending_step"] = nullptr;
  }
  return j.dump();
}

std::string DiscoverySession::ReportJson() const {
  const SessionPhase current = phase();
  std::lock_guard lock(mu_);
  OrderedJson j;
  j["session_id"] = id_;
  j["phase"] = SessionPhaseName(current);
  const OrderedJson summary = OrderedJson::parse(
      SummaryJson(config_, prepared_, explorer_->trace()));
  for (const auto& [key, value] : summary.items()) j[key] = value;
  return j.dump(2) + "\n";
}

ExplorationTrace DiscoverySession::Trace() const {
  std::lock_guard lock(mu_);
  return explorer_->trace();
}

std::optional<Question> DiscoverySession::CurrentQuestion() {
  std::lock_guard lock(mu_);
  if (!human_) return std::nullopt;
  const std::optional<Proposal> proposal = explorer_->Next();
  if (!proposal) return std::nullopt;
  question_posted_ = true;
  return human_->Post(proposal->instance_id);
}

AnswerOutcome DiscoverySession::Answer(std::size_t step,
                                       const std::string& label) {
  std::lock_guard lock(mu_);
  AnswerOutcome outcome;
  outcome.steps = explorer_->trace().steps.size();
  if (!human_) return outcome;
  const std::optional<Proposal> proposal = explorer_->Next();
  if (!proposal) return outcome;
  human_->Post(proposal->instance_id);
  question_posted_ = true;
  outcome.status = human_->Submit(step, label);
  if (outcome.status == AnswerStatus::kAccepted) {
    std::optional<OracleVerdict> verdict = human_->TakeVerdict();
    ApplyStep(*verdict, true);
  }
  outcome.steps = explorer_->trace().steps.size();
  return outcome;
}

std::string QuestionToJson(const Question& question, std::size_t budget) {
  OrderedJson j;
  j["session_id"] = question.session_id;
  j["step"] = question.step;
  j["budget"] = budget;
  j["instance_id"] = question.instance_id;
  OrderedJson features = OrderedJson::array();
  for (const auto& [name, value] : question.features) {
    features.push_back({{"name", name}, {"value", value}});
  }
  j["features"] = std::move(features);
  j["predicted_label"] = question.predicted_label;
  return j.dump();
}

namespace {

constexpr char kIdPrefix[] = "s";

std::optional<std::size_t> IdNumber(const std::string& name) {
  if (name.size() < 2 || name[0] != kIdPrefix[0]) return std::nullopt;
  std::size_t value = 0;
  for (std::size_t i = 1; i < name.size(); ++i) {
    if (name[i] < '0' || name[i] > '9') return std::nullopt;
    value = value * 10 + static_cast<std::size_t>(name[i] - '0');
  }
  return value;
}

std::string FormatId(std::size_t n) {
  std::string digits = std::to_string(n);
  if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
  return kIdPrefix + digits;
}

}  // namespace

SessionManager::SessionManager(std::filesystem::path data_dir)
    : data_dir_(std::move(data_dir)) {
  std::filesystem::create_directories(data_dir_);
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(data_dir_)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    const std::string name = dir.filename().string();
    const std::optional<std::size_t> number = IdNumber(name);
    if (!number) continue;
    next_id_ = std::max(next_id_, *number + 1);
    if (!std::filesystem::exists(dir / kEventsFile)) continue;
    try {
      sessions_[name] = DiscoverySession::Open(name, dir);
    } catch (const std::exception& e) {
      load_errors_.push_back(name + ": " + e.what());
    }
  }
}

std::shared_ptr<DiscoverySession> SessionManager::Create(
    const SessionConfig& config) {
  std::lock_guard lock(mu_);
  const std::string id = FormatId(next_id_++);
  const std::filesystem::path dir = data_dir_ / id;
  try {
    std::shared_ptr<DiscoverySession> session =
        DiscoverySession::Create(id, dir, config);
    sessions_[id] = session;
    return session;
  } catch (...) {
    std::error_code ignored;
    std::filesystem::remove_all(dir, ignored);
    throw;
  }
}

std::shared_ptr<DiscoverySession> SessionManager::Find(
    const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::vector<std::string> SessionManager::Ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> ids;
  for (const auto& [id, session] : sessions_) ids.push_back(id);
  return ids;
}

void ServiceOptions::ApplyEnvironment() {
  if (const char* port_env = std::getenv("UUD_PORT")) {
    try {
      port = std::stoi(port_env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("UUD_PORT is not a number: ") + port_env);
    }
  }
  if (const char* dir_env = std::getenv("UUD_DATA_DIR")) data_dir = dir_env;
}

struct Service::Impl {
  explicit Impl(SessionManager& s) : sessions(s) {}

  SessionManager& sessions;
  httplib::Server server;
};

namespace {

void Reply(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "application/json");
}

void ReplyError(httplib::Response& res, int status, const std::string& what) {
  Reply(res, status, Json{{"error", what}}.dump());
}

}  // namespace

Service::Service(SessionManager& sessions)
    : impl_(std::make_unique<Impl>(sessions)) {
  httplib::Server& server = impl_->server;
  SessionManager& manager = impl_->sessions;

  // Wraps a handler that needs an existing session.
  auto with_session =
      [&manager](std::function<void(DiscoverySession&, const httplib::Request&,
                                    httplib::Response&)>
                     handler) {
        return [&manager, handler](const httplib::Request& req,
                                   httplib::Response& res) {
          std::shared_ptr<DiscoverySession> session =
              manager.Find(req.matches[1]);
          if (!session) {
            ReplyError(res, 404, "unknown session '" +
                                     std::string(req.matches[1]) + "'");
            return;
          }
          try {
            handler(*session, req, res);
          } catch (const std::exception& e) {
            ReplyError(res, 500, e.what());
          }
        };
      };

  server.Post("/sessions", [&manager](const httplib::Request& req,
                                      httplib::Response& res) {
    try {
      const SessionConfig config = ParseSessionConfig(req.body, {});
      std::shared_ptr<DiscoverySession> session = manager.Create(config);
      Reply(res, 201, session->StateJson());
    } catch (const std::exception& e) {
      ReplyError(res, 400, e.what());
    }
  });
  server.Get("/sessions", [&manager](const httplib::Request&,
                                     httplib::Response& res) {
    Reply(res, 200, Json{{"sessions", manager.Ids()}}.dump());
  });
  server.Get(R"(/sessions/([A-Za-z0-9_-]+))",
             with_session([](DiscoverySession& s, const httplib::Request&,
                             httplib::Response& res) {
               Reply(res, 200, s.StateJson());
             }));
  server.Get(R"(/sessions/([A-Za-z0-9_-]+)/report)",
             with_session([](DiscoverySession& s, const httplib::Request&,
                             httplib::Response& res) {
               Reply(res, 200, s.ReportJson());
             }));
  server.Get(R"(/sessions/([A-Za-z0-9_-]+)/question)",
             with_session([](DiscoverySession& s, const httplib::Request&,
                             httplib::Response& res) {
               const std::optional<Question> q = s.CurrentQuestion();
               if (!q) {
                 Reply(res, 200,
                       Json{{"session_id", s.id()}, {"done", true}}.dump());
                 return;
               }
               const Json state = Json::parse(s.StateJson());
               Reply(res, 200,
                     QuestionToJson(*q, state.at("budget").get<std::size_t>()));
             }));
  server.Post(
      R"(/sessions/([A-Za-z0-9_-]+)/answer)",
      with_session([](DiscoverySession& s, const httplib::Request& req,
                      httplib::Response& res) {
        std::size_t step = 0;
        std::string label;
        try {
          const Json body = Json::parse(req.body);
          if (body.contains("session_id") &&
              body.at("session_id").get<std::string>() != s.id()) {
            ReplyError(res, 400, "session_id does not match the URL");
            return;
          }
          step = body.at("step").get<std::size_t>();
          label = body.at("label").get<std::string>();
        } catch (const Json::exception& e) {
          ReplyError(res, 400, std::string("malformed answer: ") + e.what());
          return;
        }
        const AnswerOutcome outcome = s.Answer(step, label);
        switch (outcome.status) {
          case AnswerStatus::kAccepted:
            Reply(res, 200,
                  Json{{"accepted", true},
                       {"steps", outcome.steps},
                       {"phase", SessionPhaseName(s.phase())}}
                      .dump());
            return;
          case AnswerStatus::kStale:
            ReplyError(res, 409,
                       "step " + std::to_string(step) + " is not pending");
            return;
          case AnswerStatus::kMalformed:
            ReplyError(res, 400, "label '" + label + "' is not a known class");
            return;
        }
      }));
}

Service::~Service() { Stop(); }

bool Service::Listen(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}

int Service::BindAnyPort(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool Service::ListenAfterBind() { return impl_->server.listen_after_bind(); }

void Service::Stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace uud
