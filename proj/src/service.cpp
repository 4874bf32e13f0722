#include "reqprio/service.hpp"

#include <condition_variable>
#include <iostream>
#include <mutex>
#include <random>
#include <thread>

#include <httplib.h>

#include "reqprio/elicitation.hpp"
#include "reqprio/io.hpp"
#include "reqprio/metrics.hpp"
#include "reqprio/solver.hpp"

namespace reqprio {

using nlohmann::json;
using nlohmann::ordered_json;

struct Service::Entry {
  explicit Entry(std::string id_, Session session_)
      : id(std::move(id_)), session(std::move(session_)) {}

  const std::string id;

  // Guards session, busy and last_error.
  std::mutex mutex;
  std::condition_variable solved;
  Session session;
  bool busy = false;
  std::string last_error;
  std::thread worker;

  // Public state as of the last mutation; readers never take `mutex`.
  mutable std::mutex snapshot_mutex;
  std::shared_ptr<const ordered_json> snapshot;

  std::shared_ptr<const ordered_json> read() const {
    std::lock_guard lock(snapshot_mutex);
    return snapshot;
  }
};

struct Service::Http {
  httplib::Server server;
};

namespace {

ordered_json pair_json(const IdPair& p) { return ordered_json::array({p.first(), p.second()}); }

std::string title_of(const Project& project, const std::string& id) {
  const auto* r = project.find(id);
  return r ? r->title : std::string{};
}

bool terminal(SessionStatus s) { return s != SessionStatus::kActive; }

// Must be called with the entry mutex held.
ordered_json state_json(const std::string& id, const Session& session, bool busy,
                        const std::string& error) {
  const auto& s = session.state();
  ordered_json out;
  out["id"] = id;
  out["status"] = busy ? "SOLVING" : std::string(to_string(s.status));
  out["iteration"] = s.iteration;
  out["eli_pair"] = s.eli_pair;
  out["max_eli_pair"] = s.options.max_eli_pair;
  out["budget_remaining"] = s.options.max_eli_pair - s.eli_pair;
  out["solution_cap"] = s.options.solve.solution_cap;
  if (s.last_result) {
    out["cost"] = rational_to_json(s.last_result->cost);
    out["solution_count"] = s.last_result->solutions.size();
    out["exhausted"] = s.last_result->exhausted;
    out["optimal"] = s.last_result->optimal;
  } else {
    out["cost"] = nullptr;
    out["solution_count"] = 0;
    out["exhausted"] = nullptr;
    out["optimal"] = nullptr;
  }
  out["pending"] = ordered_json::array();
  for (const auto& q : s.pending_queries) {
    out["pending"].push_back({{"pair", pair_json(q.pair)},
                              {"frequency", q.frequency},
                              {"titles", {title_of(s.project, q.pair.first()),
                                          title_of(s.project, q.pair.second())}}});
  }
  out["requirements"] = ordered_json::array();
  for (const auto& r : s.project.requirements) {
    out["requirements"].push_back({{"id", r.id}, {"title", r.title}, {"priority", r.priority_level}});
  }
  out["history"] = ordered_json::array();
  for (const auto& h : s.history) {
    out["history"].push_back({{"pair", pair_json(h.response.pair)},
                              {"verdict", std::string(to_string(h.response.verdict))},
                              {"iteration", h.iteration}});
  }
  out["warnings"] = s.warnings;
  if (!busy && terminal(s.status)) {
    out["final_ranking"] = session.final_ranking().order();
  } else {
    out["final_ranking"] = nullptr;
  }
  // Metrics of the current best ranking against the gold standard, if any.
  if (s.last_result && s.project.gold_standard) {
    const Ranking& best = s.last_result->solutions.front();
    out["metrics"] = {{"disagreement_gs", disagreement(*s.project.gold_standard, best)},
                      {"avg_distance_gs", average_distance(best, *s.project.gold_standard)}};
  } else {
    out["metrics"] = nullptr;
  }
  out["error"] = error.empty() ? ordered_json(nullptr) : ordered_json(error);
  return out;
}

Service::Reply error_reply(int status, const std::string& kind, const std::string& message) {
  return {status, {{"error", kind}, {"message", message}}, std::nullopt};
}

Service::Reply validation_reply(const ValidationError& e) {
  ordered_json issues = ordered_json::array();
  for (const auto& i : e.issues()) issues.push_back({{"location", i.location}, {"message", i.message}});
  return {422, {{"error", "validation"}, {"message", "project is invalid"}, {"issues", issues}},
          std::nullopt};
}

std::optional<json> parse_body(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error&) {
    return std::nullopt;
  }
}

std::optional<std::size_t> non_negative(const json& options, const char* key) {
  if (!options.contains(key)) return std::nullopt;
  const auto& v = options[key];
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ValidationError(std::string("/options/") + key, "expected a non-negative integer");
  }
  return static_cast<std::size_t>(v.get<std::int64_t>());
}

}  // namespace

Service::Service(ServiceConfig config)
    : config_(std::move(config)), id_state_(std::random_device{}()), http_(std::make_unique<Http>()) {
  id_state_ = (id_state_ << 32) ^ std::random_device{}();
  if (config_.data_dir) {
    std::filesystem::create_directories(*config_.data_dir);
    load_existing();
  }
  install_routes();
}

Service::~Service() {
  stop();
  std::unique_lock lock(sessions_mutex_);
  for (auto& [id, entry] : sessions_) {
    if (entry->worker.joinable()) entry->worker.join();
  }
}

std::shared_ptr<Service::Entry> Service::find(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::string Service::new_id() {
  std::unique_lock lock(sessions_mutex_);
  for (;;) {
    std::uint64_t x = (id_state_ += 0x9e3779b97f4a7c15ULL);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x ^= x >> 31;
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(x));
    std::string id(buf, 12);
    if (!sessions_.count(id)) return id;
  }
}

void Service::persist(const Entry& entry) const {
  if (!config_.data_dir) return;
  try {
    save_session_file(*config_.data_dir / (entry.id + ".session"), entry.session);
  } catch (const std::exception& e) {
    std::cerr << "reqprio: could not persist session " << entry.id << ": " << e.what() << "\n";
  }
}

void Service::load_existing() {
  for (const auto& file : std::filesystem::directory_iterator(*config_.data_dir)) {
    if (file.path().extension() != ".session") continue;
    try {
      auto entry = std::make_shared<Entry>(file.path().stem().string(),
                                           load_session_file(file.path()));
      entry->snapshot = std::make_shared<const ordered_json>(
          state_json(entry->id, entry->session, false, {}));
      sessions_.emplace(entry->id, std::move(entry));
    } catch (const std::exception& e) {
      std::cerr << "reqprio: skipping " << file.path() << ": " << e.what() << "\n";
    }
  }
}

// Caller holds entry->mutex and has set busy. The solve runs on a copy so
// readers keep seeing the previous snapshot meanwhile.
void Service::start_step(const std::shared_ptr<Entry>& entry) {
  if (entry->worker.joinable()) entry->worker.join();
  {
    std::lock_guard lock(entry->snapshot_mutex);
    entry->snapshot = std::make_shared<const ordered_json>(
        state_json(entry->id, entry->session, true, {}));
  }
  entry->worker = std::thread([this, entry, working = entry->session]() mutable {
    std::string error;
    try {
      working.step();
    } catch (const std::exception& e) {
      error = e.what();
    }
    {
      std::lock_guard lock(entry->mutex);
      if (error.empty()) entry->session = std::move(working);
      entry->last_error = error;
      entry->busy = false;
      auto snap = std::make_shared<const ordered_json>(
          state_json(entry->id, entry->session, false, error));
      {
        std::lock_guard snap_lock(entry->snapshot_mutex);
        entry->snapshot = std::move(snap);
      }
      persist(*entry);
    }
    entry->solved.notify_all();
  });
}

Service::Reply Service::wait_and_report(const std::shared_ptr<Entry>& entry, int ok_status) {
  std::unique_lock lock(entry->mutex);
  entry->solved.wait_for(lock, config_.response_wait, [&] { return !entry->busy; });
  if (entry->busy) return {202, *entry->read(), std::nullopt};
  if (!entry->last_error.empty()) {
    auto body = *entry->read();
    return {500, body, std::nullopt};
  }
  return {ok_status, *entry->read(), std::nullopt};
}

Service::Reply Service::handle_create(const std::string& body) {
  auto doc = parse_body(body);
  if (!doc || !doc->is_object()) return error_reply(400, "bad_request", "body must be a JSON object");
  for (const auto& [key, value] : doc->items()) {
    if (key != "project" && key != "options") {
      return error_reply(400, "bad_request", "unknown field '" + key + "'");
    }
  }
  if (!doc->contains("project")) return error_reply(400, "bad_request", "missing field 'project'");

  SessionOptions options;
  options.max_eli_pair = config_.default_budget;
  options.solve.solution_cap = config_.default_solution_cap;
  options.solve.time_budget = config_.solve_time_budget;
  std::optional<Session> session;
  try {
    Project project = project_from_json((*doc)["project"]);
    if (doc->contains("options")) {
      const auto& opts = (*doc)["options"];
      if (!opts.is_object()) throw ValidationError("/options", "expected an object");
      for (const auto& [key, value] : opts.items()) {
        if (key != "budget" && key != "solution_cap" && key != "time_budget_ms") {
          throw ValidationError("/options/" + key, "unknown field");
        }
      }
      if (auto v = non_negative(opts, "budget")) options.max_eli_pair = *v;
      if (auto v = non_negative(opts, "solution_cap")) {
        if (*v == 0) throw ValidationError("/options/solution_cap", "must be positive");
        options.solve.solution_cap = *v;
      }
      if (auto v = non_negative(opts, "time_budget_ms")) {
        if (*v == 0) throw ValidationError("/options/time_budget_ms", "must be positive");
        options.solve.time_budget = std::chrono::milliseconds(*v);
      }
    }
    if (project.requirements.size() > 64) {
      throw ValidationError("/project/requirements", "at most 64 requirements are supported");
    }
    session.emplace(std::move(project), options);
    if (auto cycle = find_hard_cycle(session->solver_instance())) {
      ordered_json body_out{{"error", "infeasible"},
                            {"message", InfeasibleError(*cycle).what()},
                            {"cycle", *cycle}};
      return {422, std::move(body_out), std::nullopt};
    }
  } catch (const UnsupportedVersionError& e) {
    return error_reply(400, "unsupported_version", e.what());
  } catch (const ValidationError& e) {
    return validation_reply(e);
  }

  auto entry = std::make_shared<Entry>(new_id(), std::move(*session));
  {
    std::lock_guard lock(entry->mutex);
    entry->busy = true;
    {
      std::unique_lock map_lock(sessions_mutex_);
      sessions_.emplace(entry->id, entry);
    }
    start_step(entry);
  }
  return wait_and_report(entry, 201);
}

Service::Reply Service::handle_get_state(const std::string& id) {
  auto entry = find(id);
  if (!entry) return error_reply(404, "not_found", "no session '" + id + "'");
  return {200, *entry->read(), std::nullopt};
}

Service::Reply Service::handle_get_ranking(const std::string& id) {
  auto entry = find(id);
  if (!entry) return error_reply(404, "not_found", "no session '" + id + "'");
  auto snap = entry->read();
  if ((*snap)["final_ranking"].is_null()) {
    return {409, {{"error", "not_terminal"},
                  {"message", "session has no final ranking yet"},
                  {"status", (*snap)["status"]}},
            std::nullopt};
  }
  return {200,
          {{"id", id},
           {"status", (*snap)["status"]},
           {"ranking", (*snap)["final_ranking"]},
           {"cost", (*snap)["cost"]},
           {"metrics", (*snap)["metrics"]}},
          std::nullopt};
}

Service::Reply Service::handle_submit(const std::string& id, const std::string& body) {
  auto entry = find(id);
  if (!entry) return error_reply(404, "not_found", "no session '" + id + "'");
  auto doc = parse_body(body);
  if (!doc || !doc->is_object() || !doc->contains("responses") || !(*doc)["responses"].is_array()) {
    return error_reply(400, "bad_request", "body must be {\"responses\": [...]}");
  }
  std::vector<AnalystResponse> responses;
  for (const auto& item : (*doc)["responses"]) {
    if (!item.is_object() || !item.contains("pair") || !item.contains("verdict") || item.size() != 2 ||
        !item["pair"].is_array() || item["pair"].size() != 2 || !item["pair"][0].is_string() ||
        !item["pair"][1].is_string() || !item["verdict"].is_string()) {
      return error_reply(400, "bad_request", "each response needs \"pair\" [a, b] and \"verdict\"");
    }
    auto verdict = parse_verdict(item["verdict"].get<std::string>());
    auto a = item["pair"][0].get<std::string>();
    auto b = item["pair"][1].get<std::string>();
    if (!verdict || a == b) return error_reply(400, "bad_request", "invalid pair or verdict");
    // Verdicts name the order of the pair as sent; normalize to canonical order.
    if (b < a && *verdict != Verdict::kUndecided) {
      verdict = *verdict == Verdict::kFirstPrecedes ? Verdict::kSecondPrecedes : Verdict::kFirstPrecedes;
    }
    responses.push_back({IdPair(a, b), *verdict});
  }

  std::unique_lock lock(entry->mutex);
  if (entry->busy) {
    return {429, {{"error", "busy"}, {"message", "session is solving; retry"}, {"retry", true}}, 1};
  }
  try {
    entry->session.submit_responses(responses);
  } catch (const StateError& e) {
    return error_reply(409, "conflict", e.what());
  } catch (const ValidationError& e) {
    return error_reply(422, "validation", e.what());
  }
  persist(*entry);
  const auto& s = entry->session;
  if (s.status() == SessionStatus::kActive && s.pending_queries().empty()) {
    entry->busy = true;
    start_step(entry);
    lock.unlock();
    return wait_and_report(entry, 200);
  }
  auto snap = std::make_shared<const ordered_json>(state_json(entry->id, s, false, entry->last_error));
  {
    std::lock_guard snap_lock(entry->snapshot_mutex);
    entry->snapshot = snap;
  }
  return {200, *snap, std::nullopt};
}

Service::Reply Service::handle_health() const {
  return {200, {{"status", "ok"}, {"sessions", session_count()}}, std::nullopt};
}

std::size_t Service::session_count() const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.size();
}

void Service::install_routes() {
  auto& server = http_->server;
  auto send = [](httplib::Response& res, const Reply& reply) {
    res.status = reply.status;
    if (reply.retry_after) res.set_header("Retry-After", std::to_string(*reply.retry_after));
    res.set_content(reply.body.dump(), "application/json");
  };
  server.Post("/sessions", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, handle_create(req.body));
  });
  server.Get(R"(/sessions/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, handle_get_state(req.matches[1]));
  });
  server.Post(R"(/sessions/([^/]+)/responses)",
              [this, send](const httplib::Request& req, httplib::Response& res) {
                send(res, handle_submit(req.matches[1], req.body));
              });
  server.Get(R"(/sessions/([^/]+)/ranking)",
             [this, send](const httplib::Request& req, httplib::Response& res) {
               send(res, handle_get_ranking(req.matches[1]));
             });
  server.Get("/healthz", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, handle_health());
  });
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(ordered_json{{"error", "internal"}, {"message", message}}.dump(), "application/json");
  });
}

bool Service::listen(const std::string& host, int port) { return http_->server.listen(host, port); }

int Service::bind_to_any_port(const std::string& host) { return http_->server.bind_to_any_port(host); }

bool Service::listen_after_bind() { return http_->server.listen_after_bind(); }

void Service::stop() {
  if (http_->server.is_running()) http_->server.stop();
}

void Service::wait_until_ready() const { http_->server.wait_until_ready(); }

}  // namespace reqprio
