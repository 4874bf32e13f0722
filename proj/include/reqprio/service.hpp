#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include <json.hpp>

namespace reqprio {

struct ServiceConfig {
  /// Where .session snapshots are persisted; no persistence when empty.
  std::optional<std::filesystem::path> data_dir;
  std::size_t default_budget = 100;
  std::size_t default_solution_cap = 50;
  /// Per-solve wall-clock limit; results past it are flagged non-exhausted.
  std::chrono::milliseconds solve_time_budget{30000};
  /// How long a mutating request waits for its solve before answering with
  /// the transient SOLVING status.
  std::chrono::milliseconds response_wait{2000};
};

/// HTTP facade over elicitation sessions.
///
/// Routes:
///   POST /sessions                    create from {"project": ..., "options": ...}
///   GET  /sessions/{id}               public state
///   POST /sessions/{id}/responses     {"responses": [{"pair": [a, b], "verdict": ...}]}
///   GET  /sessions/{id}/ranking       final ranking of a terminal session
///   GET  /healthz
///
/// The handle_* members are the transport-independent core; the HTTP server
/// only routes to them. One mutation per session runs at a time; a request
/// arriving while a session is solving gets 429 with Retry-After.
class Service {
 public:
  struct Reply {
    int status = 200;
    nlohmann::ordered_json body;
    /// Seconds; set on 429.
    std::optional<int> retry_after;
  };

  explicit Service(ServiceConfig config = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Reply handle_create(const std::string& body);
  Reply handle_get_state(const std::string& id);
  Reply handle_submit(const std::string& id, const std::string& body);
  Reply handle_get_ranking(const std::string& id);
  Reply handle_health() const;

  /// Binds and serves until stop(). Returns false if binding failed.
  bool listen(const std::string& host, int port);
  /// Binds to an ephemeral port and returns it (or -1), then serve with
  /// listen_after_bind() on some thread.
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  /// Blocks until the server accepts connections.
  void wait_until_ready() const;

  std::size_t session_count() const;

 private:
  struct Entry;

  std::shared_ptr<Entry> find(const std::string& id) const;
  std::string new_id();
  void start_step(const std::shared_ptr<Entry>& entry);
  Reply wait_and_report(const std::shared_ptr<Entry>& entry, int ok_status);
  void persist(const Entry& entry) const;
  void load_existing();
  void install_routes();

  ServiceConfig config_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t id_state_;

  struct Http;
  std::unique_ptr<Http> http_;
};

}  // namespace reqprio
