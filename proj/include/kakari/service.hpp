#pragma once

// Session service: one engine per session, driven by versioned JSON wire
// messages. Transport-independent; server.hpp puts it behind HTTP and
// WebSocket.
//
// Engine time is the client's clock (milliseconds). The service keeps an
// estimate of the client clock per session (the largest t - server_now seen)
// and ticks the engine `tick_lag_ms` behind it, so that wall hits and
// animation ends are pushed without waiting for input. An input stamped
// earlier than time the engine already reached is moved up to that time and
// counted as clamped.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "kakari/session.hpp"

namespace kakari {

inline constexpr int kWireVersion = 1;

enum class SeedPolicy {
  Fixed,       // every session uses the configured seed unless the request names one
  Sequential,  // configured seed + number of sessions created so far
};
std::string_view to_string(SeedPolicy p);
SeedPolicy seed_policy_from_string(std::string_view s);

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path corpus = "data/corpus.jsonl";
  std::filesystem::path log_dir = "logs";
  std::filesystem::path static_dir;  // empty: no static assets
  EngineConfig engine;
  SeedPolicy seed_policy = SeedPolicy::Fixed;
  std::uint64_t seed = 1;
  double tick_lag_ms = 150;
  int threads = 2;

  // Reads a JSON object; absent keys keep their defaults.
  static ServiceConfig from_json(std::string_view text, const std::filesystem::path& base = {});
  static ServiceConfig load(const std::filesystem::path& path);
  // KAKARI_CONFIG names a config file (loaded first); KAKARI_PORT overrides the port.
  static ServiceConfig from_environment(std::optional<std::filesystem::path> explicit_path = std::nullopt);
  std::string to_json() const;

  // ConfigError on bad engine settings, port, or missing corpus/static dir.
  void validate() const;
};

struct CreateRequest {
  std::string subject_id;
  std::optional<std::uint64_t> seed;
  bool practice = false;
};

struct CreatedSession {
  std::string session_id;
  SessionPlan plan;
  EngineView view;
};

struct SessionState {
  std::string session_id;
  std::string subject_id;
  std::uint64_t seed = 0;
  bool started = false;
  Phase phase = Phase::Idle;
  SessionStatus status = SessionStatus::InProgress;
  int trials_logged = 0;
  int clamped_inputs = 0;
  EngineView view;
};

std::string view_json(const EngineView& view);
std::string state_json(const SessionState& state);
std::string plan_json(const SessionPlan& plan);

class SessionService {
 public:
  // Loads and validates the corpus; throws ConfigError if it has issues.
  explicit SessionService(ServiceConfig config);
  SessionService(ServiceConfig config, std::shared_ptr<const CorpusFile> corpus);
  ~SessionService();

  CreatedSession create_session(const CreateRequest& request);
  bool has_session(const std::string& id) const;

  // Handles one client text frame. Returns server frames in send order.
  // Unknown sessions throw NotFoundError; everything else becomes an error
  // frame and leaves the session untouched.
  std::vector<std::string> handle_message(const std::string& id, std::string_view text, double server_now_ms);

  // Pushes engine progress up to the estimated client time.
  std::vector<std::string> tick(const std::string& id, double server_now_ms);

  SessionState state(const std::string& id);

  // Session log file names in the log directory.
  std::vector<std::string> list_logs() const;
  std::string read_log(const std::string& name) const;

  const ServiceConfig& config() const { return config_; }
  const CorpusFile& corpus() const { return *corpus_; }

 private:
  struct Entry;
  std::shared_ptr<Entry> find(const std::string& id);
  std::shared_ptr<Entry> recover(const std::string& id);

  ServiceConfig config_;
  std::shared_ptr<const CorpusFile> corpus_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  int created_ = 0;
};

// Transport-independent HTTP routing for the REST endpoints and static files.
struct HttpReply {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

HttpReply route_http(SessionService& service, std::string_view method, std::string_view target,
                     std::string_view body);

// Returns the session id when `target` is a session stream path.
std::optional<std::string> stream_target(std::string_view target);

}  // namespace kakari
