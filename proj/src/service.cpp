#include "kakari/service.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "kakari/error.hpp"

namespace kakari {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string_view to_string(SeedPolicy p) { return p == SeedPolicy::Fixed ? "fixed" : "sequential"; }

SeedPolicy seed_policy_from_string(std::string_view s) {
  if (s == "fixed") return SeedPolicy::Fixed;
  if (s == "sequential") return SeedPolicy::Sequential;
  throw ConfigError("unknown seed policy '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Config

namespace {

ojson engine_json(const EngineConfig& c) {
  ojson j;
  j["icon_speed"] = c.icon_speed;
  j["drift_speed"] = c.drift_speed;
  j["animation_ms"] = c.animation_ms;
  j["commit_mode"] = std::string(to_string(c.commit_mode));
  return j;
}

EngineConfig engine_from(const ojson& j) {
  EngineConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "icon_speed") c.icon_speed = value.get<double>();
    else if (key == "drift_speed") c.drift_speed = value.get<double>();
    else if (key == "animation_ms") c.animation_ms = value.get<double>();
    else if (key == "commit_mode") c.commit_mode = commit_mode_from_string(value.get<std::string>());
    else throw ConfigError("unknown engine key '" + key + "'");
  }
  return c;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.empty() || path.is_absolute() || base.empty()) return path;
  return base / path;
}

}  // namespace

ServiceConfig ServiceConfig::from_json(std::string_view text, const fs::path& base) {
  ServiceConfig c;
  try {
    const ojson j = ojson::parse(text);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (key == "host") c.host = value.get<std::string>();
      else if (key == "port") c.port = value.get<int>();
      else if (key == "corpus") c.corpus = resolve(base, value.get<std::string>());
      else if (key == "log_dir") c.log_dir = resolve(base, value.get<std::string>());
      else if (key == "static_dir") c.static_dir = resolve(base, value.get<std::string>());
      else if (key == "engine") c.engine = engine_from(value);
      else if (key == "seed_policy") c.seed_policy = seed_policy_from_string(value.get<std::string>());
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "tick_lag_ms") c.tick_lag_ms = value.get<double>();
      else if (key == "threads") c.threads = value.get<int>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const ojson::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ServiceConfig ServiceConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return from_json(ss.str(), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ServiceConfig ServiceConfig::from_environment(std::optional<fs::path> explicit_path) {
  ServiceConfig c;
  if (!explicit_path) {
    if (const char* env = std::getenv("KAKARI_CONFIG"); env && *env) explicit_path = env;
  }
  if (explicit_path) c = load(*explicit_path);
  if (const char* env = std::getenv("KAKARI_PORT"); env && *env) {
    char* end = nullptr;
    const long port = std::strtol(env, &end, 10);
    if (*end != '\0') throw ConfigError(std::string("KAKARI_PORT is not a number: ") + env);
    c.port = static_cast<int>(port);
  }
  return c;
}

std::string ServiceConfig::to_json() const {
  ojson j;
  j["host"] = host;
  j["port"] = port;
  j["corpus"] = corpus.string();
  j["log_dir"] = log_dir.string();
  j["static_dir"] = static_dir.string();
  j["engine"] = engine_json(engine);
  j["seed_policy"] = std::string(to_string(seed_policy));
  j["seed"] = seed;
  j["tick_lag_ms"] = tick_lag_ms;
  j["threads"] = threads;
  return j.dump(2);
}

void ServiceConfig::validate() const {
  engine.validate();
  if (port < 0 || port > 65535) throw ConfigError("port out of range: " + std::to_string(port));
  if (tick_lag_ms < 0) throw ConfigError("tick_lag_ms must be non-negative");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (!fs::is_regular_file(corpus)) throw ConfigError("corpus not found: " + corpus.string());
  if (!static_dir.empty() && !fs::is_directory(static_dir))
    throw ConfigError("static_dir not found: " + static_dir.string());
}

// ---------------------------------------------------------------------------
// JSON views

namespace {

ojson view_object(const EngineView& v) {
  ojson j;
  j["sentence_id"] = v.sentence_id;
  j["phrases"] = v.phrases;
  j["stack"] = v.stack;
  j["queue"] = v.queue;
  ojson arcs = ojson::array();
  for (const auto& a : v.arcs) arcs.push_back(ojson::array({a.dependent, a.head}));
  j["arcs"] = std::move(arcs);
  j["icon"] = {{"position", v.icon.position},
               {"direction", std::string(to_string(v.icon.direction_held))},
               {"phase", std::string(to_string(v.icon.phase))}};
  j["verdict"] = v.verdict ? ojson(std::string(to_string(*v.verdict))) : ojson(nullptr);
  j["trial"] = v.trial_number;
  j["trials"] = v.trial_count;
  j["at"] = v.at;
  return j;
}

ojson plan_array(const SessionPlan& plan) {
  ojson a = ojson::array();
  for (const auto& e : plan.entries) a.push_back({{"id", e.sentence_id}, {"block", std::string(to_string(e.block))}});
  return a;
}

ojson action_object(const ActionLog& a) {
  ojson j;
  j["kind"] = std::string(to_string(a.kind));
  if (is_judged(a.kind))
    j["judgment"] = std::string(to_string(a.kind == ActionKind::Shift ? Judgment::Shift : Judgment::Reduce));
  j["s"] = a.s ? ojson(*a.s) : ojson(nullptr);
  j["q"] = a.q;
  j["at"] = a.committed_at;
  if (a.response_ms) j["response_ms"] = *a.response_ms;
  return j;
}

}  // namespace

std::string view_json(const EngineView& view) { return view_object(view).dump(); }
std::string plan_json(const SessionPlan& plan) { return plan_array(plan).dump(); }

std::string state_json(const SessionState& s) {
  ojson j;
  j["session_id"] = s.session_id;
  j["subject_id"] = s.subject_id;
  j["seed"] = s.seed;
  j["started"] = s.started;
  j["phase"] = std::string(to_string(s.phase));
  j["status"] = std::string(to_string(s.status));
  j["trials_logged"] = s.trials_logged;
  j["clamped_inputs"] = s.clamped_inputs;
  j["view"] = view_object(s.view);
  return j.dump();
}

// ---------------------------------------------------------------------------
// Service

struct SessionService::Entry {
  std::mutex mutex;
  std::string id;
  SessionPlan plan;
  std::string agent = "ui";
  std::unique_ptr<Session> session;
  bool started = false;
  double first_start = 0;
  double clock_shift = 0;              // engine time minus client time
  std::optional<double> clock_offset;  // engine time minus server time
  double client_last_t = -std::numeric_limits<double>::infinity();
  std::int64_t seq = 0;
  int clamped = 0;
  size_t trials_written = 0;
  bool footer_written = false;
  std::unique_ptr<FileSink> log;
  std::unique_ptr<FileSink> journal;
};

namespace {

std::string sanitize(const std::string& subject) {
  std::string out;
  for (char c : subject) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out.empty() ? "subject" : out;
}

std::string journal_header(const std::string& id, const SessionPlan& plan, const EngineConfig& config,
                           const std::string& agent) {
  ojson j;
  j["record"] = "journal";
  j["schema"] = kLogSchemaVersion;
  j["session_id"] = id;
  j["subject_id"] = plan.subject_id;
  j["seed"] = plan.seed;
  j["practice"] = plan.practice;
  j["agent"] = agent;
  j["config"] = engine_json(config);
  j["plan"] = plan_array(plan);
  return j.dump();
}

}  // namespace

SessionService::SessionService(ServiceConfig config) : config_(std::move(config)) {
  config_.validate();
  auto corpus = std::make_shared<CorpusFile>(load_corpus(config_.corpus));
  const auto report = validate_corpus(*corpus);
  if (!report.ok()) {
    const auto& first = report.issues.front();
    throw ConfigError("corpus " + config_.corpus.string() + " failed validation (" +
                      std::to_string(report.issues.size()) + " issues; first: " + first.record_id + " " + first.check +
                      ": " + first.message + ")");
  }
  corpus_ = std::move(corpus);
  std::error_code ec;
  fs::create_directories(config_.log_dir, ec);
  if (ec) throw IoError("cannot create log dir " + config_.log_dir.string() + ": " + ec.message());
}

SessionService::SessionService(ServiceConfig config, std::shared_ptr<const CorpusFile> corpus)
    : config_(std::move(config)), corpus_(std::move(corpus)) {
  config_.engine.validate();
  std::error_code ec;
  fs::create_directories(config_.log_dir, ec);
  if (ec) throw IoError("cannot create log dir " + config_.log_dir.string() + ": " + ec.message());
}

SessionService::~SessionService() = default;

CreatedSession SessionService::create_session(const CreateRequest& request) {
  if (request.subject_id.empty()) throw ParseError("subject_id must not be empty");
  auto entry = std::make_shared<Entry>();
  std::lock_guard lock(mutex_);
  std::uint64_t seed = config_.seed;
  if (request.seed) seed = *request.seed;
  else if (config_.seed_policy == SeedPolicy::Sequential) seed = config_.seed + static_cast<std::uint64_t>(created_);
  entry->plan = request.practice ? build_practice_plan(*corpus_, request.subject_id, seed)
                                 : build_plan(*corpus_, request.subject_id, seed);

  std::string id;
  for (int n = created_ + 1;; ++n) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "-%04d", n);
    id = sanitize(request.subject_id) + buf;
    if (!sessions_.count(id) && !fs::exists(config_.log_dir / (id + ".jsonl")) &&
        !fs::exists(config_.log_dir / (id + ".journal")))
      break;
  }
  ++created_;
  entry->id = id;
  entry->session = std::make_unique<Session>(corpus_, entry->plan, config_.engine, entry->agent);
  entry->log = std::make_unique<FileSink>((config_.log_dir / (id + ".jsonl")).string());
  entry->log->write_line(session_header_line(entry->session->log()));
  entry->journal = std::make_unique<FileSink>((config_.log_dir / (id + ".journal")).string());
  entry->journal->write_line(journal_header(id, entry->plan, config_.engine, entry->agent));
  sessions_[id] = entry;
  return {id, entry->plan, entry->session->view()};
}

bool SessionService::has_session(const std::string& id) const {
  std::lock_guard lock(mutex_);
  return sessions_.count(id) > 0;
}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& id) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  }
  return recover(id);
}

// Rebuilds a session that is not in memory from its journal file.
std::shared_ptr<SessionService::Entry> SessionService::recover(const std::string& id) {
  if (id.find('/') != std::string::npos || id.find("..") != std::string::npos)
    throw NotFoundError("unknown session '" + id + "'");
  const fs::path journal_path = config_.log_dir / (id + ".journal");
  std::ifstream in(journal_path);
  if (!in) throw NotFoundError("unknown session '" + id + "'");

  auto entry = std::make_shared<Entry>();
  entry->id = id;
  EngineConfig engine;
  std::optional<double> start;
  std::vector<InputEvent> events;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const ojson j = ojson::parse(line);
      const auto record = j.at("record").get<std::string>();
      if (line_no == 1) {
        if (record != "journal") throw ParseError("not a session journal");
        entry->plan.subject_id = j.at("subject_id").get<std::string>();
        entry->plan.seed = j.at("seed").get<std::uint64_t>();
        entry->plan.practice = j.at("practice").get<bool>();
        entry->agent = j.at("agent").get<std::string>();
        engine = engine_from(j.at("config"));
        for (const auto& e : j.at("plan"))
          entry->plan.entries.push_back({e.at("id").get<std::string>(), block_from_string(e.at("block").get<std::string>())});
      } else if (record == "start") {
        start = j.at("t").get<double>();
      } else if (record == "input") {
        events.push_back(parse_input_event_json(line));
      } else {
        throw ParseError("unknown journal record '" + record + "'");
      }
    } catch (const ojson::exception& e) {
      throw ParseError(journal_path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(journal_path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (start) {
    entry->session = std::make_unique<Session>(
        replay_inputs(corpus_, entry->plan, engine, entry->agent, *start, events));
    entry->started = true;
    entry->first_start = *start;
    entry->client_last_t = events.empty() ? *start : events.back().t_ms;
  } else {
    entry->session = std::make_unique<Session>(corpus_, entry->plan, engine, entry->agent);
  }

  const fs::path log_path = config_.log_dir / (id + ".jsonl");
  if (fs::exists(log_path)) {
    const SessionLog written = load_session_log(log_path.string());
    entry->trials_written = written.trials.size();
    entry->footer_written = written.status != SessionStatus::InProgress;
  }
  entry->log = std::make_unique<FileSink>(log_path.string());
  if (!fs::exists(log_path) || fs::file_size(log_path) == 0)
    entry->log->write_line(session_header_line(entry->session->log()));
  entry->journal = std::make_unique<FileSink>(journal_path.string());

  std::lock_guard lock(mutex_);
  auto [it, inserted] = sessions_.emplace(id, entry);
  return it->second;
}

namespace {

struct Framer {
  std::int64_t& seq;
  std::optional<std::int64_t> ack;
  std::vector<std::string> frames;

  ojson make(const char* type) {
    ojson j;
    j["v"] = kWireVersion;
    j["type"] = type;
    j["seq"] = ++seq;
    if (ack) j["ack"] = *ack;
    return j;
  }
  void push(const ojson& j) { frames.push_back(j.dump()); }

  void error(const std::string& code, const std::string& message) {
    ojson j = make("error");
    j["code"] = code;
    j["message"] = message;
    push(j);
  }

  void view(const Session& s, const std::string& id, std::optional<EngineConfig> engine = std::nullopt) {
    ojson j = make("view");
    j["session_id"] = id;
    j["view"] = view_object(s.view());
    if (engine) j["engine"] = engine_json(*engine);
    push(j);
  }

  // Returns true when something the client should redraw happened.
  bool outputs(const std::vector<EngineOutput>& out, const Session& s) {
    bool changed = false;
    for (const auto& o : out) {
      switch (o.kind) {
        case OutputKind::ActionCommitted: {
          ojson j = make("action_committed");
          j["at"] = o.at;
          j["action"] = action_object(*o.action);
          push(j);
          changed = true;
          break;
        }
        case OutputKind::Animating: {
          ojson j = make("animating");
          j["at"] = o.at;
          j["phase"] = std::string(to_string(o.phase));
          j["until"] = o.until ? ojson(*o.until) : ojson(nullptr);
          push(j);
          changed = true;
          break;
        }
        case OutputKind::Verdict: {
          ojson j = make("verdict");
          j["at"] = o.at;
          j["verdict"] = std::string(to_string(*o.verdict));
          j["trial"] = s.log().trials.size() + 1;
          push(j);
          changed = true;
          break;
        }
        case OutputKind::SessionDone: {
          ojson j = make("session_done");
          j["at"] = o.at;
          j["status"] = std::string(to_string(s.log().status));
          j["trials"] = s.log().trials.size();
          push(j);
          changed = true;
          break;
        }
        case OutputKind::TrialStarted:
        case OutputKind::AwaitJudgment:
          changed = true;
          break;
        case OutputKind::InputIgnored:
          break;
      }
    }
    return changed;
  }
};

void flush_log(const Session& s, std::size_t& written, bool& footer, LogSink& sink) {
  const auto& trials = s.log().trials;
  for (; written < trials.size(); ++written) sink.write_line(trial_line(trials[written]));
  if (s.finished() && !footer) {
    sink.write_line(session_footer_line(s.log()));
    footer = true;
  }
}

double required_number(const ojson& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("missing '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) throw ParseError(std::string("'") + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(std::string("'") + key + "' must be finite");
  return d;
}

}  // namespace

std::vector<std::string> SessionService::handle_message(const std::string& id, std::string_view text,
                                                         double server_now) {
  auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  Framer f{entry->seq, std::nullopt, {}};

  ojson msg;
  try {
    msg = ojson::parse(text);
  } catch (const ojson::exception&) {
    f.error("parse", "message is not valid JSON");
    return f.frames;
  }
  try {
    if (!msg.is_object()) throw ParseError("message must be a JSON object");
    if (msg.contains("seq")) {
      if (!msg["seq"].is_number_integer()) throw ParseError("'seq' must be an integer");
      f.ack = msg["seq"].get<std::int64_t>();
    }
    if (!msg.contains("v") || !msg["v"].is_number_integer() || msg["v"].get<int>() != kWireVersion)
      throw ParseError("unsupported or missing wire version (expected v=" + std::to_string(kWireVersion) + ")");
    if (!msg.contains("type") || !msg["type"].is_string()) throw ParseError("missing 'type'");
    const auto type = msg["type"].get<std::string>();
    Session& s = *entry->session;

    // Client times are mapped onto engine time by a per-session shift. A
    // hello or resume stamped earlier than anything seen (a reloaded page
    // restarting its clock) re-bases the shift instead of failing.
    auto rebase = [&](double t) {
      const double floor = std::max(entry->client_last_t, entry->started ? s.last_time() : entry->client_last_t);
      if (std::isfinite(floor) && t + entry->clock_shift < floor) {
        entry->clock_shift = floor - t;
        entry->clock_offset.reset();
      }
    };
    // Returns the engine time for a client stamp.
    auto observe_clock = [&](double t) {
      const double te = t + entry->clock_shift;
      if (te < entry->client_last_t)
        throw ClockError("client timestamp " + std::to_string(t) + " runs backwards");
      const double offset = te - server_now;
      if (!entry->clock_offset || offset > *entry->clock_offset) entry->clock_offset = offset;
      entry->client_last_t = te;
      return te;
    };

    if (type == "hello") {
      const double t = required_number(msg, "t");
      rebase(t);
      const double te = observe_clock(t);
      if (!entry->started) {
        f.outputs(s.start_trial(te), s);
        entry->started = true;
        entry->first_start = te;
        entry->journal->write_line(ojson{{"record", "start"}, {"t", te}}.dump());
      }
      f.view(s, id, config_.engine);
    } else if (type == "input_event" || type == "jump") {
      if (!entry->started) throw InvalidStateError("send hello before input");
      if (s.finished()) throw InvalidStateError("session is finished");
      const double t = required_number(msg, "t");
      InputEvent ev;
      if (type == "jump") {
        ev.kind = InputEvent::Kind::Jump;
      } else {
        if (!msg.contains("dir") || !msg["dir"].is_string()) throw ParseError("missing 'dir'");
        ev.direction = direction_from_string(msg["dir"].get<std::string>());
      }
      const double te = observe_clock(t);
      ev.t_ms = te;
      if (te < s.last_time()) {
        ev.t_ms = s.last_time();
        ++entry->clamped;
      }
      ev.received_ms = server_now;
      const auto out = s.feed_input(ev);
      ojson line = ojson::parse(input_event_json(ev));
      ojson rec;
      rec["record"] = "input";
      for (auto& [k, v] : line.items()) rec[k] = v;
      entry->journal->write_line(rec.dump());
      f.outputs(out, s);
      f.view(s, id);
    } else if (type == "resume") {
      if (msg.contains("t")) {
        const double t = required_number(msg, "t");
        rebase(t);
        observe_clock(t);
      }
      if (entry->started) {
        // rebuild from the journal; the replayed engine replaces the live one
        auto rebuilt = std::make_unique<Session>(
            replay_inputs(corpus_, entry->plan, s.log().config, entry->agent, entry->first_start, s.journal()));
        rebuilt->tick(s.last_time());
        if (!(rebuilt->view() == s.view()) || !(rebuilt->log() == s.log()))
          throw InvalidStateError("journal replay diverged from the live session");
        entry->session = std::move(rebuilt);
      }
      f.view(*entry->session, id, config_.engine);
    } else {
      throw ParseError("unknown message type '" + type + "'");
    }
  } catch (const Error& e) {
    f.error(e.category(), e.what());
  } catch (const ojson::exception& e) {
    f.error("parse", e.what());
  }
  flush_log(*entry->session, entry->trials_written, entry->footer_written, *entry->log);
  return f.frames;
}

std::vector<std::string> SessionService::tick(const std::string& id, double server_now) {
  auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  Session& s = *entry->session;
  if (!entry->started || s.finished() || !entry->clock_offset) return {};
  const double target = server_now + *entry->clock_offset - config_.tick_lag_ms;
  if (target <= s.last_time()) return {};
  const auto deadline = s.next_deadline();
  if (!deadline || *deadline > target) return {};
  Framer f{entry->seq, std::nullopt, {}};
  std::vector<EngineOutput> out;
  try {
    out = s.tick(target);
  } catch (const Error& e) {
    f.error(e.category(), e.what());
    return f.frames;
  }
  if (f.outputs(out, s)) f.view(s, id);
  flush_log(s, entry->trials_written, entry->footer_written, *entry->log);
  return f.frames;
}

SessionState SessionService::state(const std::string& id) {
  auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  const Session& s = *entry->session;
  SessionState st;
  st.session_id = id;
  st.subject_id = entry->plan.subject_id;
  st.seed = entry->plan.seed;
  st.started = entry->started;
  st.phase = s.phase();
  st.status = s.log().status;
  st.trials_logged = static_cast<int>(s.log().trials.size());
  st.clamped_inputs = entry->clamped;
  st.view = s.view();
  return st;
}

std::vector<std::string> SessionService::list_logs() const {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(config_.log_dir, ec))
    if (e.is_regular_file() && e.path().extension() == ".jsonl") names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

std::string SessionService::read_log(const std::string& name) const {
  if (name.empty() || name.find('/') != std::string::npos || name.find('\\') != std::string::npos ||
      name.find("..") != std::string::npos || fs::path(name).extension() != ".jsonl")
    throw NotFoundError("no such log '" + name + "'");
  std::ifstream in(config_.log_dir / name, std::ios::binary);
  if (!in) throw NotFoundError("no such log '" + name + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// HTTP routing

namespace {

int status_for(const Error& e) {
  const std::string c(e.category());
  if (c == "not-found") return 404;
  if (c == "parse" || c == "config" || c == "insufficient-corpus") return 400;
  if (c == "invalid-state" || c == "clock") return 409;
  return 500;
}

HttpReply json_reply(int status, const ojson& j) { return {status, "application/json", j.dump()}; }

HttpReply error_reply(int status, const std::string& category, const std::string& message) {
  return json_reply(status, {{"error", {{"category", category}, {"message", message}}}});
}

std::string_view mime_type(const fs::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript; charset=utf-8";
  if (ext == ".css") return "text/css; charset=utf-8";
  if (ext == ".json" || ext == ".map") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".wasm") return "application/wasm";
  if (ext == ".txt") return "text/plain; charset=utf-8";
  return "application/octet-stream";
}

HttpReply serve_static(const fs::path& root, std::string_view path) {
  if (root.empty()) return error_reply(404, "not-found", "no static assets configured");
  std::string rel(path.substr(1));
  if (rel.empty() || rel.back() == '/') rel += "index.html";
  for (const auto& part : fs::path(rel))
    if (part == "..") return error_reply(404, "not-found", "not found");
  const fs::path file = root / rel;
  std::ifstream in(file, std::ios::binary);
  if (!in || !fs::is_regular_file(file)) return error_reply(404, "not-found", "not found: " + std::string(path));
  std::stringstream ss;
  ss << in.rdbuf();
  return {200, std::string(mime_type(file)), ss.str()};
}

}  // namespace

std::optional<std::string> stream_target(std::string_view target) {
  target = target.substr(0, target.find('?'));
  constexpr std::string_view prefix = "/api/sessions/", suffix = "/stream";
  if (target.size() <= prefix.size() + suffix.size() || target.substr(0, prefix.size()) != prefix ||
      target.substr(target.size() - suffix.size()) != suffix)
    return std::nullopt;
  std::string id(target.substr(prefix.size(), target.size() - prefix.size() - suffix.size()));
  if (id.find('/') != std::string::npos) return std::nullopt;
  return id;
}

HttpReply route_http(SessionService& service, std::string_view method, std::string_view target,
                     std::string_view body) {
  const std::string_view path = target.substr(0, target.find('?'));
  try {
    if (path == "/api/sessions") {
      if (method != "POST") return error_reply(405, "method", "use POST");
      ojson req = body.empty() ? ojson::object() : ojson::parse(body);
      if (!req.is_object()) throw ParseError("body must be a JSON object");
      CreateRequest cr;
      if (!req.contains("subject_id") || !req["subject_id"].is_string()) throw ParseError("missing 'subject_id'");
      cr.subject_id = req["subject_id"].get<std::string>();
      if (req.contains("seed") && !req["seed"].is_null()) {
        if (!req["seed"].is_number_unsigned()) throw ParseError("'seed' must be a non-negative integer");
        cr.seed = req["seed"].get<std::uint64_t>();
      }
      if (req.contains("practice")) cr.practice = req["practice"].get<bool>();
      const auto created = service.create_session(cr);
      ojson j;
      j["session_id"] = created.session_id;
      j["subject_id"] = created.plan.subject_id;
      j["seed"] = created.plan.seed;
      j["plan"] = plan_array(created.plan);
      j["engine"] = engine_json(service.config().engine);
      j["view"] = view_object(created.view);
      j["stream"] = "/api/sessions/" + created.session_id + "/stream";
      return json_reply(201, j);
    }
    constexpr std::string_view sessions = "/api/sessions/";
    if (path.substr(0, sessions.size()) == sessions) {
      if (method != "GET") return error_reply(405, "method", "use GET");
      const std::string id(path.substr(sessions.size()));
      if (id.find('/') != std::string::npos) return error_reply(404, "not-found", "not found");
      return {200, "application/json", state_json(service.state(id))};
    }
    if (path == "/api/logs") {
      if (method != "GET") return error_reply(405, "method", "use GET");
      return json_reply(200, {{"logs", service.list_logs()}});
    }
    constexpr std::string_view logs = "/api/logs/";
    if (path.substr(0, logs.size()) == logs) {
      if (method != "GET") return error_reply(405, "method", "use GET");
      return {200, "application/x-ndjson", service.read_log(std::string(path.substr(logs.size())))};
    }
    if (path.substr(0, 5) == "/api/") return error_reply(404, "not-found", "no route " + std::string(path));
    if (method != "GET" && method != "HEAD") return error_reply(405, "method", "use GET");
    return serve_static(service.config().static_dir, path);
  } catch (const Error& e) {
    return error_reply(status_for(e), std::string(e.category()), e.what());
  } catch (const ojson::exception& e) {
    return error_reply(400, "parse", e.what());
  }
}

}  // namespace kakari
