#include <cerrno>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "kakari/error.hpp"
#include "kakari/session.hpp"

namespace kakari {

using ojson = nlohmann::ordered_json;

void StreamSink::write_line(std::string_view line) {
  out_ << line << '\n';
  if (!out_) throw IoError("log stream write failed");
}

FileSink::FileSink(const std::string& path) : path_(path), file_(std::fopen(path.c_str(), "ab")) {
  if (!file_) throw IoError("cannot open log " + path + ": " + std::strerror(errno));
}

FileSink::~FileSink() {
  if (file_) std::fclose(file_);
}

void FileSink::write_line(std::string_view line) {
  if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fputc('\n', file_) == EOF ||
      std::fflush(file_) != 0) {
    throw IoError("write to " + path_ + " failed");
  }
}

namespace {

ojson config_json(const EngineConfig& c) {
  ojson j;
  j["icon_speed"] = c.icon_speed;
  j["drift_speed"] = c.drift_speed;
  j["animation_ms"] = c.animation_ms;
  j["commit_mode"] = std::string(to_string(c.commit_mode));
  return j;
}

EngineConfig config_from(const ojson& j) {
  EngineConfig c;
  c.icon_speed = j.at("icon_speed").get<double>();
  c.drift_speed = j.at("drift_speed").get<double>();
  c.animation_ms = j.at("animation_ms").get<double>();
  c.commit_mode = commit_mode_from_string(j.at("commit_mode").get<std::string>());
  return c;
}

ojson event_json(const InputEvent& e) {
  ojson j;
  j["t"] = e.t_ms;
  if (e.kind == InputEvent::Kind::Jump) {
    j["type"] = "jump";
  } else {
    j["type"] = "dir";
    j["dir"] = std::string(to_string(e.direction));
  }
  if (e.received_ms) j["recv"] = *e.received_ms;
  return j;
}

InputEvent event_from(const ojson& j) {
  InputEvent e;
  e.t_ms = j.at("t").get<double>();
  const auto type = j.at("type").get<std::string>();
  if (type == "jump") {
    e.kind = InputEvent::Kind::Jump;
  } else if (type == "dir") {
    e.kind = InputEvent::Kind::Direction;
    e.direction = direction_from_string(j.at("dir").get<std::string>());
  } else {
    throw ParseError("unknown event type '" + type + "'");
  }
  if (j.contains("recv")) e.received_ms = j.at("recv").get<double>();
  return e;
}

}  // namespace

std::string session_header_line(const SessionLog& log) {
  ojson j;
  j["record"] = "session";
  j["schema"] = log.schema;
  j["subject_id"] = log.subject_id;
  j["seed"] = log.seed;
  j["agent"] = log.agent;
  j["practice"] = log.practice;
  j["config"] = config_json(log.config);
  ojson plan = ojson::array();
  for (const auto& e : log.plan) plan.push_back({{"id", e.sentence_id}, {"block", std::string(to_string(e.block))}});
  j["plan"] = std::move(plan);
  return j.dump();
}

std::string trial_line(const TrialLog& t) {
  ojson j;
  j["record"] = "trial";
  j["order"] = t.presentation_order;
  j["sentence_id"] = t.sentence_id;
  j["category"] = std::string(to_string(t.category));
  j["block"] = std::string(to_string(t.block));
  j["phrases"] = t.phrases;
  j["morae"] = t.morae;
  j["chars"] = t.chars;
  j["started_at"] = t.started_at;
  j["done_at"] = t.done_at;
  j["ended_at"] = t.ended_at;
  ojson actions = ojson::array();
  for (const auto& a : t.actions) {
    ojson aj;
    aj["kind"] = std::string(to_string(a.kind));
    if (is_judged(a.kind)) aj["judgment"] = a.kind == ActionKind::Shift ? "SHIFT" : "REDUCE";
    if (a.s) aj["s"] = *a.s;
    aj["q"] = a.q;
    aj["at"] = a.committed_at;
    if (a.response_ms) aj["response_ms"] = *a.response_ms;
    actions.push_back(std::move(aj));
  }
  j["actions"] = std::move(actions);
  j["alternations"] = t.direction_alternations;
  j["verdict"] = std::string(to_string(t.verdict));
  ojson arcs = ojson::array();
  for (const auto& a : t.arcs) arcs.push_back(ojson::array({a.dependent, a.head}));
  j["arcs"] = std::move(arcs);
  ojson events = ojson::array();
  for (const auto& e : t.events) events.push_back(event_json(e));
  j["events"] = std::move(events);
  return j.dump();
}

std::string session_footer_line(const SessionLog& log) {
  ojson j;
  j["record"] = "end";
  j["status"] = std::string(to_string(log.status));
  if (log.ended_at) j["ended_at"] = *log.ended_at;
  j["trials"] = log.trials.size();
  return j.dump();
}

void persist(const SessionLog& log, LogSink& sink) {
  sink.write_line(session_header_line(log));
  for (const auto& t : log.trials) sink.write_line(trial_line(t));
  if (log.status != SessionStatus::InProgress) sink.write_line(session_footer_line(log));
}

std::string serialize_session_log(const SessionLog& log) {
  std::ostringstream out;
  StreamSink sink(out);
  persist(log, sink);
  return out.str();
}

namespace {

TrialLog trial_from(const ojson& j) {
  TrialLog t;
  t.presentation_order = j.at("order").get<int>();
  t.sentence_id = j.at("sentence_id").get<std::string>();
  t.category = sentence_type_from_string(j.at("category").get<std::string>());
  t.block = block_from_string(j.at("block").get<std::string>());
  t.phrases = j.at("phrases").get<int>();
  t.morae = j.at("morae").get<int>();
  t.chars = j.at("chars").get<int>();
  t.started_at = j.at("started_at").get<double>();
  t.done_at = j.at("done_at").get<double>();
  t.ended_at = j.at("ended_at").get<double>();
  for (const auto& aj : j.at("actions")) {
    ActionLog a;
    a.kind = action_kind_from_string(aj.at("kind").get<std::string>());
    if (aj.contains("s")) a.s = aj.at("s").get<PhraseIndex>();
    a.q = aj.at("q").get<PhraseIndex>();
    a.committed_at = aj.at("at").get<double>();
    if (aj.contains("response_ms")) a.response_ms = aj.at("response_ms").get<double>();
    t.actions.push_back(a);
  }
  t.direction_alternations = j.at("alternations").get<int>();
  t.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  for (const auto& a : j.at("arcs")) t.arcs.push_back({a.at(0).get<PhraseIndex>(), a.at(1).get<PhraseIndex>()});
  for (const auto& e : j.at("events")) t.events.push_back(event_from(e));
  return t;
}

}  // namespace

SessionLog parse_session_log(std::istream& in, const std::string& source) {
  SessionLog log;
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    try {
      const ojson j = ojson::parse(line);
      const auto record = j.at("record").get<std::string>();
      if (!header) {
        if (record != "session") throw ParseError("first record must be the session header");
        log.schema = j.at("schema").get<int>();
        if (log.schema != kLogSchemaVersion)
          throw ParseError("unsupported log schema " + std::to_string(log.schema));
        log.subject_id = j.at("subject_id").get<std::string>();
        log.seed = j.at("seed").get<std::uint64_t>();
        log.agent = j.at("agent").get<std::string>();
        log.practice = j.at("practice").get<bool>();
        log.config = config_from(j.at("config"));
        for (const auto& e : j.at("plan"))
          log.plan.push_back({e.at("id").get<std::string>(), block_from_string(e.at("block").get<std::string>())});
        header = true;
      } else if (record == "trial") {
        log.trials.push_back(trial_from(j));
      } else if (record == "end") {
        const auto status = j.at("status").get<std::string>();
        if (status == "complete") log.status = SessionStatus::Complete;
        else if (status == "aborted") log.status = SessionStatus::Aborted;
        else throw ParseError("unknown session status '" + status + "'");
        if (j.contains("ended_at")) log.ended_at = j.at("ended_at").get<double>();
      } else {
        throw ParseError("unknown record '" + record + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  if (!header) throw ParseError(source + ": no session header");
  return log;
}

SessionLog load_session_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open log " + path);
  return parse_session_log(in, path);
}

}  // namespace kakari

namespace kakari {

std::string input_event_json(const InputEvent& event) { return event_json(event).dump(); }

InputEvent parse_input_event_json(std::string_view text) {
  try {
    return event_from(ojson::parse(text));
  } catch (const ojson::exception& e) {
    throw ParseError(std::string("bad input event: ") + e.what());
  }
}

}  // namespace kakari
