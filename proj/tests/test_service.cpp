#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <json.hpp>

#include "kakari/analysis.hpp"
#include "kakari/error.hpp"
#include "kakari/server.hpp"
#include "kakari/service.hpp"

using namespace kakari;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpusPath = fs::path(KAKARI_DATA_DIR) / "corpus.jsonl";

std::shared_ptr<const CorpusFile> fixture() {
  static auto corpus = std::make_shared<const CorpusFile>(load_corpus(kCorpusPath));
  return corpus;
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("kakari-svc-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ServiceConfig test_config(const fs::path& logs, CommitMode mode = CommitMode::Analog) {
  ServiceConfig c;
  c.corpus = kCorpusPath;
  c.log_dir = logs;
  c.tick_lag_ms = 0;
  c.engine.commit_mode = mode;
  c.seed = 7;
  return c;
}

// Judgment a perfect player makes for the view's stack top and queue front.
Judgment oracle_for(const json& view) {
  const auto& rec = fixture()->at(view["sentence_id"].get<std::string>());
  const int s = view["stack"].back().get<int>();
  const int q = view["queue"].front().get<int>();
  return rec.gold.head_of(s) == q ? Judgment::Reduce : Judgment::Shift;
}

// In-process client; client time equals the service's clock.
struct Client {
  SessionService& svc;
  std::string id;
  double now = 1000;
  std::int64_t seq = 0;
  json view;
  std::vector<json> received;

  std::vector<json> take(const std::vector<std::string>& frames) {
    std::vector<json> out;
    for (const auto& f : frames) {
      out.push_back(json::parse(f));
      if (out.back()["type"] == "view") view = out.back()["view"];
      received.push_back(out.back());
    }
    return out;
  }
  std::vector<json> send(json msg) {
    msg["v"] = 1;
    msg["seq"] = ++seq;
    if (!msg.contains("t")) msg["t"] = now;
    return take(svc.handle_message(id, msg.dump(), now));
  }
  std::vector<json> raw(const std::string& text) { return take(svc.handle_message(id, text, now)); }
  std::vector<json> tick_to(double t) {
    now = t;
    return take(svc.tick(id, now));
  }
  std::vector<json> press(Direction d) { return send({{"type", "input_event"}, {"dir", std::string(to_string(d))}}); }

  // Plays the current trial with oracle judgments and leaves it with JUMP.
  void play_trial() {
    const int trial = view["trial"].get<int>();
    for (int guard = 0; guard < 1000; ++guard) {
      const auto st = svc.state(id);
      if (st.phase == Phase::AwaitJudgment) {
        const Judgment j = oracle_for(view);
        press(j == Judgment::Reduce ? Direction::Right : Direction::Left);
        if (svc.config().engine.commit_mode == CommitMode::Analog) tick_to(now + 600);
        press(Direction::Neutral);
      } else if (st.phase == Phase::TrialDone) {
        now += 100;
        send({{"type", "jump"}});
        return;
      } else if (st.phase == Phase::SessionDone || st.status != SessionStatus::InProgress) {
        return;
      } else {
        tick_to(now + 50);
      }
    }
    FAIL("trial " << trial << " did not finish");
  }
};

bool has_type(const std::vector<json>& frames, const std::string& type) {
  return std::any_of(frames.begin(), frames.end(), [&](const json& f) { return f["type"] == type; });
}

}  // namespace

TEST_CASE("create_session: same seed, same plan, distinct ids") {
  TempDir dir;
  SessionService svc(test_config(dir.path));
  const auto a = svc.create_session({"s01", std::nullopt, false});
  const auto b = svc.create_session({"s02", std::nullopt, false});
  CHECK(a.session_id != b.session_id);
  CHECK(a.plan.entries == b.plan.entries);
  CHECK(a.plan.seed == 7);
  CHECK(a.view.trial_number == 0);
  CHECK(a.view.trial_count == 40);
  CHECK(svc.has_session(a.session_id));
  // the same subject twice still gets two sessions
  CHECK(svc.create_session({"s01", std::nullopt, false}).session_id != a.session_id);
  CHECK(fs::exists(dir.path / (a.session_id + ".jsonl")));

  SUBCASE("sequential seeds") {
    auto cfg = test_config(dir.path);
    cfg.seed_policy = SeedPolicy::Sequential;
    SessionService seq(cfg);
    const auto x = seq.create_session({"a", std::nullopt, false});
    const auto y = seq.create_session({"b", std::nullopt, false});
    CHECK(x.plan.seed == 7);
    CHECK(y.plan.seed == 8);
    CHECK(seq.create_session({"c", 3u, false}).plan.seed == 3);
  }
  SUBCASE("practice") {
    const auto p = svc.create_session({"s09", std::nullopt, true});
    CHECK(p.plan.practice);
    CHECK(p.plan.entries.front().block == Block::Practice);
  }
  CHECK_THROWS_AS(svc.create_session({"", std::nullopt, false}), ParseError);
}

TEST_CASE("wire protocol drives the engine") {
  TempDir dir;
  SessionService svc(test_config(dir.path));
  Client c{svc, svc.create_session({"s01", std::nullopt, false}).session_id};

  auto hello = c.send({{"type", "hello"}});
  REQUIRE(hello.size() >= 1);
  const json& v = hello.back();
  CHECK(v["type"] == "view");
  CHECK(v["v"] == 1);
  CHECK(v["ack"] == 1);
  CHECK(v.contains("engine"));
  CHECK(v["engine"]["animation_ms"] == 840);
  CHECK(v["view"]["trial"] == 1);
  CHECK(v["view"]["icon"]["phase"] == "ANIMATING");

  // sequence numbers increase across every server frame
  std::int64_t last = 0;
  c.play_trial();
  c.play_trial();
  for (const auto& f : c.received) {
    CHECK(f["seq"].get<std::int64_t>() > last);
    last = f["seq"].get<std::int64_t>();
  }
  CHECK(has_type(c.received, "action_committed"));
  CHECK(has_type(c.received, "animating"));
  CHECK(has_type(c.received, "verdict"));
  for (const auto& f : c.received)
    if (f["type"] == "verdict") CHECK(f["verdict"] == "OK");
  for (const auto& f : c.received)
    if (f["type"] == "action_committed" && f["action"].contains("judgment")) CHECK(f["action"]["response_ms"] > 0);

  SUBCASE("logs are flushed per trial") {
    const auto log = load_session_log((dir.path / (c.id + ".jsonl")).string());
    CHECK(log.trials.size() == 2);
    CHECK(log.status == SessionStatus::InProgress);
    CHECK(log.agent == "ui");
    for (const auto& t : log.trials) {
      CHECK(t.verdict == Verdict::Ok);
      for (const auto& e : t.events) CHECK(e.received_ms.has_value());
    }
    // the file replays to the live state
    const Session replayed = replay_session(fixture(), log);
    CHECK(replayed.log().trials == log.trials);
  }
}

TEST_CASE("malformed messages get typed errors and the session survives") {
  TempDir dir;
  SessionService svc(test_config(dir.path));
  Client c{svc, svc.create_session({"s01", std::nullopt, false}).session_id};

  // input before hello
  auto r = c.press(Direction::Left);
  REQUIRE(r.size() == 1);
  CHECK(r[0]["type"] == "error");
  CHECK(r[0]["code"] == "invalid-state");

  c.send({{"type", "hello"}});
  const auto before = svc.state(c.id);

  const std::vector<std::string> bad = {
      "not json",
      "[1,2]",
      R"({"type":"input_event","t":5000,"dir":"LEFT"})",                // no version
      R"({"v":2,"type":"input_event","t":5000,"dir":"LEFT"})",          // wrong version
      R"({"v":1,"seq":9,"type":"input_event","dir":"LEFT"})",           // no timestamp
      R"({"v":1,"seq":10,"type":"input_event","t":5000,"dir":"UP"})",   // bad direction
      R"({"v":1,"seq":11,"type":"input_event","t":"soon","dir":"LEFT"})",
      R"({"v":1,"seq":12,"type":"teleport","t":5000})",
      R"({"v":1,"seq":"x","type":"jump","t":5000})",
  };
  for (const auto& text : bad) {
    const auto out = c.raw(text);
    REQUIRE(out.size() == 1);
    CHECK(out[0]["type"] == "error");
    CHECK(out[0]["code"] == "parse");
  }
  CHECK(c.raw(R"({"v":1,"seq":10,"type":"input_event","t":5000,"dir":"UP"})")[0]["ack"] == 10);
  CHECK(svc.state(c.id).view == before.view);
  CHECK(svc.state(c.id).trials_logged == 0);

  // a timestamp running backwards is a clock error, not a crash
  c.now = 900;
  auto back = c.press(Direction::Left);
  CHECK(back[0]["code"] == "clock");

  // valid input still works afterwards
  c.now = 2500;
  c.play_trial();
  CHECK(svc.state(c.id).trials_logged == 1);

  CHECK_THROWS_AS(svc.handle_message("nobody-0001", R"({"v":1,"type":"hello","t":1})", 0), NotFoundError);
}

TEST_CASE("ticks push wall hits without further input") {
  TempDir dir;
  auto cfg = test_config(dir.path);
  cfg.tick_lag_ms = 100;
  SessionService svc(cfg);
  Client c{svc, svc.create_session({"s01", std::nullopt, false}).session_id};
  c.send({{"type", "hello"}});
  // advance past the opening automatic animation(s)
  while (svc.state(c.id).phase != Phase::AwaitJudgment) c.tick_to(c.now + 10);
  const double pressed = c.now;
  c.press(Direction::Left);
  // hit at +500; with a 100 ms lag the service reveals it from +600 on
  CHECK(c.tick_to(pressed + 590).empty());
  const auto frames = c.tick_to(pressed + 610);
  REQUIRE(has_type(frames, "action_committed"));
  for (const auto& f : frames)
    if (f["type"] == "action_committed") {
      CHECK(f["action"]["at"].get<double>() == doctest::Approx(pressed + 500));
      // AWAIT_JUDGMENT was revealed 100 ms (the lag) after it began, give or take one 10 ms step
      CHECK(f["action"]["response_ms"].get<double>() >= 600);
      CHECK(f["action"]["response_ms"].get<double>() < 610);
    }
  // a late release stamped before the engine's time is clamped, not rejected
  c.now = pressed + 505;  // the engine is already at pressed + 510
  const auto late = c.press(Direction::Neutral);
  CHECK(late.back()["type"] == "view");
  CHECK(svc.state(c.id).clamped_inputs == 1);
}

TEST_CASE("resume after disconnect restores the same view") {
  TempDir dir;
  SessionService svc(test_config(dir.path));
  Client c{svc, svc.create_session({"s01", std::nullopt, false}).session_id};
  c.send({{"type", "hello"}});
  c.play_trial();
  // stop in the middle of the next trial
  while (svc.state(c.id).phase != Phase::AwaitJudgment) c.tick_to(c.now + 10);
  c.press(Direction::Right);
  c.now += 200;
  c.press(Direction::Neutral);
  const auto live = svc.state(c.id);

  // same service: journal replay replaces the engine
  Client again{svc, c.id, c.now + 5000, 100};
  const auto frames = again.send({{"type", "resume"}});
  REQUIRE(frames.back()["type"] == "view");
  CHECK(frames.back()["view"] == json::parse(view_json(live.view)));

  // fresh service over the same log directory: recovered from the journal file
  SessionService restarted(test_config(dir.path));
  const auto recovered = restarted.state(c.id);
  CHECK(recovered.view == live.view);
  CHECK(recovered.trials_logged == 1);
  Client after{restarted, c.id, c.now + 100, 200};
  after.send({{"type", "hello"}});
  after.play_trial();
  const auto log = load_session_log((dir.path / (c.id + ".jsonl")).string());
  CHECK(log.trials.size() == 2);  // no duplicate trial lines after recovery
}

TEST_CASE("complete session over the wire") {
  TempDir dir;
  SessionService svc(test_config(dir.path, CommitMode::Instant));
  Client c{svc, svc.create_session({"s01", std::nullopt, false}).session_id};
  c.send({{"type", "hello"}});
  for (int i = 0; i < 40; ++i) c.play_trial();
  CHECK(has_type(c.received, "session_done"));
  const auto st = svc.state(c.id);
  CHECK(st.status == SessionStatus::Complete);
  CHECK(st.trials_logged == 40);

  const auto late = c.send({{"type", "jump"}});
  CHECK(late[0]["code"] == "invalid-state");

  const auto log = load_session_log((dir.path / (c.id + ".jsonl")).string());
  CHECK(log.status == SessionStatus::Complete);
  CHECK(serialize_session_log(replay_session(fixture(), log).log()) == svc.read_log(c.id + ".jsonl"));
  const auto rows = extract_observations({log});
  CHECK(rows.size() == 40);
  CHECK(std::all_of(rows.begin(), rows.end(), [](const ObservationRow& r) { return r.correct; }));
}

TEST_CASE("HTTP routes") {
  TempDir dir;
  TempDir assets;
  {
    std::ofstream(assets.path / "index.html") << "<!doctype html><title>k</title>";
    fs::create_directories(assets.path / "js");
    std::ofstream(assets.path / "js" / "app.js") << "console.log(1)";
  }
  auto cfg = test_config(dir.path);
  cfg.static_dir = assets.path;
  SessionService svc(cfg);

  auto created = route_http(svc, "POST", "/api/sessions", R"({"subject_id":"s03","seed":7})");
  CHECK(created.status == 201);
  const json body = json::parse(created.body);
  const std::string id = body["session_id"];
  CHECK(body["plan"].size() == 40);
  CHECK(body["stream"] == "/api/sessions/" + id + "/stream");
  CHECK(body["view"]["trial"] == 0);

  CHECK(route_http(svc, "POST", "/api/sessions", R"({"seed":7})").status == 400);
  CHECK(route_http(svc, "POST", "/api/sessions", "{oops").status == 400);
  CHECK(route_http(svc, "GET", "/api/sessions", "").status == 405);

  const auto state = route_http(svc, "GET", "/api/sessions/" + id, "");
  CHECK(state.status == 200);
  CHECK(json::parse(state.body)["phase"] == "IDLE");
  const auto missing = route_http(svc, "GET", "/api/sessions/ghost-0001", "");
  CHECK(missing.status == 404);
  CHECK(json::parse(missing.body)["error"]["category"] == "not-found");

  const auto logs = json::parse(route_http(svc, "GET", "/api/logs", "").body);
  CHECK(logs["logs"] == json::array({id + ".jsonl"}));
  const auto file = route_http(svc, "GET", "/api/logs/" + id + ".jsonl", "");
  CHECK(file.status == 200);
  CHECK(file.content_type == "application/x-ndjson");
  CHECK(file.body.rfind(R"({"record":"session")", 0) == 0);
  CHECK(route_http(svc, "GET", "/api/logs/" + id + ".journal", "").status == 404);
  CHECK(route_http(svc, "GET", "/api/logs/..%2Fx.jsonl", "").status == 404);
  CHECK(route_http(svc, "GET", "/api/logs/../../etc/passwd", "").status == 404);

  const auto index = route_http(svc, "GET", "/", "");
  CHECK(index.status == 200);
  CHECK(index.content_type.rfind("text/html", 0) == 0);
  const auto js = route_http(svc, "GET", "/js/app.js?v=2", "");
  CHECK(js.status == 200);
  CHECK(js.content_type.rfind("text/javascript", 0) == 0);
  CHECK(js.body == "console.log(1)");
  CHECK(route_http(svc, "GET", "/../secret", "").status == 404);
  CHECK(route_http(svc, "GET", "/nope.css", "").status == 404);
  CHECK(route_http(svc, "GET", "/api/unknown", "").status == 404);

  CHECK(stream_target("/api/sessions/abc-0001/stream") == std::optional<std::string>("abc-0001"));
  CHECK(!stream_target("/api/sessions/abc/0001/stream"));
  CHECK(!stream_target("/api/sessions//stream"));
}

TEST_CASE("service config") {
  const auto c = ServiceConfig::from_json(
      R"({"port":9001,"corpus":"c.jsonl","log_dir":"/abs/logs","engine":{"animation_ms":830,"commit_mode":"instant"},
          "seed_policy":"sequential","seed":5})",
      "/etc/kakari");
  CHECK(c.port == 9001);
  CHECK(c.corpus == fs::path("/etc/kakari/c.jsonl"));
  CHECK(c.log_dir == fs::path("/abs/logs"));
  CHECK(c.engine.animation_ms == 830);
  CHECK(c.engine.commit_mode == CommitMode::Instant);
  CHECK(c.seed_policy == SeedPolicy::Sequential);
  CHECK(c.seed == 5);
  CHECK(c.host == "127.0.0.1");

  CHECK_THROWS_AS(ServiceConfig::from_json(R"({"prot":1})"), ConfigError);
  CHECK_THROWS_AS(ServiceConfig::from_json(R"({"engine":{"commit_mode":"psychic"}})"), ConfigError);
  CHECK_THROWS_AS(ServiceConfig::from_json("[]"), ConfigError);

  TempDir dir;
  auto bad = test_config(dir.path);
  bad.engine.animation_ms = 900;
  CHECK_THROWS_AS(SessionService{bad}, ConfigError);
  bad = test_config(dir.path);
  bad.corpus = dir.path / "missing.jsonl";
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  SUBCASE("round trip") {
    const auto again = ServiceConfig::from_json(c.to_json());
    CHECK(again.to_json() == c.to_json());
  }
  SUBCASE("environment overrides") {
    const fs::path file = dir.path / "svc.json";
    std::ofstream(file) << R"({"port":7000,"corpus":"corpus.jsonl"})";
    ::setenv("KAKARI_CONFIG", file.c_str(), 1);
    ::setenv("KAKARI_PORT", "7123", 1);
    const auto env = ServiceConfig::from_environment();
    CHECK(env.port == 7123);
    CHECK(env.corpus == dir.path / "corpus.jsonl");
    ::setenv("KAKARI_PORT", "seventy", 1);
    CHECK_THROWS_AS(ServiceConfig::from_environment(), ConfigError);
    ::unsetenv("KAKARI_PORT");
    ::unsetenv("KAKARI_CONFIG");
  }
  SUBCASE("a corpus that fails validation aborts startup") {
    std::ifstream in(kCorpusPath);
    std::stringstream text;
    text << in.rdbuf();
    std::string broken = text.str();
    // give the second record the first record's id
    const auto first = broken.find("\"id\":\"") + 6;
    const auto first_end = broken.find('"', first);
    const auto second = broken.find("\"id\":\"", first_end) + 6;
    const auto second_end = broken.find('"', second);
    broken.replace(second, second_end - second, broken.substr(first, first_end - first));
    const fs::path path = dir.path / "broken.jsonl";
    std::ofstream(path) << broken;
    auto cfg = test_config(dir.path / "logs");
    cfg.corpus = path;
    try {
      SessionService svc(cfg);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("unique-id") != std::string::npos);
    }
  }
}

// ---------------------------------------------------------------------------
// Live transport

namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

http::response<http::string_body> http_call(std::uint16_t port, http::verb verb, const std::string& target,
                                            const std::string& body = "") {
  asio::io_context ioc;
  beast::tcp_stream stream(ioc);
  stream.connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), port));
  http::request<http::string_body> req{verb, target, 11};
  req.set(http::field::host, "127.0.0.1");
  req.set(http::field::content_type, "application/json");
  req.body() = body;
  req.prepare_payload();
  http::write(stream, req);
  beast::flat_buffer buffer;
  http::response<http::string_body> res;
  http::read(stream, buffer, res);
  beast::error_code ec;
  stream.socket().shutdown(tcp::socket::shutdown_both, ec);
  return res;
}

struct WsClient {
  asio::io_context ioc;
  websocket::stream<tcp::socket> ws{ioc};
  std::chrono::steady_clock::time_point epoch = std::chrono::steady_clock::now();
  std::int64_t seq = 0;
  json view;

  WsClient(std::uint16_t port, const std::string& id) {
    ws.next_layer().connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), port));
    ws.handshake("127.0.0.1", "/api/sessions/" + id + "/stream");
  }
  double now() const {
    return 5000 + std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - epoch).count();
  }
  void send(json msg) {
    msg["v"] = 1;
    msg["seq"] = ++seq;
    msg["t"] = now();
    ws.write(asio::buffer(msg.dump()));
  }
  json read() {
    beast::flat_buffer b;
    ws.read(b);
    json j = json::parse(beast::buffers_to_string(b.data()));
    if (std::getenv("KAKARI_TRACE")) std::fprintf(stderr, "<< %s\n", j.dump().c_str());
    if (j["type"] == "view") view = j["view"];
    return j;
  }
  // Reads until a frame of `type` arrives.
  json read_until(const std::string& type) {
    for (;;) {
      json j = read();
      if (j["type"] == type) return j;
    }
  }
};

}  // namespace

TEST_CASE("live HTTP and WebSocket round trip") {
  TempDir dir;
  TempDir assets;
  std::ofstream(assets.path / "index.html") << "<p>ui</p>";
  auto cfg = test_config(dir.path);
  cfg.static_dir = assets.path;
  cfg.tick_lag_ms = 50;
  SessionService svc(cfg);
  Server server(svc, "127.0.0.1", 0, 2);
  server.start();
  const auto port = server.port();

  const auto index = http_call(port, http::verb::get, "/");
  CHECK(index.result_int() == 200);
  CHECK(index.body() == "<p>ui</p>");

  const auto created = http_call(port, http::verb::post, "/api/sessions", R"({"subject_id":"live"})");
  REQUIRE(created.result_int() == 201);
  const std::string id = json::parse(created.body())["session_id"];

  {
    WsClient ws(port, id);
    ws.send({{"type", "hello"}});
    const json hello = ws.read_until("view");
    CHECK(hello["ack"] == 1);

    // automatic actions arrive as server-pushed frames; judge the first
    // judged position with an analog hold and wait for the server's commit
    bool judged = false;
    while (!judged) {
      const json f = ws.read();
      if (f["type"] != "view") continue;
      const auto phase = f["view"]["icon"]["phase"];
      if (phase == "TRIAL_DONE") {
        ws.send({{"type", "jump"}});
      } else if (phase == "AWAIT_JUDGMENT") {
        const Judgment j = oracle_for(ws.view);
        ws.send({{"type", "input_event"}, {"dir", j == Judgment::Reduce ? "RIGHT" : "LEFT"}});
        const json committed = ws.read_until("action_committed");
        CHECK(committed["action"]["judgment"] == std::string(to_string(j)));
        ws.send({{"type", "input_event"}, {"dir", "NEUTRAL"}});
        judged = true;
      }
    }

    // malformed frame: typed error, connection and session stay up
    ws.ws.write(asio::buffer(std::string("{garbage")));
    CHECK(ws.read_until("error")["code"] == "parse");
    ws.ws.close(websocket::close_code::normal);
  }

  // reconnect, resume, and finish the interrupted trial (real time: about 10 s at most)
  {
    WsClient ws(port, id);
    ws.send({{"type", "resume"}});
    json resumed = ws.read_until("view");
    while (!resumed.contains("ack")) resumed = ws.read_until("view");
    CHECK(resumed["ack"] == ws.seq);
    CHECK(resumed.contains("engine"));
    int done = 0;
    for (int guard = 0; guard < 4000 && done == 0; ++guard) {
      const json f = ws.read();
      if (f["type"] != "view") continue;
      const auto phase = f["view"]["icon"]["phase"];
      if (phase == "AWAIT_JUDGMENT" && f["view"]["icon"]["direction"] == "NEUTRAL") {
        const Judgment j = oracle_for(f["view"]);
        ws.send({{"type", "input_event"}, {"dir", j == Judgment::Reduce ? "RIGHT" : "LEFT"}});
        ws.read_until("action_committed");
        ws.send({{"type", "input_event"}, {"dir", "NEUTRAL"}});
      } else if (phase == "TRIAL_DONE") {
        CHECK(f["view"]["verdict"] == "OK");
        ++done;
        ws.send({{"type", "jump"}});
        ws.read_until("view");
      }
    }
    CHECK(done == 1);
    ws.ws.close(websocket::close_code::normal);
  }

  const auto file = http_call(port, http::verb::get, "/api/logs/" + id + ".jsonl");
  REQUIRE(file.result_int() == 200);
  std::istringstream in(file.body());
  const auto log = parse_session_log(in, "live");
  const auto rows = extract_observations({log});
  REQUIRE(!rows.empty());
  CHECK(std::all_of(rows.begin(), rows.end(), [](const ObservationRow& r) { return r.correct; }));

  CHECK(http_call(port, http::verb::get, "/api/sessions/nope-0001").result_int() == 404);
  server.stop();
}
