#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "kakari/analysis.hpp"
#include "kakari/corpus.hpp"
#include "kakari/error.hpp"
#include "kakari/server.hpp"
#include "kakari/service.hpp"
#include "kakari/session.hpp"

using namespace kakari;
namespace fs = std::filesystem;

namespace {

// Exit codes.
constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;  // validation found problems / replay mismatch
constexpr int kExitInput = 3;    // unreadable or malformed input, bad config
constexpr int kExitNoData = 4;   // nothing to analyse, or the data cannot be fitted
constexpr int kExitOther = 5;

int exit_code_for(const Error& e) {
  const std::string c(e.category());
  if (c == "insufficient-data" || c == "rank-deficient" || c == "undefined-residual") return kExitNoData;
  if (c == "parse" || c == "io" || c == "not-found" || c == "config" || c == "extraction" ||
      c == "invalid-reading" || c == "insufficient-lexicon" || c == "insufficient-corpus")
    return kExitInput;
  return kExitOther;
}

std::string counts_summary(const CorpusFile& corpus) {
  std::ostringstream s;
  s << corpus.records.size() << " records (";
  bool first = true;
  for (auto type : kAllSentenceTypes) {
    s << (first ? "" : ", ") << to_string(type) << ' ' << corpus.count(type);
    first = false;
  }
  s << ')';
  return s.str();
}

int cmd_corpus_generate(const std::string& fillers_path, const std::string& lexicon_path, int per_type,
                        std::uint64_t seed, const std::string& out_path) {
  CorpusFile corpus = load_corpus(fillers_path);
  const Lexicon lex = load_lexicon(lexicon_path);
  for (auto type : kGardenPathTypes) {
    for (int i = 1; i <= per_type; ++i) {
      std::ostringstream id;
      id << to_string(type) << '-' << std::setw(2) << std::setfill('0') << i;
      corpus.records.push_back(generate_gp_sentence(type, lex, seed + static_cast<std::uint64_t>(i), id.str()));
    }
  }
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot write " + out_path);
  write_corpus(out, corpus);
  std::cerr << "wrote " << out_path << ": " << counts_summary(corpus) << '\n';
  return kExitOk;
}

int cmd_corpus_validate(const std::string& path) {
  const CorpusFile corpus = load_corpus(path);
  const auto report = validate_corpus(corpus);
  for (const auto& issue : report.issues)
    std::cout << path << ": " << issue.record_id << ": " << issue.check << ": " << issue.message << '\n';
  if (!report.ok()) {
    std::cerr << report.issues.size() << " issue(s)\n";
    return kExitInvalid;
  }
  std::cout << "ok: " << counts_summary(corpus) << '\n';
  return kExitOk;
}

int cmd_plan(const std::string& corpus_path, const std::string& subject, std::uint64_t seed, bool practice) {
  const CorpusFile corpus = load_corpus(corpus_path);
  const SessionPlan plan = practice ? build_practice_plan(corpus, subject, seed) : build_plan(corpus, subject, seed);
  int order = 0;
  for (const auto& e : plan.entries)
    std::cout << ++order << '\t' << to_string(e.block) << '\t' << e.sentence_id << '\t'
              << to_string(corpus.at(e.sentence_id).type()) << '\n';
  return kExitOk;
}

struct SimulateArgs {
  std::string corpus;
  std::string policy = "oracle";
  double p = 0.3;
  int subjects = 12;
  std::uint64_t seed = 1;
  std::string out;
  bool practice = false;
  bool instant = false;
  double animation_ms = 840;
};

int cmd_simulate(const SimulateArgs& a) {
  auto corpus = std::make_shared<const CorpusFile>(load_corpus(a.corpus));
  EngineConfig config;
  config.animation_ms = a.animation_ms;
  config.commit_mode = a.instant ? CommitMode::Instant : CommitMode::Analog;
  config.validate();
  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) throw IoError("cannot create " + a.out + ": " + ec.message());

  for (int k = 0; k < a.subjects; ++k) {
    const std::uint64_t subject_seed = a.seed + static_cast<std::uint64_t>(k);
    std::ostringstream name;
    name << 's' << std::setw(2) << std::setfill('0') << (k + 1);
    BotPolicy policy;
    if (a.policy == "oracle") policy = BotPolicy::oracle();
    else if (a.policy == "noisy") policy = BotPolicy::noisy(a.p, subject_seed * 7919 + 17);
    else if (a.policy == "shift") policy = BotPolicy::always(Judgment::Shift);
    else if (a.policy == "reduce") policy = BotPolicy::always(Judgment::Reduce);
    else throw ConfigError("unknown policy '" + a.policy + "'");
    TimingModel timing;
    timing.seed = subject_seed * 104729 + 3;

    const SessionPlan plan = a.practice ? build_practice_plan(*corpus, name.str(), subject_seed)
                                        : build_plan(*corpus, name.str(), subject_seed);
    const SessionLog log = run_bot_session(corpus, plan, policy, timing, config);
    const fs::path path = fs::path(a.out) / (name.str() + ".jsonl");
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write " + path.string());
    file << serialize_session_log(log);
  }
  std::cerr << "wrote " << a.subjects << " session log(s) to " << a.out << '\n';
  return kExitOk;
}

std::vector<fs::path> log_files(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (const auto& e : fs::directory_iterator(in))
        if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
    } else if (fs::is_regular_file(in)) {
      files.emplace_back(in);
    } else {
      throw NotFoundError("no such file or directory: " + in);
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

struct AnalyzeArgs {
  std::vector<std::string> logs;
  std::string corpus;
  bool per_subject = false;
  std::string y = "judged";
  std::string format = "text";
  std::string tsv_out;
  bool include_practice = false;
};

int cmd_analyze(const AnalyzeArgs& a) {
  std::vector<SessionLog> logs;
  for (const auto& f : log_files(a.logs)) logs.push_back(load_session_log(f.string()));
  ExtractOptions opts;
  opts.include_practice = a.include_practice;
  if (a.y == "judged") opts.measure = ResponseMeasure::JudgedResponse;
  else if (a.y == "wallclock") opts.measure = ResponseMeasure::WallClock;
  else throw ConfigError("unknown --y '" + a.y + "' (judged|wallclock)");
  std::optional<CorpusFile> corpus;
  if (!a.corpus.empty()) corpus = load_corpus(a.corpus);

  auto rows = extract_observations(logs, corpus ? &*corpus : nullptr, opts);
  if (rows.empty()) {
    std::cerr << "no sessions found\n";
    return kExitNoData;
  }
  const auto result = analyze(std::move(rows), a.per_subject ? Grouping::PerSubject : Grouping::Pooled);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';

  if (a.format == "tsv") std::cout << render_table_tsv(result.table);
  else if (a.format == "text") std::cout << render_table_text(result.table);
  else throw ConfigError("unknown --format '" + a.format + "'");
  std::size_t subjects = 0;
  {
    std::vector<std::string> ids;
    for (const auto& r : result.rows) ids.push_back(r.subject_id);
    std::sort(ids.begin(), ids.end());
    subjects = static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
  }
  if (a.format == "text")
    std::cout << result.rows.size() << " trials, " << result.residuals.size() << " correct, " << subjects
              << " subject(s)\n";
  if (!a.tsv_out.empty()) {
    std::ofstream out(a.tsv_out);
    if (!out) throw IoError("cannot write " + a.tsv_out);
    out << render_table_tsv(result.table);
  }
  return kExitOk;
}

int cmd_replay(const std::string& log_path, const std::string& corpus_path) {
  auto corpus = std::make_shared<const CorpusFile>(load_corpus(corpus_path));
  std::ifstream in(log_path, std::ios::binary);
  if (!in) throw IoError("cannot read " + log_path);
  std::stringstream raw;
  raw << in.rdbuf();
  std::istringstream parse_in(raw.str());
  const SessionLog log = parse_session_log(parse_in, log_path);
  const Session replayed = replay_session(corpus, log);
  const std::string again = serialize_session_log(replayed.log());
  if (again != raw.str()) {
    std::cout << "mismatch: replay of " << log_path << " differs from the recorded log\n";
    return kExitInvalid;
  }
  std::cout << "ok: " << log.trials.size() << " trial(s) reproduced byte-for-byte\n";
  return kExitOk;
}

struct ServeArgs {
  std::string config;
  int port = -1;
  std::string corpus, log_dir, static_dir, host;
};

int cmd_serve(const ServeArgs& a) {
  ServiceConfig cfg = ServiceConfig::from_environment(
      a.config.empty() ? std::nullopt : std::optional<fs::path>(a.config));
  if (a.port >= 0) cfg.port = a.port;
  if (!a.corpus.empty()) cfg.corpus = a.corpus;
  if (!a.log_dir.empty()) cfg.log_dir = a.log_dir;
  if (!a.static_dir.empty()) cfg.static_dir = a.static_dir;
  if (!a.host.empty()) cfg.host = a.host;
  SessionService service(cfg);
  Server server(service, cfg.host, cfg.port, cfg.threads);
  std::cerr << "listening on http://" << cfg.host << ':' << server.port() << " (logs in " << cfg.log_dir.string()
            << ")\n";
  server.run(true);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kakari: dependency-parsing game engine, simulator and analysis"};
  app.require_subcommand(1);
  const std::string default_corpus = (fs::path(KAKARI_DATA_DIR) / "corpus.jsonl").string();

  auto* corpus = app.add_subcommand("corpus", "generate or validate sentence corpora");
  corpus->require_subcommand(1);
  std::string fillers, lexicon, out, corpus_path = default_corpus;
  int per_type = 5;
  std::uint64_t seed = 1;
  auto* gen = corpus->add_subcommand("generate", "fillers + generated garden-path sentences");
  gen->add_option("--fillers", fillers, "filler corpus (JSONL)")->required();
  gen->add_option("--lexicon", lexicon, "lexicon (JSON)")->required();
  gen->add_option("--per-type", per_type, "sentences per garden-path type")->capture_default_str();
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("-o,--out", out)->required();
  auto* val = corpus->add_subcommand("validate", "check trees, metadata and garden-path structure");
  val->add_option("corpus", corpus_path, "corpus file")->capture_default_str();

  auto* plan = app.add_subcommand("plan", "print a subject's presentation order");
  std::string subject = "s01";
  bool practice = false;
  plan->add_option("--corpus", corpus_path)->capture_default_str();
  plan->add_option("--subject", subject)->capture_default_str();
  plan->add_option("--seed", seed)->capture_default_str();
  plan->add_flag("--practice", practice, "practice plan (fillers only)");

  auto* sim = app.add_subcommand("simulate", "run bot subjects and write session logs");
  SimulateArgs sa;
  sa.corpus = default_corpus;
  sim->add_option("--corpus", sa.corpus)->capture_default_str();
  sim->add_option("--policy", sa.policy, "oracle | noisy | shift | reduce")
      ->check(CLI::IsMember({"oracle", "noisy", "shift", "reduce"}))
      ->capture_default_str();
  sim->add_option("--p", sa.p, "flip probability for --policy noisy")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  sim->add_option("--subjects", sa.subjects)->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--seed", sa.seed, "subject k uses seed + k")->capture_default_str();
  sim->add_option("--out", sa.out, "output directory")->required();
  sim->add_flag("--practice", sa.practice);
  sim->add_flag("--instant", sa.instant, "instant commit mode");
  sim->add_option("--animation-ms", sa.animation_ms)->capture_default_str();

  auto* ana = app.add_subcommand("analyze", "accuracy and residual response time per category");
  AnalyzeArgs aa;
  ana->add_option("--logs", aa.logs, "log directories or files")->required();
  ana->add_option("--corpus", aa.corpus, "corpus for trials lacking metadata");
  ana->add_flag("--per-subject", aa.per_subject, "fit one regression per subject");
  ana->add_option("--y", aa.y, "judged | wallclock")->capture_default_str();
  ana->add_option("--format", aa.format, "text | tsv")->capture_default_str();
  ana->add_option("--tsv", aa.tsv_out, "also write the table as TSV");
  ana->add_flag("--include-practice", aa.include_practice);

  auto* rep = app.add_subcommand("replay", "re-run a session log from its inputs and compare");
  std::string replay_log;
  rep->add_option("log", replay_log)->required();
  rep->add_option("--corpus", corpus_path)->capture_default_str();

  auto* srv = app.add_subcommand("serve", "HTTP + WebSocket session service");
  ServeArgs sv;
  srv->add_option("--config", sv.config, "JSON config (else $KAKARI_CONFIG)");
  srv->add_option("--port", sv.port, "overrides config and $KAKARI_PORT");
  srv->add_option("--host", sv.host);
  srv->add_option("--corpus", sv.corpus);
  srv->add_option("--log-dir", sv.log_dir);
  srv->add_option("--static", sv.static_dir);

  CLI11_PARSE(app, argc, argv);
  try {
    if (gen->parsed()) return cmd_corpus_generate(fillers, lexicon, per_type, seed, out);
    if (val->parsed()) return cmd_corpus_validate(corpus_path);
    if (plan->parsed()) return cmd_plan(corpus_path, subject, seed, practice);
    if (sim->parsed()) return cmd_simulate(sa);
    if (ana->parsed()) return cmd_analyze(aa);
    if (rep->parsed()) return cmd_replay(replay_log, corpus_path);
    if (srv->parsed()) return cmd_serve(sv);
  } catch (const Error& e) {
    std::cerr << "error (" << e.category() << "): " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOk;
}
