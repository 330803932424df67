#pragma once

// Experiment session engine.
//
// A session walks through a 40-sentence plan. Each trial drives the
// transition system: automatic actions fire on their own, judged actions are
// committed by holding a direction until the icon reaches a wall (LEFT =
// SHIFT wall at -1, RIGHT = REDUCE wall at +1). Every action is followed by
// an animation window during which input is recorded but inert. A JUMP on
// the verdict screen moves on to the next sentence.
//
// The engine has no clock. Callers pass timestamps (milliseconds, double);
// icon motion is piecewise linear and evaluated in closed form, so `tick`
// only reveals what the input stream already determines. The session log is
// a function of the input events alone, which is what makes replay exact.

#include <cstdint>
#include <cstdio>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kakari/corpus.hpp"
#include "kakari/transition.hpp"

namespace kakari {

// ---------------------------------------------------------------------------
// Plan

enum class Block { Block1, Block2, Block3, Practice };
std::string_view to_string(Block b);
Block block_from_string(std::string_view s);

struct PlanEntry {
  std::string sentence_id;
  Block block = Block::Block1;
  bool operator==(const PlanEntry&) const = default;
};

// Defaults: 5 fillers | 15 fillers + 5 CTRL + 5 EB + 5 LB (shuffled) | 5 fillers.
struct PlanCounts {
  int block1_fillers = 5;
  int block2_fillers = 15;
  int per_gp_type = 5;
  int block3_fillers = 5;

  int fillers() const { return block1_fillers + block2_fillers + block3_fillers; }
  int total() const { return fillers() + 3 * per_gp_type; }
};

struct SessionPlan {
  std::string subject_id;
  std::uint64_t seed = 0;
  bool practice = false;
  std::vector<PlanEntry> entries;

  bool operator==(const SessionPlan&) const = default;
};

// The plan depends on the seed only; the subject id is carried along.
// Throws InsufficientCorpusError naming the short category.
SessionPlan build_plan(const CorpusFile& corpus, std::string subject_id, std::uint64_t seed,
                       const PlanCounts& counts = {});

// Practice plans draw `count` fillers and are excluded from analysis.
SessionPlan build_practice_plan(const CorpusFile& corpus, std::string subject_id, std::uint64_t seed,
                                int count = 10);

// ---------------------------------------------------------------------------
// Input and configuration

enum class Direction { Left, Neutral, Right };
std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view s);

struct InputEvent {
  enum class Kind { Direction, Jump };

  double t_ms = 0;
  Kind kind = Kind::Direction;
  Direction direction = Direction::Neutral;
  std::optional<double> received_ms;  // server receipt time, audit only

  static InputEvent dir(double t, Direction d) { return {t, Kind::Direction, d, std::nullopt}; }
  static InputEvent jump(double t) { return {t, Kind::Jump, Direction::Neutral, std::nullopt}; }
  bool operator==(const InputEvent&) const = default;
};

enum class CommitMode { Analog, Instant };
std::string_view to_string(CommitMode m);
CommitMode commit_mode_from_string(std::string_view s);

inline constexpr double kMinAnimationMs = 820.0;
inline constexpr double kMaxAnimationMs = 860.0;

struct EngineConfig {
  double icon_speed = 2.0;    // full ranges per second while a direction is held
  double drift_speed = 1.0;   // return toward centre per second when neutral
  double animation_ms = 840.0;
  CommitMode commit_mode = CommitMode::Analog;

  // Throws ConfigError when animation_ms is outside [820, 860] or a speed is
  // not positive.
  void validate() const;
  bool operator==(const EngineConfig&) const = default;
};

enum class Phase { Idle, AwaitJudgment, Animating, AutoAction, TrialDone, SessionDone };
std::string_view to_string(Phase p);

struct IconState {
  double position = 0;  // -1 SHIFT wall, +1 REDUCE wall
  Direction direction_held = Direction::Neutral;
  Phase phase = Phase::Idle;

  bool operator==(const IconState&) const = default;
};

enum class Verdict { Ok, Ng };
std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view s);

// ---------------------------------------------------------------------------
// Logs

struct ActionLog {
  ActionKind kind = ActionKind::DefaultShift;
  std::optional<PhraseIndex> s;
  PhraseIndex q = 0;
  double committed_at = 0;
  std::optional<double> response_ms;  // judged actions only

  bool operator==(const ActionLog&) const = default;
};

struct TrialLog {
  std::string sentence_id;
  SentenceType category = SentenceType::Filler;
  Block block = Block::Block1;
  int presentation_order = 0;  // 1-based
  // Sentence metadata so logs can be analysed without the corpus.
  int phrases = 0;
  int morae = 0;
  int chars = 0;

  double started_at = 0;
  double done_at = 0;   // verdict shown
  double ended_at = 0;  // trial left (JUMP)
  std::vector<ActionLog> actions;
  int direction_alternations = 0;
  Verdict verdict = Verdict::Ng;
  std::vector<Arc> arcs;
  std::vector<InputEvent> events;  // inputs consumed during the trial, in order

  ActionCounts counts() const;
  double judged_response_ms() const;

  bool operator==(const TrialLog&) const = default;
};

enum class SessionStatus { InProgress, Complete, Aborted };
std::string_view to_string(SessionStatus s);

inline constexpr int kLogSchemaVersion = 1;

struct SessionLog {
  int schema = kLogSchemaVersion;
  std::string subject_id;
  std::uint64_t seed = 0;
  std::string agent;  // "ui", "bot:oracle", ...
  bool practice = false;
  EngineConfig config;
  std::vector<PlanEntry> plan;
  std::vector<TrialLog> trials;
  SessionStatus status = SessionStatus::InProgress;
  std::optional<double> ended_at;

  bool operator==(const SessionLog&) const = default;
};

// ---------------------------------------------------------------------------
// Engine outputs

struct EngineView {
  std::string sentence_id;
  std::vector<std::string> phrases;  // surfaces, in order
  std::vector<PhraseIndex> stack;
  std::vector<PhraseIndex> queue;
  std::vector<Arc> arcs;
  IconState icon;
  std::optional<Verdict> verdict;
  int trial_number = 0;  // 1-based, 0 before the first trial
  int trial_count = 0;
  double at = 0;

  bool operator==(const EngineView&) const = default;
};

enum class OutputKind { TrialStarted, ActionCommitted, Animating, AwaitJudgment, Verdict, SessionDone, InputIgnored };
std::string_view to_string(OutputKind k);

struct EngineOutput {
  OutputKind kind = OutputKind::TrialStarted;
  double at = 0;
  std::optional<ActionLog> action;
  Phase phase = Phase::Idle;  // AutoAction for automatic actions, Animating for judged
  std::optional<double> until;
  std::optional<Verdict> verdict;
  std::string note;
};

// ---------------------------------------------------------------------------

class Session {
 public:
  Session(std::shared_ptr<const CorpusFile> corpus, SessionPlan plan, EngineConfig config,
          std::string agent = "ui");

  // Starts the next planned trial. Throws InvalidStateError when a trial is
  // active or the plan is exhausted, ClockError when `now` runs backwards.
  std::vector<EngineOutput> start_trial(double now);

  // Throws ClockError on out-of-order timestamps and InvalidStateError when
  // no trial is active.
  std::vector<EngineOutput> feed_input(const InputEvent& event);

  // Advances time. Times at or before the last seen time are ignored.
  std::vector<EngineOutput> tick(double now);

  // Closes a trial in TRIAL_DONE and logs it. JUMP calls this and then
  // starts the next trial. Throws InvalidStateError outside TRIAL_DONE.
  TrialLog finish_trial(double now);

  // Ends the session early. The in-progress trial is dropped from the log.
  void abort(double now);

  EngineView view() const;
  Phase phase() const { return phase_; }
  IconState icon() const;
  const ParserState& parser() const { return parser_; }
  const SentenceRecord* current_record() const { return current_; }
  double await_entry_time() const { return await_entry_; }
  double last_time() const { return last_time_; }
  // Next time at which the state changes without further input, if any.
  std::optional<double> next_deadline() const;

  bool complete() const { return log_.status == SessionStatus::Complete; }
  bool finished() const { return log_.status != SessionStatus::InProgress; }
  const SessionLog& log() const { return log_; }
  const SessionPlan& plan() const { return plan_; }
  // Every input consumed so far, across trials.
  const std::vector<InputEvent>& journal() const { return journal_; }
  double first_start() const { return log_.trials.empty() ? trial_.started_at : log_.trials.front().started_at; }

 private:
  void advance_to(double t, std::vector<EngineOutput>& out);
  void resolve(double t, std::vector<EngineOutput>& out);
  void commit(Judgment j, double t, std::vector<EngineOutput>& out);
  void begin_animation(double t, double from_position);
  void check_clock(double t) const;
  double position_at(double t) const;
  std::optional<double> wall_hit_time() const;

  std::shared_ptr<const CorpusFile> corpus_;
  SessionPlan plan_;
  EngineConfig config_;
  SessionLog log_;

  size_t next_entry_ = 0;
  const SentenceRecord* current_ = nullptr;
  ParserState parser_;
  TrialLog trial_;
  std::optional<Direction> last_side_;
  std::vector<InputEvent> journal_;  // last non-neutral direction in this trial

  Phase phase_ = Phase::Idle;
  Direction held_ = Direction::Neutral;
  double seg_t_ = 0;    // icon segment start (AWAIT_JUDGMENT)
  double seg_pos_ = 0;  // icon position at seg_t_
  double anim_start_ = 0;
  double anim_until_ = 0;
  double anim_from_ = 0;  // icon position when the animation began
  double await_entry_ = 0;
  double last_time_ = 0;
  bool clock_started_ = false;
};

// Rebuilds a session from its recorded inputs. The result's log() equals the
// source log when the source was produced by a Session with the same corpus.
Session replay_session(std::shared_ptr<const CorpusFile> corpus, const SessionLog& log);

// Rebuilds a live session from its first start time and input journal.
Session replay_inputs(std::shared_ptr<const CorpusFile> corpus, const SessionPlan& plan, const EngineConfig& config,
                      const std::string& agent, double first_start, const std::vector<InputEvent>& events);

// ---------------------------------------------------------------------------
// Persistence: JSON Lines, one header, one line per trial, one footer.

class LogSink {
 public:
  virtual ~LogSink() = default;
  virtual void write_line(std::string_view line) = 0;
};

class StreamSink : public LogSink {
 public:
  explicit StreamSink(std::ostream& out) : out_(out) {}
  void write_line(std::string_view line) override;

 private:
  std::ostream& out_;
};

// Appends to a file and flushes after every line.
class FileSink : public LogSink {
 public:
  explicit FileSink(const std::string& path);
  ~FileSink() override;
  FileSink(const FileSink&) = delete;
  FileSink& operator=(const FileSink&) = delete;
  void write_line(std::string_view line) override;

 private:
  std::string path_;
  std::FILE* file_ = nullptr;
};

std::string session_header_line(const SessionLog& log);
std::string trial_line(const TrialLog& trial);
std::string session_footer_line(const SessionLog& log);
// One input event as a JSON object, the same shape as a trial's "events".
std::string input_event_json(const InputEvent& event);
InputEvent parse_input_event_json(std::string_view text);

void persist(const SessionLog& log, LogSink& sink);
std::string serialize_session_log(const SessionLog& log);
SessionLog parse_session_log(std::istream& in, const std::string& source = "<log>");
SessionLog load_session_log(const std::string& path);

// ---------------------------------------------------------------------------
// Bots

struct BotPolicy {
  enum class Kind { Oracle, Noisy, Constant };
  Kind kind = Kind::Oracle;
  double flip_probability = 0;  // Noisy
  std::uint64_t seed = 0;       // Noisy
  Judgment constant = Judgment::Shift;

  static BotPolicy oracle() { return {}; }
  static BotPolicy noisy(double p, std::uint64_t seed) { return {Kind::Noisy, p, seed, Judgment::Shift}; }
  static BotPolicy always(Judgment j) { return {Kind::Constant, 0, 0, j}; }
  std::string label() const;
};

// Synthetic player timing. Think time before each judgment is
// max(min, mean + per_mora * morae + sd * N(0,1)); with probability
// `hesitation_probability` the bot first leans the wrong way briefly.
struct TimingModel {
  double start_ms = 0;
  double think_mean_ms = 700;
  double think_sd_ms = 200;
  double think_min_ms = 120;
  double per_mora_ms = 12;
  double hesitation_probability = 0.15;
  double hesitation_ms = 150;
  double jump_delay_ms = 1200;
  std::uint64_t seed = 0;
};

SessionLog run_bot_session(std::shared_ptr<const CorpusFile> corpus, const SessionPlan& plan,
                           const BotPolicy& policy, const TimingModel& timing = {},
                           const EngineConfig& config = {});

}  // namespace kakari
