#include <algorithm>
#include <cmath>

#include "kakari/error.hpp"
#include "kakari/session.hpp"

namespace kakari {

ActionCounts TrialLog::counts() const {
  ActionCounts c;
  for (const auto& a : actions) {
    switch (a.kind) {
      case ActionKind::DefaultShift: ++c.default_shift; break;
      case ActionKind::DefaultReduce: ++c.default_reduce; break;
      case ActionKind::Shift: ++c.shift; break;
      case ActionKind::Reduce: ++c.reduce; break;
    }
  }
  return c;
}

double TrialLog::judged_response_ms() const {
  double total = 0;
  for (const auto& a : actions)
    if (a.response_ms) total += *a.response_ms;
  return total;
}

namespace {

double sign_of(Direction d) {
  return d == Direction::Right ? 1.0 : d == Direction::Left ? -1.0 : 0.0;
}

}  // namespace

Session::Session(std::shared_ptr<const CorpusFile> corpus, SessionPlan plan, EngineConfig config, std::string agent)
    : corpus_(std::move(corpus)), plan_(std::move(plan)), config_(config) {
  config_.validate();
  if (!corpus_) throw InvalidStateError("session needs a corpus");
  for (const auto& e : plan_.entries) {
    const auto& rec = corpus_->at(e.sentence_id);
    if (rec.sentence.size() < 2)
      throw DegenerateInputError("planned sentence '" + e.sentence_id + "' has fewer than 2 phrases");
  }
  log_.subject_id = plan_.subject_id;
  log_.seed = plan_.seed;
  log_.agent = std::move(agent);
  log_.practice = plan_.practice;
  log_.config = config_;
  log_.plan = plan_.entries;
}

void Session::check_clock(double t) const {
  if (clock_started_ && t < last_time_) {
    throw ClockError("timestamp " + std::to_string(t) + " is earlier than " + std::to_string(last_time_));
  }
}

std::vector<EngineOutput> Session::start_trial(double now) {
  if (finished()) throw InvalidStateError("session is finished");
  if (phase_ != Phase::Idle) throw InvalidStateError("a trial is already active");
  if (next_entry_ >= plan_.entries.size()) throw InvalidStateError("plan exhausted");
  check_clock(now);
  clock_started_ = true;
  last_time_ = now;

  const PlanEntry& entry = plan_.entries[next_entry_];
  current_ = &corpus_->at(entry.sentence_id);
  parser_ = init_state(current_->sentence);

  trial_ = TrialLog{};
  trial_.sentence_id = entry.sentence_id;
  trial_.category = current_->type();
  trial_.block = entry.block;
  trial_.presentation_order = static_cast<int>(next_entry_) + 1;
  trial_.phrases = current_->sentence.size();
  trial_.morae = current_->sentence.total_morae();
  trial_.chars = current_->sentence.total_chars();
  trial_.started_at = now;
  last_side_.reset();
  held_ = Direction::Neutral;
  seg_t_ = now;
  seg_pos_ = 0;

  std::vector<EngineOutput> out;
  out.push_back({OutputKind::TrialStarted, now, std::nullopt, Phase::Idle, std::nullopt, std::nullopt, entry.sentence_id});
  resolve(now, out);
  return out;
}

void Session::resolve(double t, std::vector<EngineOutput>& out) {
  const Pending p = pending_action(parser_);
  switch (p.kind) {
    case Pending::Kind::DefaultShift:
    case Pending::Kind::DefaultReduce: {
      const auto before_s = parser_.stack().empty() ? std::optional<PhraseIndex>{} : parser_.stack().back();
      const PhraseIndex q = parser_.queue().front();
      parser_ = apply_automatic(parser_);
      ActionLog a{parser_.trace().back().kind, before_s, q, t, std::nullopt};
      trial_.actions.push_back(a);
      out.push_back({OutputKind::ActionCommitted, t, a, Phase::AutoAction, std::nullopt, std::nullopt, {}});
      begin_animation(t, 0.0);
      out.push_back({OutputKind::Animating, t, std::nullopt, Phase::Animating, anim_until_, std::nullopt, {}});
      return;
    }
    case Pending::Kind::Judged:
      phase_ = Phase::AwaitJudgment;
      await_entry_ = t;
      seg_t_ = t;
      seg_pos_ = 0;
      out.push_back({OutputKind::AwaitJudgment, t, std::nullopt, Phase::AwaitJudgment, std::nullopt, std::nullopt, {}});
      return;
    case Pending::Kind::Terminal: {
      const GoldTree& gold = current_->gold;
      trial_.arcs = parser_.arcs();
      trial_.verdict = is_correct(parser_.arcs(), gold) ? Verdict::Ok : Verdict::Ng;
      trial_.done_at = t;
      phase_ = Phase::TrialDone;
      out.push_back({OutputKind::Verdict, t, std::nullopt, Phase::TrialDone, std::nullopt, trial_.verdict, {}});
      return;
    }
  }
}

void Session::begin_animation(double t, double from_position) {
  phase_ = Phase::Animating;
  anim_start_ = t;
  anim_until_ = t + config_.animation_ms;
  anim_from_ = from_position;
}

void Session::commit(Judgment j, double t, std::vector<EngineOutput>& out) {
  const Pending p = pending_action(parser_);
  parser_ = apply_judgment(parser_, j);
  ActionLog a{to_action(j), p.s, p.q, t, t - await_entry_};
  trial_.actions.push_back(a);
  out.push_back({OutputKind::ActionCommitted, t, a, Phase::Animating, std::nullopt, std::nullopt, {}});
  begin_animation(t, j == Judgment::Reduce ? 1.0 : -1.0);
  out.push_back({OutputKind::Animating, t, std::nullopt, Phase::Animating, anim_until_, std::nullopt, {}});
}

std::optional<double> Session::wall_hit_time() const {
  if (phase_ != Phase::AwaitJudgment || config_.commit_mode != CommitMode::Analog || held_ == Direction::Neutral)
    return std::nullopt;
  const double progress = sign_of(held_) * seg_pos_;
  return seg_t_ + (1.0 - progress) / (config_.icon_speed / 1000.0);
}

std::optional<double> Session::next_deadline() const {
  if (phase_ == Phase::Animating) return anim_until_;
  return wall_hit_time();
}

double Session::position_at(double t) const {
  switch (phase_) {
    case Phase::AwaitJudgment: {
      const double dt = std::max(0.0, t - seg_t_);
      if (held_ == Direction::Neutral) {
        const double drift = config_.drift_speed / 1000.0 * dt;
        return seg_pos_ > 0 ? std::max(0.0, seg_pos_ - drift) : std::min(0.0, seg_pos_ + drift);
      }
      return std::clamp(seg_pos_ + sign_of(held_) * config_.icon_speed / 1000.0 * dt, -1.0, 1.0);
    }
    case Phase::Animating: {
      const double frac = std::clamp((t - anim_start_) / config_.animation_ms, 0.0, 1.0);
      return anim_from_ * (1.0 - frac);
    }
    default:
      return 0.0;
  }
}

void Session::advance_to(double t, std::vector<EngineOutput>& out) {
  for (;;) {
    if (const auto hit = wall_hit_time(); hit && *hit <= t) {
      commit(held_ == Direction::Right ? Judgment::Reduce : Judgment::Shift, *hit, out);
      continue;
    }
    if (phase_ == Phase::Animating && anim_until_ <= t) {
      resolve(anim_until_, out);
      continue;
    }
    break;
  }
  last_time_ = std::max(last_time_, t);
}

std::vector<EngineOutput> Session::feed_input(const InputEvent& ev) {
  if (finished()) throw InvalidStateError("session is finished");
  if (phase_ == Phase::Idle) throw InvalidStateError("no active trial");
  check_clock(ev.t_ms);

  std::vector<EngineOutput> out;
  advance_to(ev.t_ms, out);
  trial_.events.push_back(ev);
  journal_.push_back(ev);

  if (ev.kind == InputEvent::Kind::Jump) {
    if (phase_ != Phase::TrialDone) {
      out.push_back({OutputKind::InputIgnored, ev.t_ms, std::nullopt, phase_, std::nullopt, std::nullopt,
                     "jump only advances from the verdict screen"});
      return out;
    }
    finish_trial(ev.t_ms);
    if (complete()) {
      out.push_back({OutputKind::SessionDone, ev.t_ms, std::nullopt, Phase::SessionDone, std::nullopt,
                     std::nullopt, {}});
    } else {
      auto more = start_trial(ev.t_ms);
      out.insert(out.end(), more.begin(), more.end());
    }
    return out;
  }

  const Direction d = ev.direction;
  if (d != Direction::Neutral) {
    if (last_side_ && *last_side_ != d) ++trial_.direction_alternations;
    last_side_ = d;
  }
  if (phase_ == Phase::AwaitJudgment) {
    seg_pos_ = position_at(ev.t_ms);
    seg_t_ = ev.t_ms;
    held_ = d;
    if (config_.commit_mode == CommitMode::Instant && d != Direction::Neutral) {
      commit(d == Direction::Right ? Judgment::Reduce : Judgment::Shift, ev.t_ms, out);
    }
    advance_to(ev.t_ms, out);
  } else {
    held_ = d;
    out.push_back({OutputKind::InputIgnored, ev.t_ms, std::nullopt, phase_, std::nullopt, std::nullopt,
                   phase_ == Phase::Animating ? "input is inert during animation" : "no judgment pending"});
  }
  return out;
}

std::vector<EngineOutput> Session::tick(double now) {
  std::vector<EngineOutput> out;
  if (finished() || phase_ == Phase::Idle || now <= last_time_) return out;
  advance_to(now, out);
  return out;
}

TrialLog Session::finish_trial(double now) {
  if (phase_ != Phase::TrialDone) throw InvalidStateError("trial is not finished");
  check_clock(now);
  last_time_ = now;
  trial_.ended_at = now;
  log_.trials.push_back(trial_);
  ++next_entry_;
  phase_ = Phase::Idle;
  current_ = nullptr;
  if (next_entry_ == plan_.entries.size()) {
    log_.status = SessionStatus::Complete;
    log_.ended_at = now;
    phase_ = Phase::SessionDone;
  }
  return log_.trials.back();
}

void Session::abort(double now) {
  if (finished()) throw InvalidStateError("session is finished");
  check_clock(now);
  last_time_ = now;
  log_.status = SessionStatus::Aborted;
  log_.ended_at = now;
  phase_ = Phase::SessionDone;
  current_ = nullptr;
}

IconState Session::icon() const {
  IconState s;
  s.position = position_at(last_time_);
  s.direction_held = held_;
  s.phase = phase_;
  return s;
}

EngineView Session::view() const {
  EngineView v;
  v.icon = icon();
  v.trial_count = static_cast<int>(plan_.entries.size());
  v.at = last_time_;
  if (current_) {
    v.sentence_id = current_->id();
    for (const auto& p : current_->sentence.phrases) v.phrases.push_back(p.surface);
    v.stack = parser_.stack();
    v.queue = parser_.queue();
    v.arcs = parser_.arcs();
    v.trial_number = static_cast<int>(next_entry_) + 1;
    if (phase_ == Phase::TrialDone) v.verdict = trial_.verdict;
  } else {
    v.trial_number = static_cast<int>(next_entry_);
  }
  return v;
}

Session replay_inputs(std::shared_ptr<const CorpusFile> corpus, const SessionPlan& plan, const EngineConfig& config,
                      const std::string& agent, double first_start, const std::vector<InputEvent>& events) {
  Session s(std::move(corpus), plan, config, agent);
  s.start_trial(first_start);
  for (const auto& ev : events) s.feed_input(ev);
  return s;
}

Session replay_session(std::shared_ptr<const CorpusFile> corpus, const SessionLog& log) {
  Session s(std::move(corpus), SessionPlan{log.subject_id, log.seed, log.practice, log.plan}, log.config, log.agent);
  for (size_t i = 0; i < log.trials.size(); ++i) {
    const TrialLog& trial = log.trials[i];
    if (s.phase() == Phase::Idle) s.start_trial(trial.started_at);
    for (const auto& ev : trial.events) s.feed_input(ev);
    if (s.log().trials.size() == i && s.phase() == Phase::TrialDone) s.finish_trial(trial.ended_at);
  }
  if (log.status == SessionStatus::Aborted && log.ended_at) s.abort(*log.ended_at);
  return s;
}

}  // namespace kakari
