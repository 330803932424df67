#include <string>

#include "kakari/error.hpp"
#include "kakari/session.hpp"

namespace kakari {

std::string_view to_string(Block b) {
  switch (b) {
    case Block::Block1: return "BLOCK1";
    case Block::Block2: return "BLOCK2";
    case Block::Block3: return "BLOCK3";
    case Block::Practice: return "PRACTICE";
  }
  return "BLOCK1";
}

Block block_from_string(std::string_view s) {
  if (s == "BLOCK1") return Block::Block1;
  if (s == "BLOCK2") return Block::Block2;
  if (s == "BLOCK3") return Block::Block3;
  if (s == "PRACTICE") return Block::Practice;
  throw ParseError("unknown block '" + std::string(s) + "'");
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::Left: return "LEFT";
    case Direction::Neutral: return "NEUTRAL";
    case Direction::Right: return "RIGHT";
  }
  return "NEUTRAL";
}

Direction direction_from_string(std::string_view s) {
  if (s == "LEFT") return Direction::Left;
  if (s == "NEUTRAL") return Direction::Neutral;
  if (s == "RIGHT") return Direction::Right;
  throw ParseError("unknown direction '" + std::string(s) + "'");
}

std::string_view to_string(CommitMode m) { return m == CommitMode::Analog ? "analog" : "instant"; }

CommitMode commit_mode_from_string(std::string_view s) {
  if (s == "analog") return CommitMode::Analog;
  if (s == "instant") return CommitMode::Instant;
  throw ConfigError("unknown commit mode '" + std::string(s) + "'");
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Idle: return "IDLE";
    case Phase::AwaitJudgment: return "AWAIT_JUDGMENT";
    case Phase::Animating: return "ANIMATING";
    case Phase::AutoAction: return "AUTO_ACTION";
    case Phase::TrialDone: return "TRIAL_DONE";
    case Phase::SessionDone: return "SESSION_DONE";
  }
  return "IDLE";
}

std::string_view to_string(Verdict v) { return v == Verdict::Ok ? "OK" : "NG"; }

Verdict verdict_from_string(std::string_view s) {
  if (s == "OK") return Verdict::Ok;
  if (s == "NG") return Verdict::Ng;
  throw ParseError("unknown verdict '" + std::string(s) + "'");
}

std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::InProgress: return "in_progress";
    case SessionStatus::Complete: return "complete";
    case SessionStatus::Aborted: return "aborted";
  }
  return "in_progress";
}

std::string_view to_string(OutputKind k) {
  switch (k) {
    case OutputKind::TrialStarted: return "trial_started";
    case OutputKind::ActionCommitted: return "action_committed";
    case OutputKind::Animating: return "animating";
    case OutputKind::AwaitJudgment: return "await_judgment";
    case OutputKind::Verdict: return "verdict";
    case OutputKind::SessionDone: return "session_done";
    case OutputKind::InputIgnored: return "input_ignored";
  }
  return "input_ignored";
}

void EngineConfig::validate() const {
  if (!(animation_ms >= kMinAnimationMs && animation_ms <= kMaxAnimationMs)) {
    throw ConfigError("animation_ms must lie in [820, 860], got " + std::to_string(animation_ms));
  }
  if (!(icon_speed > 0)) throw ConfigError("icon_speed must be positive");
  if (!(drift_speed > 0)) throw ConfigError("drift_speed must be positive");
}

}  // namespace kakari
