#include <algorithm>
#include <sstream>

#include "kakari/error.hpp"
#include "kakari/rng.hpp"
#include "kakari/session.hpp"

namespace kakari {

std::string BotPolicy::label() const {
  std::ostringstream s;
  switch (kind) {
    case Kind::Oracle: s << "bot:oracle"; break;
    case Kind::Noisy: s << "bot:noisy(p=" << flip_probability << ",seed=" << seed << ")"; break;
    case Kind::Constant: s << "bot:constant(" << to_string(constant) << ")"; break;
  }
  return s.str();
}

namespace {

Direction direction_for(Judgment j) { return j == Judgment::Shift ? Direction::Left : Direction::Right; }
Judgment flip(Judgment j) { return j == Judgment::Shift ? Judgment::Reduce : Judgment::Shift; }

}  // namespace

SessionLog run_bot_session(std::shared_ptr<const CorpusFile> corpus, const SessionPlan& plan,
                           const BotPolicy& policy, const TimingModel& timing, const EngineConfig& config) {
  Session session(std::move(corpus), plan, config, policy.label());
  Rng flips(policy.seed);
  Rng clock(timing.seed);

  auto decide = [&](const ParserState& st, const GoldTree& gold) {
    switch (policy.kind) {
      case BotPolicy::Kind::Oracle: return oracle_judgment(st, gold);
      case BotPolicy::Kind::Noisy: {
        const Judgment j = oracle_judgment(st, gold);
        return flips.bernoulli(policy.flip_probability) ? flip(j) : j;
      }
      case BotPolicy::Kind::Constant: return policy.constant;
    }
    return Judgment::Shift;
  };

  if (plan.entries.empty()) return session.log();
  session.start_trial(timing.start_ms);
  while (!session.finished()) {
    switch (session.phase()) {
      case Phase::Animating:
        session.tick(*session.next_deadline());
        break;
      case Phase::AwaitJudgment: {
        const SentenceRecord& rec = *session.current_record();
        const Judgment j = decide(session.parser(), rec.gold);
        const double think = std::max(timing.think_min_ms, timing.think_mean_ms +
                                                                timing.per_mora_ms * rec.sentence.total_morae() +
                                                                timing.think_sd_ms * clock.normal());
        double t = session.await_entry_time() + think;
        if (clock.bernoulli(timing.hesitation_probability)) {
          session.feed_input(InputEvent::dir(t, direction_for(flip(j))));
          t += timing.hesitation_ms;
        }
        session.feed_input(InputEvent::dir(t, direction_for(j)));
        const auto hit = session.next_deadline();
        if (!hit) throw InvalidStateError("bot input did not start the icon moving");
        session.tick(*hit);
        session.feed_input(InputEvent::dir(*hit, Direction::Neutral));
        break;
      }
      case Phase::TrialDone:
        session.feed_input(InputEvent::jump(session.last_time() + timing.jump_delay_ms));
        break;
      default:
        throw InvalidStateError("bot reached unexpected phase " + std::string(to_string(session.phase())));
    }
  }
  return session.log();
}

}  // namespace kakari
