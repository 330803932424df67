#include "kakari/transition.hpp"

#include <algorithm>
#include <string>

#include "kakari/error.hpp"

namespace kakari {

std::string_view to_string(ActionKind k) {
  switch (k) {
    case ActionKind::DefaultShift: return "DEFAULT_SHIFT";
    case ActionKind::DefaultReduce: return "DEFAULT_REDUCE";
    case ActionKind::Shift: return "SHIFT";
    case ActionKind::Reduce: return "REDUCE";
  }
  return "SHIFT";
}

std::string_view to_string(Judgment j) { return j == Judgment::Shift ? "SHIFT" : "REDUCE"; }

ActionKind action_kind_from_string(std::string_view s) {
  if (s == "DEFAULT_SHIFT") return ActionKind::DefaultShift;
  if (s == "DEFAULT_REDUCE") return ActionKind::DefaultReduce;
  if (s == "SHIFT") return ActionKind::Shift;
  if (s == "REDUCE") return ActionKind::Reduce;
  throw ParseError("unknown action kind '" + std::string(s) + "'");
}

Judgment judgment_from_string(std::string_view s) {
  if (s == "SHIFT") return Judgment::Shift;
  if (s == "REDUCE") return Judgment::Reduce;
  throw ParseError("unknown judgment '" + std::string(s) + "'");
}

ParserState ParserState::from_parts(int n, std::vector<PhraseIndex> stack,
                                    std::vector<PhraseIndex> queue, std::vector<Arc> arcs) {
  if (n < 2) throw DegenerateInputError("sentence must have at least 2 phrases");
  if (static_cast<int>(stack.size() + queue.size() + arcs.size()) != n)
    throw InvalidStateError("|stack| + |queue| + |arcs| must equal N");
  if (queue.empty()) throw InvalidStateError("queue is never empty");
  if (!std::is_sorted(stack.begin(), stack.end()) || !std::is_sorted(queue.begin(), queue.end()) ||
      std::adjacent_find(stack.begin(), stack.end()) != stack.end() ||
      std::adjacent_find(queue.begin(), queue.end()) != queue.end())
    throw InvalidStateError("stack and queue must be strictly increasing");
  if (!stack.empty() && stack.back() >= queue.front())
    throw InvalidStateError("stack top must precede queue front");

  std::vector<int> seen(static_cast<size_t>(n) + 1, 0);
  for (PhraseIndex i : stack) {
    if (i < 1 || i > n) throw InvalidStateError("stack index out of range");
    ++seen[static_cast<size_t>(i)];
  }
  for (PhraseIndex i : queue) {
    if (i < 1 || i > n) throw InvalidStateError("queue index out of range");
    ++seen[static_cast<size_t>(i)];
  }
  for (const Arc& a : arcs) {
    if (a.dependent < 1 || a.dependent > n || a.head <= a.dependent || a.head > n)
      throw InvalidStateError("arc out of range or not head-final");
    ++seen[static_cast<size_t>(a.dependent)];
  }
  for (int i = 1; i <= n; ++i) {
    if (seen[static_cast<size_t>(i)] != 1)
      throw InvalidStateError("phrase " + std::to_string(i) + " must appear exactly once");
  }

  ParserState st;
  st.n_ = n;
  st.stack_ = std::move(stack);
  st.queue_ = std::move(queue);
  st.arcs_ = std::move(arcs);
  return st;
}

ParserState init_state(int n) {
  if (n < 2) {
    throw DegenerateInputError("sentence must have at least 2 phrases, got " + std::to_string(n));
  }
  ParserState st;
  st.n_ = n;
  st.queue_.reserve(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i) st.queue_.push_back(i);
  return st;
}

ParserState init_state(const Sentence& sentence) {
  if (sentence.size() < 2) {
    throw DegenerateInputError("sentence '" + sentence.id + "' must have at least 2 phrases");
  }
  return init_state(sentence.size());
}

Pending pending_action(const ParserState& state) {
  const bool stack_empty = state.stack().empty();
  const size_t queued = state.queue().size();
  if (stack_empty && queued <= 1) return {Pending::Kind::Terminal};
  if (stack_empty) return {Pending::Kind::DefaultShift};
  if (queued == 1) return {Pending::Kind::DefaultReduce};
  return {Pending::Kind::Judged, state.stack().back(), state.queue().front()};
}

ParserState apply_automatic(const ParserState& state) {
  const Pending p = pending_action(state);
  ParserState next = state;
  switch (p.kind) {
    case Pending::Kind::DefaultShift: {
      const PhraseIndex q = next.queue_.front();
      next.trace_.push_back({ActionKind::DefaultShift, std::nullopt, q});
      next.queue_.erase(next.queue_.begin());
      next.stack_.push_back(q);
      return next;
    }
    case Pending::Kind::DefaultReduce: {
      const PhraseIndex s = next.stack_.back();
      const PhraseIndex q = next.queue_.front();
      next.trace_.push_back({ActionKind::DefaultReduce, s, q});
      next.stack_.pop_back();
      next.arcs_.push_back({s, q});
      return next;
    }
    case Pending::Kind::Judged:
      throw InvalidStateError("automatic action requested at a judged position");
    case Pending::Kind::Terminal:
      throw InvalidStateError("automatic action requested on a terminal state");
  }
  return next;
}

ParserState apply_judgment(const ParserState& state, Judgment j) {
  const Pending p = pending_action(state);
  if (p.kind != Pending::Kind::Judged) {
    throw InvalidStateError("judgment " + std::string(to_string(j)) + " requested outside a judged position");
  }
  ParserState next = state;
  next.trace_.push_back({to_action(j), p.s, p.q});
  if (j == Judgment::Reduce) {
    next.stack_.pop_back();
    next.arcs_.push_back({p.s, p.q});
  } else {
    next.queue_.erase(next.queue_.begin());
    next.stack_.push_back(p.q);
  }
  return next;
}

Judgment oracle_judgment(const ParserState& state, const GoldTree& gold) {
  const Pending p = pending_action(state);
  if (p.kind != Pending::Kind::Judged) {
    throw InvalidStateError("oracle consulted outside a judged position");
  }
  return gold.head_of(p.s) == p.q ? Judgment::Reduce : Judgment::Shift;
}

ActionCounts count_actions(const std::vector<ActionRecord>& trace) {
  ActionCounts c;
  for (const auto& r : trace) {
    switch (r.kind) {
      case ActionKind::DefaultShift: ++c.default_shift; break;
      case ActionKind::DefaultReduce: ++c.default_reduce; break;
      case ActionKind::Shift: ++c.shift; break;
      case ActionKind::Reduce: ++c.reduce; break;
    }
  }
  return c;
}

std::vector<Judgment> ParseResult::judgments() const {
  std::vector<Judgment> out;
  for (const auto& r : trace) {
    if (r.kind == ActionKind::Shift) out.push_back(Judgment::Shift);
    if (r.kind == ActionKind::Reduce) out.push_back(Judgment::Reduce);
  }
  return out;
}

ParseResult run_with_policy(int n, const Policy& policy) {
  ParserState st = init_state(n);
  for (;;) {
    const Pending p = pending_action(st);
    if (p.kind == Pending::Kind::Terminal) break;
    st = p.automatic() ? apply_automatic(st) : apply_judgment(st, policy(st));
  }
  return {st.arcs(), st.trace(), count_actions(st.trace())};
}

ParseResult run_with_policy(const Sentence& sentence, const Policy& policy) {
  if (sentence.size() < 2) {
    throw DegenerateInputError("sentence '" + sentence.id + "' must have at least 2 phrases");
  }
  return run_with_policy(sentence.size(), policy);
}

Policy oracle_policy(const GoldTree& gold) {
  return [gold](const ParserState& st) { return oracle_judgment(st, gold); };
}

Policy constant_policy(Judgment j) {
  return [j](const ParserState&) { return j; };
}

}  // namespace kakari
