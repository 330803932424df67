#pragma once

// Shift-reduce-like transition system for head-final (Japanese bunsetsu)
// dependency parsing.
//
// The state is <stack, queue, arcs>. At every step exactly one of four
// actions applies:
//
//   stack empty, |queue| >= 2      DEFAULT_SHIFT  (automatic)
//   stack non-empty, |queue| == 1  DEFAULT_REDUCE (automatic, attach s -> q)
//   otherwise                      SHIFT or REDUCE (judged on s = top, q = front)
//
// Parsing stops when the stack is empty and only the last phrase is queued.
// Every run performs exactly 2(N-1) actions: each phrase but the last is
// shifted once and attached once.

#include <array>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "kakari/sentence.hpp"
#include "kakari/tree.hpp"

namespace kakari {

enum class ActionKind { DefaultShift, DefaultReduce, Shift, Reduce };
enum class Judgment { Shift, Reduce };

std::string_view to_string(ActionKind k);
std::string_view to_string(Judgment j);
ActionKind action_kind_from_string(std::string_view s);
Judgment judgment_from_string(std::string_view s);

inline bool is_judged(ActionKind k) { return k == ActionKind::Shift || k == ActionKind::Reduce; }
inline ActionKind to_action(Judgment j) {
  return j == Judgment::Shift ? ActionKind::Shift : ActionKind::Reduce;
}

struct ActionRecord {
  ActionKind kind = ActionKind::DefaultShift;
  std::optional<PhraseIndex> stack_top_before;  // absent for DEFAULT_SHIFT
  PhraseIndex queue_front_before = 0;

  bool operator==(const ActionRecord&) const = default;
};

struct Pending {
  enum class Kind { DefaultShift, DefaultReduce, Judged, Terminal };
  Kind kind = Kind::Terminal;
  PhraseIndex s = 0;  // set when Judged
  PhraseIndex q = 0;  // set when Judged

  bool automatic() const { return kind == Kind::DefaultShift || kind == Kind::DefaultReduce; }
  bool operator==(const Pending&) const = default;
};

// Immutable value; transitions return a new state.
class ParserState {
 public:
  ParserState() = default;

  int size() const { return n_; }
  const std::vector<PhraseIndex>& stack() const { return stack_; }
  const std::vector<PhraseIndex>& queue() const { return queue_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<ActionRecord>& trace() const { return trace_; }

  bool operator==(const ParserState&) const = default;

  // Test hook: builds an arbitrary state. Throws InvalidStateError when the
  // parts violate the ordering or partition invariants.
  static ParserState from_parts(int n, std::vector<PhraseIndex> stack,
                                std::vector<PhraseIndex> queue, std::vector<Arc> arcs);

 private:
  friend ParserState init_state(int n);
  friend ParserState apply_automatic(const ParserState& state);
  friend ParserState apply_judgment(const ParserState& state, Judgment j);

  int n_ = 0;
  std::vector<PhraseIndex> stack_;  // top = back
  std::vector<PhraseIndex> queue_;  // front = front
  std::vector<Arc> arcs_;           // in attachment order
  std::vector<ActionRecord> trace_;
};

// Throws DegenerateInputError when n < 2.
ParserState init_state(int n);
ParserState init_state(const Sentence& sentence);

Pending pending_action(const ParserState& state);

// Throws InvalidStateError unless the pending action is automatic.
ParserState apply_automatic(const ParserState& state);

// Throws InvalidStateError unless the pending action is judged.
ParserState apply_judgment(const ParserState& state, Judgment j);

// REDUCE iff the gold head of s is q.
Judgment oracle_judgment(const ParserState& state, const GoldTree& gold);

using Policy = std::function<Judgment(const ParserState&)>;

struct ActionCounts {
  int default_shift = 0;
  int default_reduce = 0;
  int shift = 0;
  int reduce = 0;

  int total() const { return default_shift + default_reduce + shift + reduce; }
  bool operator==(const ActionCounts&) const = default;
};

ActionCounts count_actions(const std::vector<ActionRecord>& trace);

struct ParseResult {
  std::vector<Arc> arcs;
  std::vector<ActionRecord> trace;
  ActionCounts counts;

  std::vector<Judgment> judgments() const;
};

ParseResult run_with_policy(int n, const Policy& policy);
ParseResult run_with_policy(const Sentence& sentence, const Policy& policy);

Policy oracle_policy(const GoldTree& gold);
Policy constant_policy(Judgment j);

}  // namespace kakari
