#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "kakari/error.hpp"
#include "kakari/rng.hpp"
#include "kakari/transition.hpp"
#include "oracles.hpp"

using namespace kakari;

namespace {

const GoldTree kCtrl{{3, 3, 4, 6, 6, kRoot}};
const GoldTree kEb{{6, 3, 4, 6, 6, kRoot}};
const GoldTree kLb{{6, 6, 4, 6, 6, kRoot}};

std::vector<ActionKind> kinds(const std::vector<ActionRecord>& trace) {
  std::vector<ActionKind> out;
  for (const auto& r : trace) out.push_back(r.kind);
  return out;
}

std::set<Arc> arc_set(const std::vector<Arc>& arcs) { return {arcs.begin(), arcs.end()}; }

constexpr auto DS = ActionKind::DefaultShift;
constexpr auto DR = ActionKind::DefaultReduce;
constexpr auto SH = ActionKind::Shift;
constexpr auto RE = ActionKind::Reduce;
constexpr auto S = Judgment::Shift;
constexpr auto R = Judgment::Reduce;

}  // namespace

TEST_CASE("init_state") {
  const auto st = init_state(6);
  CHECK(st.stack().empty());
  CHECK(st.queue() == std::vector<PhraseIndex>{1, 2, 3, 4, 5, 6});
  CHECK(st.arcs().empty());
  CHECK(st.trace().empty());

  CHECK(init_state(2).queue() == std::vector<PhraseIndex>{1, 2});
  CHECK_THROWS_AS(init_state(1), DegenerateInputError);
  CHECK_THROWS_AS(init_state(0), DegenerateInputError);

  Sentence one{"x", {Phrase{1, "猫", std::nullopt, 1, 2, std::nullopt}}, SentenceType::Filler};
  CHECK_THROWS_AS(init_state(one), DegenerateInputError);
}

TEST_CASE("pending_action dispatch") {
  CHECK(pending_action(init_state(6)).kind == Pending::Kind::DefaultShift);

  const auto reduce_pos = ParserState::from_parts(6, {4, 5}, {6}, {{2, 3}, {1, 3}, {3, 4}});
  CHECK(pending_action(reduce_pos).kind == Pending::Kind::DefaultReduce);

  const auto judged = ParserState::from_parts(6, {1}, {2, 3, 4, 5, 6}, {});
  CHECK(pending_action(judged) == Pending{Pending::Kind::Judged, 1, 2});

  const auto done = ParserState::from_parts(6, {}, {6}, {{1, 6}, {2, 6}, {3, 6}, {4, 6}, {5, 6}});
  CHECK(pending_action(done).kind == Pending::Kind::Terminal);
}

TEST_CASE("apply_automatic") {
  SUBCASE("default shift") {
    const auto st = apply_automatic(init_state(2));
    CHECK(st.stack() == std::vector<PhraseIndex>{1});
    CHECK(st.queue() == std::vector<PhraseIndex>{2});
    CHECK(st.trace().back() == ActionRecord{DS, std::nullopt, 1});
  }
  SUBCASE("default reduce") {
    const auto before = ParserState::from_parts(6, {4, 5}, {6}, {{2, 3}, {1, 3}, {3, 4}});
    const auto st = apply_automatic(before);
    CHECK(st.stack() == std::vector<PhraseIndex>{4});
    CHECK(st.queue() == std::vector<PhraseIndex>{6});
    CHECK(st.arcs().back() == Arc{5, 6});
    CHECK(st.trace().back() == ActionRecord{DR, 5, 6});
    // the input value is untouched
    CHECK(before.stack() == std::vector<PhraseIndex>{4, 5});
  }
  SUBCASE("judged position rejects") {
    const auto st = ParserState::from_parts(3, {1}, {2, 3}, {});
    CHECK_THROWS_AS(apply_automatic(st), InvalidStateError);
  }
  SUBCASE("terminal rejects") {
    const auto st = ParserState::from_parts(2, {}, {2}, {{1, 2}});
    CHECK_THROWS_AS(apply_automatic(st), InvalidStateError);
  }
}

TEST_CASE("apply_judgment") {
  const auto st = ParserState::from_parts(6, {1}, {2, 3, 4, 5, 6}, {});
  const auto shifted = apply_judgment(st, S);
  CHECK(shifted.stack() == std::vector<PhraseIndex>{1, 2});
  CHECK(shifted.queue() == std::vector<PhraseIndex>{3, 4, 5, 6});
  CHECK(shifted.trace().back() == ActionRecord{SH, 1, 2});

  const auto reduced = apply_judgment(shifted, R);
  CHECK(reduced.stack() == std::vector<PhraseIndex>{1});
  CHECK(reduced.queue() == std::vector<PhraseIndex>{3, 4, 5, 6});
  CHECK(reduced.arcs().back() == Arc{2, 3});

  CHECK_THROWS_AS(apply_judgment(init_state(6), S), InvalidStateError);
}

TEST_CASE("oracle_judgment") {
  const auto s1q2 = ParserState::from_parts(6, {1}, {2, 3, 4, 5, 6}, {});
  CHECK(oracle_judgment(s1q2, kCtrl) == S);
  const auto s2q3 = ParserState::from_parts(6, {1, 2}, {3, 4, 5, 6}, {});
  CHECK(oracle_judgment(s2q3, kCtrl) == R);
  const auto s1q3 = ParserState::from_parts(6, {1}, {3, 4, 5, 6}, {{2, 3}});
  CHECK(oracle_judgment(s1q3, kEb) == S);
  CHECK_THROWS_AS(oracle_judgment(init_state(6), kCtrl), InvalidStateError);
}

TEST_CASE("from_parts rejects malformed states") {
  CHECK_THROWS_AS(ParserState::from_parts(4, {2, 1}, {3, 4}, {}), InvalidStateError);
  CHECK_THROWS_AS(ParserState::from_parts(4, {3}, {2, 4}, {{1, 2}}), InvalidStateError);
  CHECK_THROWS_AS(ParserState::from_parts(4, {1}, {2, 3}, {}), InvalidStateError);
  CHECK_THROWS_AS(ParserState::from_parts(3, {1}, {1, 3}, {}), InvalidStateError);
}

TEST_CASE("garden-path oracle runs match the reference simulator") {
  SUBCASE("CTRL") {
    const auto res = run_with_policy(6, oracle_policy(kCtrl));
    CHECK(kinds(res.trace) == std::vector<ActionKind>{DS, SH, RE, RE, DS, RE, DS, SH, DR, DR});
    CHECK(arc_set(res.arcs) == std::set<Arc>{{2, 3}, {1, 3}, {3, 4}, {5, 6}, {4, 6}});
    CHECK(res.counts == ActionCounts{3, 2, 2, 3});
  }
  SUBCASE("EB") {
    const auto res = run_with_policy(6, oracle_policy(kEb));
    CHECK(res.judgments() == std::vector<Judgment>{S, R, S, R, S, S});
    const std::vector<Arc> tail(res.arcs.end() - 3, res.arcs.end());
    CHECK(tail == std::vector<Arc>{{5, 6}, {4, 6}, {1, 6}});
    CHECK(res.counts == ActionCounts{1, 3, 4, 2});
  }
  SUBCASE("LB") {
    const auto res = run_with_policy(6, oracle_policy(kLb));
    CHECK(res.judgments() == std::vector<Judgment>{S, S, R, S, S});
    const std::vector<Arc> tail(res.arcs.end() - 4, res.arcs.end());
    CHECK(tail == std::vector<Arc>{{5, 6}, {4, 6}, {2, 6}, {1, 6}});
    CHECK(res.counts == ActionCounts{1, 4, 4, 1});
  }
  for (const auto& gold : {kCtrl, kEb, kLb}) {
    const auto ref = oracle::reference_oracle_run(gold.heads);
    const auto res = run_with_policy(6, oracle_policy(gold));
    std::vector<std::string> names;
    for (const auto& r : res.trace) names.emplace_back(to_string(r.kind));
    CHECK(names == ref.actions);
  }
}

TEST_CASE("constant SHIFT attaches everything to the last phrase") {
  const auto res = run_with_policy(6, constant_policy(S));
  CHECK(res.trace.size() == 10);
  CHECK(arc_set(res.arcs) == std::set<Arc>{{1, 6}, {2, 6}, {3, 6}, {4, 6}, {5, 6}});
  CHECK_FALSE(is_correct(res.arcs, kCtrl));
}

TEST_CASE("validate_tree") {
  CHECK(validate_tree(kCtrl, 6).ok());
  CHECK(validate_tree(kEb, 6).ok());
  CHECK(validate_tree(kLb, 6).ok());

  const auto leftward = validate_tree(GoldTree{{2, 1, 4, 0}}, 4);
  REQUIRE(leftward.has(TreeCheck::HeadFinal));
  CHECK(leftward.violations.front().phrase == 2);

  const auto crossing = validate_tree(GoldTree{{3, 4, 4, 0}}, 4);
  CHECK(crossing.has(TreeCheck::Projectivity));
  CHECK_FALSE(crossing.has(TreeCheck::HeadFinal));

  // several problems at once are all reported
  const auto many = validate_tree(GoldTree{{0, 1, 2}}, 3);
  CHECK(many.has(TreeCheck::SingleRoot));
  CHECK(many.has(TreeCheck::HeadFinal));

  CHECK(validate_tree(GoldTree{{2, 0}}, 3).has(TreeCheck::Length));
  CHECK(validate_tree(GoldTree{{9, 0}}, 2).has(TreeCheck::HeadRange));
}

TEST_CASE("is_correct") {
  CHECK(is_correct(run_with_policy(6, oracle_policy(kLb)).arcs, kLb));
  CHECK(is_correct(run_with_policy(2, constant_policy(R)).arcs, GoldTree{{2, 0}}));
  CHECK(run_with_policy(2, constant_policy(R)).counts == ActionCounts{1, 1, 0, 0});
  CHECK_THROWS_AS(is_correct({{1, 2}}, kCtrl), InvalidComparisonError);
}

TEST_CASE("random policies obey the action-count law") {
  Rng rng(20240601);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(9));
    const std::uint64_t seed = rng.next();
    Rng local(seed);
    auto policy = [&local](const ParserState& st) {
      // monotone position invariant holds at every judged state
      REQUIRE(st.stack().back() < st.queue().front());
      return local.bernoulli(0.5) ? R : S;
    };
    const auto res = run_with_policy(n, policy);
    REQUIRE(static_cast<int>(res.trace.size()) == 2 * (n - 1));
    REQUIRE(static_cast<int>(res.arcs.size()) == n - 1);
    REQUIRE(res.counts.default_shift + res.counts.shift == n - 1);
    REQUIRE(res.counts.default_reduce + res.counts.reduce == n - 1);
    REQUIRE(validate_tree(tree_from_arcs(res.arcs, n), n).ok());
    REQUIRE(res.trace.front().kind == DS);

    // a DEFAULT_SHIFT follows exactly those REDUCEs that empty the stack
    ParserState st = init_state(n);
    for (const auto& rec : res.trace) {
      const bool stack_was_empty = st.stack().empty();
      REQUIRE((rec.kind == DS) == stack_was_empty);
      st = is_judged(rec.kind) ? apply_judgment(st, rec.kind == SH ? S : R) : apply_automatic(st);
      REQUIRE(static_cast<int>(st.arcs().size() + st.stack().size() + st.queue().size()) == n);
    }

    // determinism
    Rng again(seed);
    auto replay = [&again](const ParserState&) { return again.bernoulli(0.5) ? R : S; };
    REQUIRE(run_with_policy(n, replay).trace == res.trace);
  }
}

TEST_CASE("tree enumerators agree and give Catalan counts") {
  for (int n = 2; n <= 7; ++n) {
    auto built = oracle::enumerate_head_final_projective(n);
    auto brute = oracle::brute_force_head_final_projective(n);
    std::sort(built.begin(), built.end());
    std::sort(brute.begin(), brute.end());
    CHECK(static_cast<long>(built.size()) == oracle::catalan(n - 1));
    CHECK(built == brute);
  }
}

TEST_CASE("oracle reproduces every head-final projective tree") {
  for (int n = 2; n <= 6; ++n) {
    for (const auto& heads : oracle::enumerate_head_final_projective(n)) {
      const GoldTree gold{heads};
      REQUIRE(validate_tree(gold, n).ok());
      const auto res = run_with_policy(n, oracle_policy(gold));
      REQUIRE(tree_from_arcs(res.arcs, n) == gold);
      REQUIRE(is_correct(res.arcs, gold));
    }
  }
}
