#include <algorithm>
#include <string>

#include "kakari/error.hpp"
#include "kakari/rng.hpp"
#include "kakari/session.hpp"

namespace kakari {

namespace {

std::vector<std::string> ids_of(const CorpusFile& corpus, SentenceType t) {
  std::vector<std::string> ids;
  for (const auto& r : corpus.records)
    if (r.type() == t) ids.push_back(r.id());
  return ids;
}

void require(const std::vector<std::string>& ids, int needed, SentenceType t) {
  if (static_cast<int>(ids.size()) < needed) {
    throw InsufficientCorpusError("need " + std::to_string(needed) + " " + std::string(to_string(t)) +
                                  " sentences, corpus has " + std::to_string(ids.size()));
  }
}

}  // namespace

SessionPlan build_plan(const CorpusFile& corpus, std::string subject_id, std::uint64_t seed,
                       const PlanCounts& counts) {
  auto fillers = ids_of(corpus, SentenceType::Filler);
  require(fillers, counts.fillers(), SentenceType::Filler);
  std::vector<std::vector<std::string>> gp;
  for (auto t : kGardenPathTypes) {
    gp.push_back(ids_of(corpus, t));
    require(gp.back(), counts.per_gp_type, t);
  }

  Rng rng(seed);
  rng.shuffle(std::span<std::string>(fillers));
  for (auto& ids : gp) rng.shuffle(std::span<std::string>(ids));

  SessionPlan plan{std::move(subject_id), seed, false, {}};
  auto take = fillers.begin();
  for (int i = 0; i < counts.block1_fillers; ++i) plan.entries.push_back({*take++, Block::Block1});

  std::vector<PlanEntry> middle;
  for (int i = 0; i < counts.block2_fillers; ++i) middle.push_back({*take++, Block::Block2});
  for (const auto& ids : gp)
    for (int i = 0; i < counts.per_gp_type; ++i) middle.push_back({ids[static_cast<size_t>(i)], Block::Block2});
  rng.shuffle(std::span<PlanEntry>(middle));
  plan.entries.insert(plan.entries.end(), middle.begin(), middle.end());

  for (int i = 0; i < counts.block3_fillers; ++i) plan.entries.push_back({*take++, Block::Block3});
  return plan;
}

SessionPlan build_practice_plan(const CorpusFile& corpus, std::string subject_id, std::uint64_t seed, int count) {
  auto fillers = ids_of(corpus, SentenceType::Filler);
  require(fillers, count, SentenceType::Filler);
  Rng rng(seed);
  rng.shuffle(std::span<std::string>(fillers));
  SessionPlan plan{std::move(subject_id), seed, true, {}};
  for (int i = 0; i < count; ++i) plan.entries.push_back({fillers[static_cast<size_t>(i)], Block::Practice});
  return plan;
}

}  // namespace kakari
