#pragma once

#include <compare>
#include <string>
#include <vector>

#include "kakari/sentence.hpp"

namespace kakari {

// Dependency stored dependent -> head. Head-final trees always have
// dependent < head.
struct Arc {
  PhraseIndex dependent = 0;
  PhraseIndex head = 0;

  auto operator<=>(const Arc&) const = default;
};

// heads[i-1] is the head of phrase i; the last phrase carries kRoot.
struct GoldTree {
  std::vector<PhraseIndex> heads;

  int size() const { return static_cast<int>(heads.size()); }
  PhraseIndex head_of(PhraseIndex i) const { return heads.at(static_cast<size_t>(i - 1)); }
  // Non-root arcs, sorted by dependent.
  std::vector<Arc> arcs() const;

  bool operator==(const GoldTree&) const = default;
};

enum class TreeCheck { Length, HeadRange, HeadFinal, SingleRoot, Projectivity };

struct TreeViolation {
  TreeCheck check;
  PhraseIndex phrase;  // offending phrase (or 0 when not phrase-specific)
  std::string message;
};

struct ValidityReport {
  std::vector<TreeViolation> violations;

  bool ok() const { return violations.empty(); }
  bool has(TreeCheck c) const;
};

// Checks head-finality, a single root at the last position and projectivity.
// Every violation is collected; nothing throws.
ValidityReport validate_tree(const GoldTree& tree, int n);

// Head array from an arc set over n phrases; phrases without an arc get kRoot.
GoldTree tree_from_arcs(const std::vector<Arc>& arcs, int n);

// Exact arc-set equality. Throws InvalidComparisonError when the arc set
// cannot belong to a complete parse of the gold sentence.
bool is_correct(const std::vector<Arc>& result_arcs, const GoldTree& gold);

}  // namespace kakari
