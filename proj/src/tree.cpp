#include "kakari/tree.hpp"

#include <algorithm>

#include "kakari/error.hpp"

namespace kakari {

std::vector<Arc> GoldTree::arcs() const {
  std::vector<Arc> out;
  for (int i = 1; i <= size(); ++i) {
    if (head_of(i) != kRoot) out.push_back({i, head_of(i)});
  }
  return out;
}

bool ValidityReport::has(TreeCheck c) const {
  return std::any_of(violations.begin(), violations.end(),
                     [c](const TreeViolation& v) { return v.check == c; });
}

ValidityReport validate_tree(const GoldTree& tree, int n) {
  ValidityReport report;
  auto add = [&](TreeCheck c, PhraseIndex i, std::string msg) {
    report.violations.push_back({c, i, std::move(msg)});
  };

  if (tree.size() != n) {
    add(TreeCheck::Length, 0,
        "head array has " + std::to_string(tree.size()) + " entries, expected " + std::to_string(n));
    return report;
  }
  if (n == 0) return report;

  int roots = 0;
  for (int i = 1; i <= n; ++i) {
    const PhraseIndex h = tree.head_of(i);
    if (h == kRoot) {
      ++roots;
      if (i != n) add(TreeCheck::SingleRoot, i, "phrase " + std::to_string(i) + " is a root but is not last");
      continue;
    }
    if (h < 1 || h > n) {
      add(TreeCheck::HeadRange, i, "phrase " + std::to_string(i) + " has out-of-range head " + std::to_string(h));
      continue;
    }
    if (h <= i) {
      add(TreeCheck::HeadFinal, i,
          "phrase " + std::to_string(i) + " attaches leftward to " + std::to_string(h));
    }
  }
  if (tree.head_of(n) != kRoot) {
    add(TreeCheck::SingleRoot, n, "last phrase " + std::to_string(n) + " is not the root");
  } else if (roots == 0) {
    add(TreeCheck::SingleRoot, 0, "no root");
  }

  // Crossing check over all rightward, in-range arcs.
  for (int i = 1; i <= n; ++i) {
    const PhraseIndex hi = tree.head_of(i);
    if (hi <= i || hi > n) continue;
    for (int j = i + 1; j < hi; ++j) {
      const PhraseIndex hj = tree.head_of(j);
      if (hj <= j || hj > n) continue;
      if (hj > hi) {
        add(TreeCheck::Projectivity, j,
            "arc " + std::to_string(i) + "-" + std::to_string(hi) + " crosses arc " + std::to_string(j) +
                "-" + std::to_string(hj));
      }
    }
  }
  return report;
}

GoldTree tree_from_arcs(const std::vector<Arc>& arcs, int n) {
  GoldTree tree{std::vector<PhraseIndex>(static_cast<size_t>(n), kRoot)};
  for (const Arc& a : arcs) {
    if (a.dependent < 1 || a.dependent > n)
      throw InvalidComparisonError("arc dependent " + std::to_string(a.dependent) + " outside 1.." +
                                   std::to_string(n));
    tree.heads[static_cast<size_t>(a.dependent - 1)] = a.head;
  }
  return tree;
}

bool is_correct(const std::vector<Arc>& result_arcs, const GoldTree& gold) {
  const int n = gold.size();
  if (static_cast<int>(result_arcs.size()) != n - 1) {
    throw InvalidComparisonError("parse has " + std::to_string(result_arcs.size()) +
                                 " arcs but the gold tree has " + std::to_string(n - 1));
  }
  auto got = result_arcs;
  std::sort(got.begin(), got.end());
  return got == gold.arcs();
}

}  // namespace kakari
