#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rcrank/split.hpp"

namespace rcrank {

/// Complete binary tree where every node at depth d tests rules[d].
/// leaf_values is indexed by the packed predicate bits, level 0 most
/// significant, 1 meaning "x[feature] > threshold".
struct ObliviousTree {
  std::vector<SplittingRule> rules;
  std::vector<double> leaf_values;

  std::size_t depth() const noexcept { return rules.size(); }

  /// Walks the tree node by node (heap layout, children 2n+1 / 2n+2).
  double evaluate_by_traversal(std::span<const double> x) const;

  bool operator==(const ObliviousTree&) const = default;
};

/// Flat form of an oblivious tree: D predicates indexing a 2^D value array.
class DecisionTable {
 public:
  DecisionTable() = default;
  explicit DecisionTable(const ObliviousTree& tree);

  std::size_t index(std::span<const double> x) const {
    std::size_t idx = 0;
    for (std::size_t d = 0; d < features_.size(); ++d) {
      idx = (idx << 1) | static_cast<std::size_t>(x[features_[d]] > thresholds_[d]);
    }
    return idx;
  }
  double score(std::span<const double> x) const { return values_[index(x)]; }

 private:
  std::vector<std::uint32_t> features_;
  std::vector<double> thresholds_;
  std::vector<double> values_;
};

inline DecisionTable to_decision_table(const ObliviousTree& tree) { return DecisionTable(tree); }

/// Greedy top-down induction: each level picks the one rule that minimises
/// the level cost over all current 2^d nodes. Leaves hold the mean target of
/// their rows (0 when empty). Features without candidates are skipped; if
/// no feature has any, the level uses an always-left rule.
FittedTree<ObliviousTree> build_oblivious_tree(const BinnedFeatures& binned,
                                               std::span<const double> targets, std::size_t depth,
                                               std::size_t threads = 1);

/// Replaces leaf values by the Newton step of the rows routed to each leaf.
void newton_adjust(ObliviousTree& tree, std::span<const std::uint32_t> leaf_of_sample,
                   const LambdaState& state);

}  // namespace rcrank
