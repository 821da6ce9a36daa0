#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rcrank/split.hpp"

namespace rcrank {

struct RegressionNode {
  bool is_leaf = true;
  SplittingRule rule;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double value = 0.0;

  bool operator==(const RegressionNode&) const = default;
};

/// Unconstrained binary regression tree; node 0 is the root.
struct RegressionTree {
  std::vector<RegressionNode> nodes;

  std::size_t leaf_count() const;
  /// Node id of the leaf that x routes to.
  std::uint32_t leaf_of(std::span<const double> x) const;
  double evaluate(std::span<const double> x) const { return nodes[leaf_of(x)].value; }

  bool operator==(const RegressionTree&) const = default;
};

/// Best-first growth: repeatedly splits the leaf whose best rule gives the
/// largest weighted-variance reduction, until `max_leaves` leaves exist or no
/// split reduces the cost. Leaf values are mean targets. leaf_of_sample holds
/// node ids.
FittedTree<RegressionTree> build_regression_tree(const BinnedFeatures& binned,
                                                 std::span<const double> targets,
                                                 std::size_t max_leaves, std::size_t threads = 1);

void newton_adjust(RegressionTree& tree, std::span<const std::uint32_t> leaf_of_sample,
                   const LambdaState& state);

}  // namespace rcrank
