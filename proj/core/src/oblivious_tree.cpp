#include "rcrank/oblivious_tree.hpp"

#include <limits>
#include <numeric>

#include "rcrank/error.hpp"

namespace rcrank {

double ObliviousTree::evaluate_by_traversal(std::span<const double> x) const {
  std::size_t node = 0;
  for (std::size_t d = 0; d < rules.size(); ++d) {
    node = rules[d].goes_right(x) ? 2 * node + 2 : 2 * node + 1;
  }
  const std::size_t first_leaf = (std::size_t{1} << rules.size()) - 1;
  return leaf_values[node - first_leaf];
}

DecisionTable::DecisionTable(const ObliviousTree& tree) : values_(tree.leaf_values) {
  if (values_.size() != (std::size_t{1} << tree.depth())) {
    throw Error("oblivious tree of depth " + std::to_string(tree.depth()) + " has " +
                std::to_string(values_.size()) + " leaves");
  }
  features_.reserve(tree.depth());
  thresholds_.reserve(tree.depth());
  for (const auto& rule : tree.rules) {
    features_.push_back(static_cast<std::uint32_t>(rule.feature));
    thresholds_.push_back(rule.threshold);
  }
}

FittedTree<ObliviousTree> build_oblivious_tree(const BinnedFeatures& binned,
                                               std::span<const double> targets, std::size_t depth,
                                               std::size_t threads) {
  if (depth < 1 || depth > 20) throw ConfigError("oblivious tree depth must be in [1, 20]");
  if (binned.rows() == 0) throw Error("cannot build a tree from zero samples");
  if (binned.cols() == 0) throw Error("cannot build a tree without features");
  if (targets.size() != binned.rows()) throw Error("target count does not match sample count");

  const auto rows = static_cast<std::uint32_t>(binned.rows());
  std::vector<std::uint32_t> samples(rows);
  std::iota(samples.begin(), samples.end(), 0u);

  FittedTree<ObliviousTree> fitted;
  fitted.leaf_of_sample.assign(rows, 0);
  auto& node_of = fitted.leaf_of_sample;

  for (std::size_t d = 0; d < depth; ++d) {
    const std::size_t nodes = std::size_t{1} << d;
    const RuleChoice choice = search_level_rule(binned, targets, samples, node_of, nodes, threads);
    if (!choice.found) {
      fitted.tree.rules.push_back({0, std::numeric_limits<double>::infinity()});
      for (auto& n : node_of) n <<= 1;
      continue;
    }
    fitted.tree.rules.push_back(choice.rule(binned.candidates()));
    const auto column = binned.column(choice.feature);
    for (std::uint32_t r = 0; r < rows; ++r) {
      node_of[r] = (node_of[r] << 1) | static_cast<std::uint32_t>(column[r] > choice.threshold_index);
    }
  }

  const std::size_t leaves = std::size_t{1} << depth;
  std::vector<double> sum(leaves, 0.0);
  std::vector<double> count(leaves, 0.0);
  for (std::uint32_t r = 0; r < rows; ++r) {
    sum[node_of[r]] += targets[r];
    count[node_of[r]] += 1.0;
  }
  fitted.tree.leaf_values.assign(leaves, 0.0);
  for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
    if (count[leaf] > 0.0) fitted.tree.leaf_values[leaf] = sum[leaf] / count[leaf];
  }
  return fitted;
}

void newton_adjust(ObliviousTree& tree, std::span<const std::uint32_t> leaf_of_sample,
                   const LambdaState& state) {
  tree.leaf_values = newton_leaf_values(tree.leaf_values.size(), leaf_of_sample, state);
}

}  // namespace rcrank
