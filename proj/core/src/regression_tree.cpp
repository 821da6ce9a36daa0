#include "rcrank/regression_tree.hpp"

#include <cmath>
#include <numeric>

#include "rcrank/error.hpp"

namespace rcrank {

namespace {

struct OpenLeaf {
  std::uint32_t node = 0;
  std::vector<std::uint32_t> samples;
  RuleChoice best;
  double gain = 0.0;
};

double own_score(std::span<const double> targets, std::span<const std::uint32_t> samples) {
  double sum = 0.0;
  for (const auto r : samples) sum += targets[r];
  return samples.empty() ? 0.0 : sum * sum / static_cast<double>(samples.size());
}

double mean(std::span<const double> targets, std::span<const std::uint32_t> samples) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto r : samples) sum += targets[r];
  return sum / static_cast<double>(samples.size());
}

OpenLeaf open_leaf(const BinnedFeatures& binned, std::span<const double> targets,
                   std::uint32_t node, std::vector<std::uint32_t> samples, std::size_t threads) {
  OpenLeaf leaf{node, std::move(samples), {}, 0.0};
  if (leaf.samples.size() < 2) return leaf;
  leaf.best = search_level_rule(binned, targets, leaf.samples, {}, 1, threads);
  if (leaf.best.found) leaf.gain = leaf.best.score - own_score(targets, leaf.samples);
  return leaf;
}

}  // namespace

std::size_t RegressionTree::leaf_count() const {
  std::size_t n = 0;
  for (const auto& node : nodes) n += node.is_leaf ? 1 : 0;
  return n;
}

std::uint32_t RegressionTree::leaf_of(std::span<const double> x) const {
  std::uint32_t id = 0;
  while (!nodes[id].is_leaf) {
    id = nodes[id].rule.goes_right(x) ? nodes[id].right : nodes[id].left;
  }
  return id;
}

FittedTree<RegressionTree> build_regression_tree(const BinnedFeatures& binned,
                                                 std::span<const double> targets,
                                                 std::size_t max_leaves, std::size_t threads) {
  if (max_leaves < 2) throw ConfigError("a regression tree needs at least 2 leaves");
  if (binned.rows() == 0) throw Error("cannot build a tree from zero samples");
  if (targets.size() != binned.rows()) throw Error("target count does not match sample count");

  const auto rows = static_cast<std::uint32_t>(binned.rows());
  std::vector<std::uint32_t> all(rows);
  std::iota(all.begin(), all.end(), 0u);

  FittedTree<RegressionTree> fitted;
  auto& nodes = fitted.tree.nodes;
  nodes.push_back(RegressionNode{});

  std::vector<OpenLeaf> open;
  open.push_back(open_leaf(binned, targets, 0, std::move(all), threads));

  std::size_t leaves = 1;
  while (leaves < max_leaves) {
    // Largest gain wins; ties keep the lowest node id.
    std::size_t pick = open.size();
    for (std::size_t i = 0; i < open.size(); ++i) {
      const auto& leaf = open[i];
      if (!leaf.best.found) continue;
      const double tolerance = 1e-12 * std::max(1.0, std::abs(leaf.best.score));
      if (!(leaf.gain > tolerance)) continue;
      if (pick == open.size() || leaf.gain > open[pick].gain ||
          (leaf.gain == open[pick].gain && leaf.node < open[pick].node)) {
        pick = i;
      }
    }
    if (pick == open.size()) break;

    OpenLeaf parent = std::move(open[pick]);
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));

    const auto rule = parent.best.rule(binned.candidates());
    const auto column = binned.column(parent.best.feature);
    std::vector<std::uint32_t> left;
    std::vector<std::uint32_t> right;
    for (const auto r : parent.samples) {
      (column[r] > parent.best.threshold_index ? right : left).push_back(r);
    }

    const auto left_id = static_cast<std::uint32_t>(nodes.size());
    const auto right_id = left_id + 1;
    nodes[parent.node].is_leaf = false;
    nodes[parent.node].rule = rule;
    nodes[parent.node].left = left_id;
    nodes[parent.node].right = right_id;
    nodes.push_back(RegressionNode{});
    nodes.push_back(RegressionNode{});

    open.push_back(open_leaf(binned, targets, left_id, std::move(left), threads));
    open.push_back(open_leaf(binned, targets, right_id, std::move(right), threads));
    ++leaves;
  }

  fitted.leaf_of_sample.assign(rows, 0);
  for (const auto& leaf : open) {
    nodes[leaf.node].value = mean(targets, leaf.samples);
    for (const auto r : leaf.samples) fitted.leaf_of_sample[r] = leaf.node;
  }
  return fitted;
}

void newton_adjust(RegressionTree& tree, std::span<const std::uint32_t> leaf_of_sample,
                   const LambdaState& state) {
  const auto values = newton_leaf_values(tree.nodes.size(), leaf_of_sample, state);
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    if (tree.nodes[id].is_leaf) tree.nodes[id].value = values[id];
  }
}

}  // namespace rcrank
