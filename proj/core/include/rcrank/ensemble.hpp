#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "rcrank/dataset.hpp"
#include "rcrank/metrics.hpp"
#include "rcrank/oblivious_tree.hpp"
#include "rcrank/regression_tree.hpp"

namespace rcrank {

enum class TreeVariant { kStandard, kOblivious };

std::string_view to_string(TreeVariant variant);
TreeVariant parse_variant(std::string_view text);

/// Ordered, weighted sum of trees of a single variant. Oblivious trees are
/// also kept as decision tables, which is what score() evaluates.
class Ensemble {
 public:
  Ensemble() = default;
  Ensemble(TreeVariant variant, std::size_t feature_count, MetricConfig metric = {});

  TreeVariant variant() const noexcept { return variant_; }
  std::size_t feature_count() const noexcept { return feature_count_; }
  const MetricConfig& metric() const noexcept { return metric_; }
  std::size_t size() const noexcept { return weights_.size(); }
  bool empty() const noexcept { return weights_.empty(); }

  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<ObliviousTree>& oblivious_trees() const noexcept { return oblivious_; }
  const std::vector<RegressionTree>& standard_trees() const noexcept { return standard_; }

  void add(ObliviousTree tree, double weight);
  void add(RegressionTree tree, double weight);
  /// Keeps the first `length` trees.
  void truncate(std::size_t length);

  /// Unweighted output of tree t.
  double tree_output(std::size_t t, std::span<const double> x) const;
  /// Sum of weight * output in tree order; decision tables for oblivious trees.
  double score(std::span<const double> x) const;
  /// Same sum, walking oblivious trees node by node.
  double score_by_traversal(std::span<const double> x) const;

  bool operator==(const Ensemble& other) const;

 private:
  void check_vector(std::span<const double> x) const;

  TreeVariant variant_ = TreeVariant::kOblivious;
  std::size_t feature_count_ = 0;
  MetricConfig metric_;
  std::vector<double> weights_;
  std::vector<ObliviousTree> oblivious_;
  std::vector<DecisionTable> tables_;
  std::vector<RegressionTree> standard_;
};

/// Ensemble scores for every document, grouped like the dataset.
GroupScores predict_scores(const Ensemble& ensemble, const Dataset& dataset);

}  // namespace rcrank
