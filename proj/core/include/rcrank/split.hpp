#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rcrank/dataset.hpp"
#include "rcrank/lambda.hpp"

namespace rcrank {

/// Sends x left when x[feature] <= threshold, right otherwise.
struct SplittingRule {
  std::size_t feature = 0;
  double threshold = 0.0;

  bool goes_right(std::span<const double> x) const { return x[feature] > threshold; }
  bool operator==(const SplittingRule&) const = default;
};

/// Dense row-major sample matrix.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  /// Rows in dataset order: group by group, documents in group order.
  static FeatureMatrix from_dataset(const Dataset& dataset);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double at(std::size_t row, std::size_t col) const { return values_[row * cols_ + col]; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Candidate thresholds per feature, strictly increasing.
struct SplitCandidateSet {
  std::vector<std::vector<double>> thresholds;

  /// Midpoints between consecutive distinct values; features with more than
  /// `max_bins` distinct values get at most max_bins - 1 quantile cuts.
  static SplitCandidateSet build(const FeatureMatrix& matrix, std::size_t max_bins = 256);

  std::size_t total() const;
};

/// Column-major bin indices: bin(f, r) <= k  iff  x[r][f] <= thresholds[f][k].
class BinnedFeatures {
 public:
  BinnedFeatures(const FeatureMatrix& matrix, SplitCandidateSet candidates);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return candidates_.thresholds.size(); }
  const SplitCandidateSet& candidates() const noexcept { return candidates_; }
  std::span<const std::uint16_t> column(std::size_t f) const {
    return {bins_.data() + f * rows_, rows_};
  }

 private:
  std::size_t rows_ = 0;
  SplitCandidateSet candidates_;
  std::vector<std::uint16_t> bins_;
};

/// Outcome of a histogram split search. `score` is the sum over every child
/// part of (sum of targets)^2 / count; larger means lower level cost.
struct RuleChoice {
  bool found = false;
  std::size_t feature = 0;
  std::size_t threshold_index = 0;
  double score = 0.0;

  SplittingRule rule(const SplitCandidateSet& candidates) const {
    return {feature, candidates.thresholds[feature][threshold_index]};
  }
};

/// Finds the single rule that minimises the level cost over the node
/// partition given by node_of[row] (all rows in node 0 when node_of is empty),
/// restricted to `samples`. Ties go to the lowest feature, then threshold.
RuleChoice search_level_rule(const BinnedFeatures& binned, std::span<const double> targets,
                             std::span<const std::uint32_t> samples,
                             std::span<const std::uint32_t> node_of, std::size_t node_count,
                             std::size_t threads = 1);

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_samples(
    const FeatureMatrix& matrix, std::span<const std::size_t> samples, const SplittingRule& rule);

/// Weighted within-part population variance after applying `rule` to every
/// set, normalised by the total number of samples. Empty parts add zero.
double level_cost(const FeatureMatrix& matrix, std::span<const double> targets,
                  std::span<const std::vector<std::size_t>> sets, const SplittingRule& rule);

/// argmin of level_cost over all candidates.
SplittingRule best_level_rule(const FeatureMatrix& matrix, std::span<const double> targets,
                              std::span<const std::vector<std::size_t>> sets,
                              const SplitCandidateSet& candidates);

/// A freshly built tree together with the leaf slot of every training row.
template <class Tree>
struct FittedTree {
  Tree tree;
  std::vector<std::uint32_t> leaf_of_sample;
};

inline constexpr double kNewtonEpsilon = 1e-10;

/// Per-slot sum(lambda) / (sum(weight) + epsilon); slots with no rows are 0.
std::vector<double> newton_leaf_values(std::size_t slot_count,
                                       std::span<const std::uint32_t> leaf_of_sample,
                                       const LambdaState& state,
                                       double epsilon = kNewtonEpsilon);

}  // namespace rcrank
