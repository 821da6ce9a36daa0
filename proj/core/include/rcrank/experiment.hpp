#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcrank/boosting.hpp"
#include "rcrank/dataset.hpp"
#include "rcrank/ensemble.hpp"

namespace rcrank {

struct CvOptions {
  std::size_t folds = 5;
  /// When set, each fold's training split is subsampled query-wise to this
  /// fraction of its documents. Validation and test splits are untouched.
  std::optional<double> train_fraction;
};

struct FoldOutcome {
  std::size_t fold = 0;
  double test_metric = 0.0;
  std::size_t trees = 0;
  std::vector<QueryId> test_queries;
  std::vector<double> per_query;  // aligned with test_queries
};

/// One (variant, leaves, learning rate) setting evaluated over all folds.
struct GridCell {
  TreeVariant variant = TreeVariant::kOblivious;
  std::size_t leaves = 0;
  double learning_rate = 0.0;
  std::vector<FoldOutcome> folds;
  double mean = 0.0;

  std::vector<double> fold_values() const;
  std::vector<std::size_t> tree_counts() const;
  /// Per-query test metric of every fold, concatenated in fold order.
  std::vector<double> pooled_per_query() const;
};

/// Trains one model per fold on its training split, cuts it on the
/// validation split and scores the test split. Errors name the fold.
GridCell run_cv(const Dataset& dataset, const TrainConfig& config, const CvOptions& options = {});

struct GridFailure {
  TreeVariant variant = TreeVariant::kOblivious;
  std::size_t leaves = 0;
  double learning_rate = 0.0;
  std::string message;
};

struct GridResult {
  std::vector<GridCell> cells;
  std::vector<GridFailure> failures;
};

/// One run_cv per (variant, leaves, learning rate); a failing cell is
/// recorded and the remaining cells still run.
GridResult run_grid(const Dataset& dataset, std::span<const TreeVariant> variants,
                    std::span<const std::size_t> leaves, std::span<const double> learning_rates,
                    const TrainConfig& base, const CvOptions& options = {});

/// CSV with header `variant,leaves,learning_rate,fold,test_<metric>,trees`,
/// one record per (cell, fold).
void write_results(std::span<const GridCell> cells, const MetricConfig& metric, std::ostream& out);

/// Aligned leaves x learning-rate table of fold-mean test metrics, best
/// cells per variant, relative improvement and a per-cell significance
/// matrix when two variants are present.
std::string format_report(const GridResult& result, const MetricConfig& metric);

/// Rule occurrences per feature: each oblivious level and each internal
/// node of a standard tree counts once.
struct FeatureUsage {
  std::vector<std::size_t> counts;

  std::size_t total() const;
  /// Feature indices by descending count, ties by lower index.
  std::vector<std::size_t> ranked() const;
};

FeatureUsage feature_usage(std::span<const Ensemble> models);

struct FeatureSelection {
  Dataset dataset;
  /// kept[new_index] = old_index, new indices dense from 0.
  std::vector<std::size_t> kept;
};

/// Restricts every document to the k most used features. The kept features
/// keep their relative order.
FeatureSelection select_top_features(const Dataset& dataset, const FeatureUsage& usage,
                                     std::size_t k);

/// 100 * (a - b) / b.
inline double relative_improvement(double a, double b) { return 100.0 * (a - b) / b; }

}  // namespace rcrank
