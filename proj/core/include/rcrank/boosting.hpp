#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rcrank/dataset.hpp"
#include "rcrank/ensemble.hpp"
#include "rcrank/metrics.hpp"

namespace rcrank {

struct TrainConfig {
  TreeVariant variant = TreeVariant::kOblivious;
  /// Leaf budget; for oblivious trees a power of two giving depth log2(leaves).
  std::size_t leaves = 64;
  double learning_rate = 0.11;
  std::size_t max_trees = 1000;
  MetricConfig metric;
  double sigma = 1.0;
  std::uint64_t seed = 42;
  /// 0 means hardware concurrency.
  std::size_t threads = 0;
  std::size_t max_bins = 256;

  /// Throws ConfigError on the first violated constraint.
  void validate() const;
  std::size_t oblivious_depth() const;
};

struct IterationRecord {
  std::size_t iteration = 0;  // 1-based tree count
  double train_metric = 0.0;
  std::optional<double> valid_metric;
  std::string tree_summary;
};

struct TrainingLog {
  std::vector<IterationRecord> entries;
};

struct TrainResult {
  Ensemble ensemble;  // already truncated
  TrainingLog log;
  std::size_t full_length = 0;
};

using IterationObserver = std::function<void(const IterationRecord&)>;

/// LambdaMART: per iteration compute lambdas from the cached scores, fit a
/// tree to them, replace leaves by Newton steps, and add it with weight
/// learning_rate. With a non-empty validation set the forest is cut to the
/// earliest prefix with the best validation metric.
TrainResult train(const Dataset& train_set, const Dataset& valid_set, const TrainConfig& config,
                  const IterationObserver& observer = {});

/// `iter=<t> train_ndcg@k=<v> valid_ndcg@k=<v>` with 6 decimals; the valid
/// part is omitted when there is no validation set.
std::string format_progress(const IterationRecord& record, const MetricConfig& metric);

}  // namespace rcrank
