#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rcrank/dataset.hpp"

namespace rcrank {

/// NDCG@cutoff with exponential gain 2^r - 1 and discount 1/log2(i + shift).
struct MetricConfig {
  std::size_t cutoff = 10;
  double discount_shift = 1.0;

  std::string name() const;
  bool operator==(const MetricConfig&) const = default;
};

/// Parses `ndcg@<k>` with k >= 1.
MetricConfig parse_metric(std::string_view text);

/// Scores for every document, one vector per query group in dataset order.
using GroupScores = std::vector<std::vector<double>>;

/// Document indices in descending score order; ties keep ascending index.
struct Ranking {
  std::vector<std::size_t> order;

  /// positions()[doc] is the 0-based rank of document `doc`.
  std::vector<std::size_t> positions() const;
};

double gain(int label);
double discount(std::size_t position, const MetricConfig& config);

Ranking rank_by_score(std::span<const double> scores);

double dcg(std::span<const int> ranked_labels, const MetricConfig& config);
double idcg(std::span<const int> labels, const MetricConfig& config);
double ndcg_at_k(std::span<const int> labels, std::span<const double> scores,
                 const MetricConfig& config);

/// Per-query NDCG in dataset group order.
std::vector<double> per_query_ndcg(const Dataset& dataset, const GroupScores& scores,
                                   const MetricConfig& config);
/// Unweighted mean over queries; 0 for an empty dataset.
double mean_ndcg(const Dataset& dataset, const GroupScores& scores, const MetricConfig& config);

}  // namespace rcrank
