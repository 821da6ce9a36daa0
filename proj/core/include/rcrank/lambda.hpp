#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rcrank/metrics.hpp"

namespace rcrank {

/// First-order (lambda) and second-order (weight) terms for one query group.
struct LambdaState {
  std::vector<double> lambda;
  std::vector<double> weight;
};

/// |change in NDCG| when documents i and j swap their ranked positions.
double delta_ndcg(std::span<const int> labels, const Ranking& ranking, std::size_t i,
                  std::size_t j, const MetricConfig& config);

/// Pairwise LambdaMART gradients for one group. For every pair with
/// labels[i] > labels[j], rho = 1 / (1 + exp(sigma * (s_i - s_j))) and
///   lambda_i += sigma * rho * dNDCG,  lambda_j -= sigma * rho * dNDCG,
///   w_i, w_j += sigma^2 * rho * (1 - rho) * dNDCG.
/// Positions are frozen to the ranking induced by `scores`. Pairs are
/// accumulated in ascending (i, j) order.
LambdaState compute_lambdas(std::span<const int> labels, std::span<const double> scores,
                            const MetricConfig& config, double sigma);

/// Flattened lambdas for every group of a dataset, groups processed in
/// parallel and laid out in dataset order.
LambdaState compute_dataset_lambdas(const Dataset& dataset, const GroupScores& scores,
                                    const MetricConfig& config, double sigma,
                                    std::size_t threads);

}  // namespace rcrank
