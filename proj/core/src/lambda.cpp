#include "rcrank/lambda.hpp"

#include <cmath>

#include "rcrank/error.hpp"
#include "rcrank/parallel.hpp"

namespace rcrank {

double delta_ndcg(std::span<const int> labels, const Ranking& ranking, std::size_t i,
                  std::size_t j, const MetricConfig& config) {
  if (i >= labels.size() || j >= labels.size() || ranking.order.size() != labels.size()) {
    throw Error("delta_ndcg: document index out of range");
  }
  const double ideal = idcg(labels, config);
  if (ideal <= 0.0) return 0.0;
  const auto pos = ranking.positions();
  return std::abs(gain(labels[i]) - gain(labels[j])) *
         std::abs(discount(pos[i] + 1, config) - discount(pos[j] + 1, config)) / ideal;
}

LambdaState compute_lambdas(std::span<const int> labels, std::span<const double> scores,
                            const MetricConfig& config, double sigma) {
  const std::size_t m = labels.size();
  if (scores.size() != m) throw Error("compute_lambdas: label/score length mismatch");

  LambdaState state{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
  if (m < 2) return state;

  const double ideal = idcg(labels, config);
  if (ideal <= 0.0) return state;
  const double inv_ideal = 1.0 / ideal;

  const auto positions = rank_by_score(scores).positions();
  std::vector<double> gains(m);
  std::vector<double> discounts(m);
  for (std::size_t d = 0; d < m; ++d) {
    gains[d] = gain(labels[d]);
    discounts[d] = discount(positions[d] + 1, config);
  }

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (labels[i] <= labels[j]) continue;
      // Both below the cut-off: swapping them cannot change NDCG@k.
      if (discounts[i] == 0.0 && discounts[j] == 0.0) continue;
      const double delta =
          (gains[i] - gains[j]) * std::abs(discounts[i] - discounts[j]) * inv_ideal;
      const double rho = 1.0 / (1.0 + std::exp(sigma * (scores[i] - scores[j])));
      const double step = sigma * rho * delta;
      const double curvature = sigma * sigma * rho * (1.0 - rho) * delta;
      state.lambda[i] += step;
      state.lambda[j] -= step;
      state.weight[i] += curvature;
      state.weight[j] += curvature;
    }
  }
  return state;
}

LambdaState compute_dataset_lambdas(const Dataset& dataset, const GroupScores& scores,
                                    const MetricConfig& config, double sigma,
                                    std::size_t threads) {
  const auto& groups = dataset.groups();
  if (scores.size() != groups.size()) throw Error("score groups do not match dataset");

  std::vector<LambdaState> per_group(groups.size());
  parallel_for(groups.size(), threads, [&](std::size_t g) {
    per_group[g] = compute_lambdas(groups[g].labels(), scores[g], config, sigma);
  });

  LambdaState flat;
  flat.lambda.reserve(dataset.row_count());
  flat.weight.reserve(dataset.row_count());
  for (auto& s : per_group) {
    flat.lambda.insert(flat.lambda.end(), s.lambda.begin(), s.lambda.end());
    flat.weight.insert(flat.weight.end(), s.weight.begin(), s.weight.end());
  }
  return flat;
}

}  // namespace rcrank
