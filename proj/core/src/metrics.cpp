#include "rcrank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rcrank/error.hpp"
#include "rcrank/numeric_text.hpp"

namespace rcrank {

std::string MetricConfig::name() const { return "ndcg@" + std::to_string(cutoff); }

MetricConfig parse_metric(std::string_view text) {
  constexpr std::string_view prefix = "ndcg@";
  if (!text.starts_with(prefix)) {
    throw ConfigError("unsupported metric '" + std::string(text) + "', expected ndcg@<k>");
  }
  const auto k = parse_number<std::size_t>(text.substr(prefix.size()));
  if (!k || *k < 1) {
    throw ConfigError("invalid metric cutoff in '" + std::string(text) + "'");
  }
  return MetricConfig{*k, 1.0};
}

std::vector<std::size_t> Ranking::positions() const {
  std::vector<std::size_t> pos(order.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) pos[order[rank]] = rank;
  return pos;
}

double gain(int label) { return std::ldexp(1.0, label) - 1.0; }

double discount(std::size_t position, const MetricConfig& config) {
  if (position > config.cutoff) return 0.0;
  return 1.0 / std::log2(static_cast<double>(position) + config.discount_shift);
}

Ranking rank_by_score(std::span<const double> scores) {
  for (const double s : scores) {
    if (std::isnan(s)) throw Error("cannot rank NaN scores");
  }
  Ranking ranking;
  ranking.order.resize(scores.size());
  std::iota(ranking.order.begin(), ranking.order.end(), std::size_t{0});
  std::stable_sort(ranking.order.begin(), ranking.order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return ranking;
}

double dcg(std::span<const int> ranked_labels, const MetricConfig& config) {
  double total = 0.0;
  const std::size_t limit = std::min(ranked_labels.size(), config.cutoff);
  for (std::size_t i = 0; i < limit; ++i) {
    total += gain(ranked_labels[i]) * discount(i + 1, config);
  }
  return total;
}

double idcg(std::span<const int> labels, const MetricConfig& config) {
  std::vector<int> sorted(labels.begin(), labels.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  return dcg(sorted, config);
}

double ndcg_at_k(std::span<const int> labels, std::span<const double> scores,
                 const MetricConfig& config) {
  if (labels.size() != scores.size()) {
    throw Error("ndcg: " + std::to_string(labels.size()) + " labels but " +
                std::to_string(scores.size()) + " scores");
  }
  const double ideal = idcg(labels, config);
  if (ideal <= 0.0) return 0.0;
  const Ranking ranking = rank_by_score(scores);
  std::vector<int> ranked;
  ranked.reserve(labels.size());
  for (const std::size_t doc : ranking.order) ranked.push_back(labels[doc]);
  return dcg(ranked, config) / ideal;
}

std::vector<double> per_query_ndcg(const Dataset& dataset, const GroupScores& scores,
                                   const MetricConfig& config) {
  const auto& groups = dataset.groups();
  if (scores.size() != groups.size()) {
    throw Error("score groups do not match dataset query count");
  }
  std::vector<double> out;
  out.reserve(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    out.push_back(ndcg_at_k(groups[g].labels(), scores[g], config));
  }
  return out;
}

double mean_ndcg(const Dataset& dataset, const GroupScores& scores, const MetricConfig& config) {
  const auto values = per_query_ndcg(dataset, scores, config);
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace rcrank
