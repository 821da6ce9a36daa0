#include "rcrank/split.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rcrank/error.hpp"
#include "rcrank/parallel.hpp"

namespace rcrank {

namespace {

// a <= result < b, so a goes left and b goes right.
double midpoint(double a, double b) {
  const double mid = a + (b - a) / 2.0;
  return mid < b ? mid : a;
}

double part_score(double sum, double count) { return count > 0.0 ? sum * sum / count : 0.0; }

double population_variance_times_n(std::span<const double> targets,
                                   std::span<const std::size_t> rows) {
  if (rows.empty()) return 0.0;
  double mean = 0.0;
  for (const auto r : rows) mean += targets[r];
  mean /= static_cast<double>(rows.size());
  double ss = 0.0;
  for (const auto r : rows) ss += (targets[r] - mean) * (targets[r] - mean);
  return ss;
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) throw Error("feature matrix size mismatch");
}

FeatureMatrix FeatureMatrix::from_dataset(const Dataset& dataset) {
  const std::size_t l = dataset.feature_count();
  std::vector<double> values;
  values.reserve(dataset.row_count() * l);
  for (const auto& group : dataset.groups()) {
    for (const auto& doc : group.documents) {
      values.insert(values.end(), doc.features.begin(), doc.features.end());
    }
  }
  return FeatureMatrix(dataset.row_count(), l, std::move(values));
}

SplitCandidateSet SplitCandidateSet::build(const FeatureMatrix& matrix, std::size_t max_bins) {
  if (max_bins < 2) throw ConfigError("at least two bins are required");
  SplitCandidateSet out;
  out.thresholds.resize(matrix.cols());
  std::vector<double> column(matrix.rows());
  for (std::size_t f = 0; f < matrix.cols(); ++f) {
    for (std::size_t r = 0; r < matrix.rows(); ++r) column[r] = matrix.at(r, f);
    std::sort(column.begin(), column.end());
    std::vector<double> distinct(column.begin(), std::unique(column.begin(), column.end()));
    auto& cuts = out.thresholds[f];

    if (distinct.size() <= max_bins) {
      for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
        cuts.push_back(midpoint(distinct[i], distinct[i + 1]));
      }
      continue;
    }
    const std::size_t n = column.size();
    for (std::size_t q = 1; q < max_bins; ++q) {
      const std::size_t boundary = (q * n + max_bins - 1) / max_bins;  // ceil(q n / bins)
      const double a = column[boundary - 1];
      const auto next = std::upper_bound(distinct.begin(), distinct.end(), a);
      if (next == distinct.end()) continue;
      const double cut = midpoint(a, *next);
      if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
    }
  }
  return out;
}

std::size_t SplitCandidateSet::total() const {
  std::size_t n = 0;
  for (const auto& t : thresholds) n += t.size();
  return n;
}

BinnedFeatures::BinnedFeatures(const FeatureMatrix& matrix, SplitCandidateSet candidates)
    : rows_(matrix.rows()), candidates_(std::move(candidates)) {
  if (candidates_.thresholds.size() != matrix.cols()) {
    throw Error("candidate set covers " + std::to_string(candidates_.thresholds.size()) +
                " features, matrix has " + std::to_string(matrix.cols()));
  }
  bins_.resize(rows_ * matrix.cols());
  for (std::size_t f = 0; f < matrix.cols(); ++f) {
    const auto& cuts = candidates_.thresholds[f];
    if (cuts.size() >= std::numeric_limits<std::uint16_t>::max()) {
      throw ConfigError("too many split candidates for feature " + std::to_string(f));
    }
    for (std::size_t r = 0; r < rows_; ++r) {
      const auto it = std::lower_bound(cuts.begin(), cuts.end(), matrix.at(r, f));
      bins_[f * rows_ + r] = static_cast<std::uint16_t>(it - cuts.begin());
    }
  }
}

RuleChoice search_level_rule(const BinnedFeatures& binned, std::span<const double> targets,
                             std::span<const std::uint32_t> samples,
                             std::span<const std::uint32_t> node_of, std::size_t node_count,
                             std::size_t threads) {
  const auto node = [&](std::uint32_t row) -> std::size_t {
    return node_of.empty() ? 0 : node_of[row];
  };

  std::vector<double> node_count_total(node_count, 0.0);
  std::vector<double> node_sum_total(node_count, 0.0);
  for (const auto row : samples) {
    node_count_total[node(row)] += 1.0;
    node_sum_total[node(row)] += targets[row];
  }

  const auto& cuts = binned.candidates().thresholds;
  std::vector<RuleChoice> per_feature(binned.cols());
  parallel_for(binned.cols(), threads, [&](std::size_t f) {
    const std::size_t cut_count = cuts[f].size();
    if (cut_count == 0) return;
    const std::size_t bins = cut_count + 1;
    std::vector<double> count(node_count * bins, 0.0);
    std::vector<double> sum(node_count * bins, 0.0);
    const auto column = binned.column(f);
    for (const auto row : samples) {
      const std::size_t slot = node(row) * bins + column[row];
      count[slot] += 1.0;
      sum[slot] += targets[row];
    }

    std::vector<double> left_count(node_count, 0.0);
    std::vector<double> left_sum(node_count, 0.0);
    RuleChoice best;
    for (std::size_t k = 0; k < cut_count; ++k) {
      double score = 0.0;
      for (std::size_t n = 0; n < node_count; ++n) {
        left_count[n] += count[n * bins + k];
        left_sum[n] += sum[n * bins + k];
        score += part_score(left_sum[n], left_count[n]) +
                 part_score(node_sum_total[n] - left_sum[n], node_count_total[n] - left_count[n]);
      }
      if (!best.found || score > best.score) best = RuleChoice{true, f, k, score};
    }
    per_feature[f] = best;
  });

  RuleChoice best;
  for (const auto& choice : per_feature) {
    if (choice.found && (!best.found || choice.score > best.score)) best = choice;
  }
  return best;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_samples(
    const FeatureMatrix& matrix, std::span<const std::size_t> samples, const SplittingRule& rule) {
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> parts;
  for (const auto r : samples) {
    (rule.goes_right(matrix.row(r)) ? parts.second : parts.first).push_back(r);
  }
  return parts;
}

double level_cost(const FeatureMatrix& matrix, std::span<const double> targets,
                  std::span<const std::vector<std::size_t>> sets, const SplittingRule& rule) {
  std::size_t total = 0;
  double weighted = 0.0;
  for (const auto& set : sets) {
    total += set.size();
    const auto [left, right] = split_samples(matrix, set, rule);
    weighted += population_variance_times_n(targets, left);
    weighted += population_variance_times_n(targets, right);
  }
  if (total == 0) throw Error("level_cost: every node set is empty");
  return weighted / static_cast<double>(total);
}

SplittingRule best_level_rule(const FeatureMatrix& matrix, std::span<const double> targets,
                              std::span<const std::vector<std::size_t>> sets,
                              const SplitCandidateSet& candidates) {
  if (candidates.total() == 0) throw Error("best_level_rule: no split candidates");
  const BinnedFeatures binned(matrix, candidates);
  std::vector<std::uint32_t> node_of(matrix.rows(), 0);
  std::vector<std::uint32_t> samples;
  for (std::size_t n = 0; n < sets.size(); ++n) {
    for (const auto r : sets[n]) {
      node_of[r] = static_cast<std::uint32_t>(n);
      samples.push_back(static_cast<std::uint32_t>(r));
    }
  }
  const RuleChoice choice =
      search_level_rule(binned, targets, samples, node_of, std::max<std::size_t>(sets.size(), 1));
  return choice.rule(binned.candidates());
}

std::vector<double> newton_leaf_values(std::size_t slot_count,
                                       std::span<const std::uint32_t> leaf_of_sample,
                                       const LambdaState& state, double epsilon) {
  if (leaf_of_sample.size() != state.lambda.size()) {
    throw Error("newton step: leaf assignment does not cover the lambda vector");
  }
  std::vector<double> lambda_sum(slot_count, 0.0);
  std::vector<double> weight_sum(slot_count, 0.0);
  for (std::size_t i = 0; i < leaf_of_sample.size(); ++i) {
    lambda_sum[leaf_of_sample[i]] += state.lambda[i];
    weight_sum[leaf_of_sample[i]] += state.weight[i];
  }
  std::vector<double> values(slot_count, 0.0);
  for (std::size_t s = 0; s < slot_count; ++s) {
    if (lambda_sum[s] != 0.0) values[s] = lambda_sum[s] / (weight_sum[s] + epsilon);
  }
  return values;
}

}  // namespace rcrank
