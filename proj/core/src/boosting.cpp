#include "rcrank/boosting.hpp"

#include <bit>
#include <cmath>

#include "rcrank/error.hpp"
#include "rcrank/lambda.hpp"
#include "rcrank/numeric_text.hpp"
#include "rcrank/split.hpp"

namespace rcrank {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be positive");
  }
  if (max_trees < 1) throw ConfigError("max trees must be at least 1");
  if (leaves < 2) throw ConfigError("leaves must be at least 2");
  if (variant == TreeVariant::kOblivious && !std::has_single_bit(leaves)) {
    throw ConfigError("leaves must be a power of two for oblivious trees");
  }
  if (variant == TreeVariant::kOblivious && leaves > (std::size_t{1} << 20)) {
    throw ConfigError("oblivious trees are limited to 2^20 leaves");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be positive");
  if (metric.cutoff < 1) throw ConfigError("metric cutoff must be at least 1");
  if (!(metric.discount_shift > 0.0)) throw ConfigError("discount shift must be positive");
  if (max_bins < 2) throw ConfigError("max bins must be at least 2");
}

std::size_t TrainConfig::oblivious_depth() const {
  return static_cast<std::size_t>(std::countr_zero(leaves));
}

std::string format_progress(const IterationRecord& record, const MetricConfig& metric) {
  const std::string name = metric.name();
  std::string line = "iter=" + std::to_string(record.iteration) + " train_" + name + "=" +
                     format_fixed(record.train_metric, 6);
  if (record.valid_metric) line += " valid_" + name + "=" + format_fixed(*record.valid_metric, 6);
  return line;
}

namespace {

GroupScores zero_scores(const Dataset& dataset) {
  GroupScores scores;
  scores.reserve(dataset.query_count());
  for (const auto& g : dataset.groups()) scores.emplace_back(g.size(), 0.0);
  return scores;
}

std::string summarize(const ObliviousTree& tree) {
  std::string s = "oblivious depth=" + std::to_string(tree.depth()) + " features=";
  for (std::size_t d = 0; d < tree.rules.size(); ++d) {
    if (d > 0) s += ',';
    s += std::to_string(tree.rules[d].feature);
  }
  return s;
}

std::string summarize(const RegressionTree& tree) {
  return "standard leaves=" + std::to_string(tree.leaf_count()) +
         " nodes=" + std::to_string(tree.nodes.size());
}

}  // namespace

TrainResult train(const Dataset& train_set, const Dataset& valid_set, const TrainConfig& config,
                  const IterationObserver& observer) {
  config.validate();
  if (train_set.empty()) throw ConfigError("training set is empty");
  if (train_set.feature_count() == 0) throw ConfigError("training set has no features");
  if (!valid_set.empty() && valid_set.feature_count() != train_set.feature_count()) {
    throw ConfigError("validation set has " + std::to_string(valid_set.feature_count()) +
                      " features, training set has " + std::to_string(train_set.feature_count()));
  }

  const FeatureMatrix matrix = FeatureMatrix::from_dataset(train_set);
  const BinnedFeatures binned(matrix, SplitCandidateSet::build(matrix, config.max_bins));

  TrainResult result;
  result.ensemble = Ensemble(config.variant, train_set.feature_count(), config.metric);
  GroupScores train_scores = zero_scores(train_set);
  GroupScores valid_scores = zero_scores(valid_set);
  const bool has_valid = !valid_set.empty();

  std::size_t best_length = 0;
  double best_valid = -1.0;

  for (std::size_t t = 1; t <= config.max_trees; ++t) {
    const LambdaState state = compute_dataset_lambdas(train_set, train_scores, config.metric,
                                                      config.sigma, config.threads);
    std::vector<double> leaf_output;
    std::vector<std::uint32_t> leaf_of_sample;
    std::string summary;
    if (config.variant == TreeVariant::kOblivious) {
      auto fitted =
          build_oblivious_tree(binned, state.lambda, config.oblivious_depth(), config.threads);
      newton_adjust(fitted.tree, fitted.leaf_of_sample, state);
      leaf_output = fitted.tree.leaf_values;
      leaf_of_sample = std::move(fitted.leaf_of_sample);
      summary = summarize(fitted.tree);
      result.ensemble.add(std::move(fitted.tree), config.learning_rate);
    } else {
      auto fitted = build_regression_tree(binned, state.lambda, config.leaves, config.threads);
      newton_adjust(fitted.tree, fitted.leaf_of_sample, state);
      leaf_output.reserve(fitted.tree.nodes.size());
      for (const auto& node : fitted.tree.nodes) leaf_output.push_back(node.value);
      leaf_of_sample = std::move(fitted.leaf_of_sample);
      summary = summarize(fitted.tree);
      result.ensemble.add(std::move(fitted.tree), config.learning_rate);
    }

    std::size_t row = 0;
    for (auto& group : train_scores) {
      for (auto& s : group) s += config.learning_rate * leaf_output[leaf_of_sample[row++]];
    }

    IterationRecord record;
    record.iteration = t;
    record.train_metric = mean_ndcg(train_set, train_scores, config.metric);
    record.tree_summary = std::move(summary);
    if (has_valid) {
      const std::size_t index = result.ensemble.size() - 1;
      const auto& groups = valid_set.groups();
      for (std::size_t g = 0; g < groups.size(); ++g) {
        for (std::size_t d = 0; d < groups[g].size(); ++d) {
          valid_scores[g][d] +=
              config.learning_rate * result.ensemble.tree_output(index, groups[g].documents[d].features);
        }
      }
      const double valid = mean_ndcg(valid_set, valid_scores, config.metric);
      record.valid_metric = valid;
      if (valid > best_valid) {
        best_valid = valid;
        best_length = t;
      }
    }
    if (observer) observer(record);
    result.log.entries.push_back(std::move(record));
  }

  result.full_length = result.ensemble.size();
  if (has_valid) result.ensemble.truncate(best_length);
  return result;
}

}  // namespace rcrank
