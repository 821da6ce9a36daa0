#include "rcrank/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

#include "rcrank/error.hpp"
#include "rcrank/numeric_text.hpp"
#include "rcrank/significance.hpp"

namespace rcrank {

std::vector<double> GridCell::fold_values() const {
  std::vector<double> out;
  for (const auto& f : folds) out.push_back(f.test_metric);
  return out;
}

std::vector<std::size_t> GridCell::tree_counts() const {
  std::vector<std::size_t> out;
  for (const auto& f : folds) out.push_back(f.trees);
  return out;
}

std::vector<double> GridCell::pooled_per_query() const {
  std::vector<double> out;
  for (const auto& f : folds) out.insert(out.end(), f.per_query.begin(), f.per_query.end());
  return out;
}

GridCell run_cv(const Dataset& dataset, const TrainConfig& config, const CvOptions& options) {
  config.validate();
  const auto splits = split_folds(dataset, options.folds, config.seed);

  GridCell cell;
  cell.variant = config.variant;
  cell.leaves = config.leaves;
  cell.learning_rate = config.learning_rate;
  for (const auto& split : splits) {
    try {
      Dataset train_set = dataset.subset(split.train);
      if (options.train_fraction) {
        train_set = subsample(train_set, *options.train_fraction, config.seed + split.fold_index);
      }
      const Dataset valid_set = dataset.subset(split.valid);
      const Dataset test_set = dataset.subset(split.test);

      const TrainResult trained = train(train_set, valid_set, config);
      const GroupScores scores = predict_scores(trained.ensemble, test_set);

      FoldOutcome outcome;
      outcome.fold = split.fold_index;
      outcome.trees = trained.ensemble.size();
      outcome.test_queries = split.test;
      outcome.per_query = per_query_ndcg(test_set, scores, config.metric);
      outcome.test_metric =
          std::accumulate(outcome.per_query.begin(), outcome.per_query.end(), 0.0) /
          static_cast<double>(outcome.per_query.size());
      cell.folds.push_back(std::move(outcome));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw Error("fold " + std::to_string(split.fold_index) + ": " + e.what());
    }
  }
  const auto values = cell.fold_values();
  cell.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return cell;
}

GridResult run_grid(const Dataset& dataset, std::span<const TreeVariant> variants,
                    std::span<const std::size_t> leaves, std::span<const double> learning_rates,
                    const TrainConfig& base, const CvOptions& options) {
  if (variants.empty() || leaves.empty() || learning_rates.empty()) {
    throw ConfigError("grid needs at least one variant, leaf count and learning rate");
  }
  GridResult result;
  for (const auto variant : variants) {
    for (const auto leaf_count : leaves) {
      for (const auto rate : learning_rates) {
        TrainConfig config = base;
        config.variant = variant;
        config.leaves = leaf_count;
        config.learning_rate = rate;
        try {
          result.cells.push_back(run_cv(dataset, config, options));
        } catch (const std::exception& e) {
          result.failures.push_back({variant, leaf_count, rate, e.what()});
        }
      }
    }
  }
  return result;
}

void write_results(std::span<const GridCell> cells, const MetricConfig& metric, std::ostream& out) {
  out << "variant,leaves,learning_rate,fold,test_" << metric.name() << ",trees\n";
  for (const auto& cell : cells) {
    for (const auto& fold : cell.folds) {
      out << to_string(cell.variant) << ',' << cell.leaves << ',' << format_real(cell.learning_rate)
          << ',' << fold.fold << ',' << format_real(fold.test_metric) << ',' << fold.trees << '\n';
    }
  }
}

namespace {

template <class T>
std::vector<T> distinct_in_order(std::vector<T> values) {
  std::vector<T> out;
  for (const auto& v : values) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

const GridCell* find_cell(const GridResult& result, TreeVariant variant, std::size_t leaves,
                          double rate) {
  for (const auto& cell : result.cells) {
    if (cell.variant == variant && cell.leaves == leaves && cell.learning_rate == rate) return &cell;
  }
  return nullptr;
}

std::string pad(const std::string& text, std::size_t width) {
  return text.size() >= width ? text : text + std::string(width - text.size(), ' ');
}

}  // namespace

std::string format_report(const GridResult& result, const MetricConfig& metric) {
  std::vector<TreeVariant> variants;
  std::vector<std::size_t> leaves;
  std::vector<double> rates;
  for (const auto& cell : result.cells) {
    variants.push_back(cell.variant);
    leaves.push_back(cell.leaves);
    rates.push_back(cell.learning_rate);
  }
  variants = distinct_in_order(variants);
  leaves = distinct_in_order(leaves);
  rates = distinct_in_order(rates);

  constexpr std::size_t kWidth = 11;
  std::ostringstream out;
  out << "test " << metric.name() << ", mean over folds\n";

  // Header: one column group per learning rate, one column per variant.
  out << pad("leaves", 8);
  for (const double rate : rates) {
    out << "| " << pad("lr=" + format_real(rate), kWidth * variants.size());
  }
  out << '\n' << pad("", 8);
  for (std::size_t r = 0; r < rates.size(); ++r) {
    out << "| ";
    for (const auto v : variants) out << pad(std::string(to_string(v)), kWidth);
  }
  out << '\n';
  for (const auto leaf_count : leaves) {
    out << pad(std::to_string(leaf_count), 8);
    for (const double rate : rates) {
      out << "| ";
      for (const auto v : variants) {
        const GridCell* cell = find_cell(result, v, leaf_count, rate);
        out << pad(cell ? format_fixed(cell->mean, 4) : "-", kWidth);
      }
    }
    out << '\n';
  }

  std::vector<const GridCell*> best(variants.size(), nullptr);
  for (std::size_t i = 0; i < variants.size(); ++i) {
    for (const auto& cell : result.cells) {
      if (cell.variant == variants[i] && (!best[i] || cell.mean > best[i]->mean)) best[i] = &cell;
    }
    out << "best " << to_string(variants[i]) << ": " << format_fixed(best[i]->mean, 4)
        << " (leaves=" << best[i]->leaves << ", lr=" << format_real(best[i]->learning_rate)
        << ")\n";
  }

  if (variants.size() == 2) {
    out << "relative improvement " << to_string(variants[0]) << " over " << to_string(variants[1])
        << ": " << format_fixed(relative_improvement(best[0]->mean, best[1]->mean), 2) << "%\n";
    out << "p-values (" << kPairedTestName << ", per-query " << metric.name()
        << " pooled over test folds)\n";
    out << pad("leaves", 8);
    for (const double rate : rates) out << "| " << pad("lr=" + format_real(rate), kWidth);
    out << '\n';
    for (const auto leaf_count : leaves) {
      out << pad(std::to_string(leaf_count), 8);
      for (const double rate : rates) {
        const GridCell* a = find_cell(result, variants[0], leaf_count, rate);
        const GridCell* b = find_cell(result, variants[1], leaf_count, rate);
        std::string text = "-";
        if (a && b) {
          const auto pa = a->pooled_per_query();
          const auto pb = b->pooled_per_query();
          if (pa.size() == pb.size() && pa.size() >= 2) {
            char buffer[32];
            std::snprintf(buffer, sizeof(buffer), "%.3g", paired_significance(pa, pb));
            text = buffer;
          }
        }
        out << "| " << pad(text, kWidth);
      }
      out << '\n';
    }
  }

  for (const auto& failure : result.failures) {
    out << "failed " << to_string(failure.variant) << " leaves=" << failure.leaves
        << " lr=" << format_real(failure.learning_rate) << ": " << failure.message << '\n';
  }
  return out.str();
}

std::size_t FeatureUsage::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

std::vector<std::size_t> FeatureUsage::ranked() const {
  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
  return order;
}

FeatureUsage feature_usage(std::span<const Ensemble> models) {
  if (models.empty()) throw Error("feature_usage needs at least one model");
  FeatureUsage usage;
  for (const auto& model : models) {
    if (usage.counts.size() < model.feature_count()) usage.counts.resize(model.feature_count(), 0);
    for (const auto& tree : model.oblivious_trees()) {
      for (const auto& rule : tree.rules) ++usage.counts[rule.feature];
    }
    for (const auto& tree : model.standard_trees()) {
      for (const auto& node : tree.nodes) {
        if (!node.is_leaf) ++usage.counts[node.rule.feature];
      }
    }
  }
  return usage;
}

FeatureSelection select_top_features(const Dataset& dataset, const FeatureUsage& usage,
                                     std::size_t k) {
  const std::size_t l = dataset.feature_count();
  if (k == 0) throw ConfigError("number of selected features must be positive");
  if (k > l) {
    throw ConfigError("cannot keep " + std::to_string(k) + " of " + std::to_string(l) + " features");
  }
  FeatureUsage padded = usage;
  padded.counts.resize(std::max(padded.counts.size(), l), 0);
  std::vector<std::size_t> ranked;
  for (const auto f : padded.ranked()) {
    if (f < l) ranked.push_back(f);
  }
  std::vector<std::size_t> kept(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(kept.begin(), kept.end());

  std::vector<QueryGroup> groups = dataset.groups();
  for (auto& group : groups) {
    for (auto& doc : group.documents) {
      std::vector<double> reduced;
      reduced.reserve(k);
      for (const auto f : kept) reduced.push_back(doc.features[f]);
      doc.features = std::move(reduced);
    }
  }
  return FeatureSelection{Dataset(std::move(groups), k), std::move(kept)};
}

}  // namespace rcrank
