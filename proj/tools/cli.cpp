#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rcrank/rcrank.hpp"
#include "rcrank/numeric_text.hpp"

namespace rcrank::cli {

namespace {

struct TrainFlags {
  std::string variant;
  std::size_t leaves = 0;
  double lr = 0.0;
  std::size_t max_trees = 1000;
  std::string metric = "ndcg@10";
  double sigma = 1.0;
  std::uint64_t seed = 42;
  std::size_t threads = 0;

  // Grid takes lists for the tree shape, so it skips the scalar flags.
  void attach(CLI::App* cmd, bool with_shape) {
    if (with_shape) {
      cmd->add_option("--variant", variant, "standard or oblivious")->required();
      cmd->add_option("--leaves", leaves, "leaves per tree (power of two for oblivious)")
          ->required();
      cmd->add_option("--lr", lr, "learning rate")->required();
    }
    cmd->add_option("--max-trees", max_trees, "maximum forest size")->capture_default_str();
    cmd->add_option("--metric", metric, "optimised and reported metric, ndcg@<k>")
        ->capture_default_str();
    cmd->add_option("--sigma", sigma, "lambda sigmoid steepness")->capture_default_str();
    cmd->add_option("--seed", seed, "seed for fold and subsample shuffling")->capture_default_str();
    cmd->add_option("--threads", threads, "worker threads (default: all cores)");
  }

  TrainConfig config() const {
    TrainConfig c;
    if (!variant.empty()) c.variant = parse_variant(variant);
    c.leaves = leaves;
    c.learning_rate = lr;
    c.max_trees = max_trees;
    c.metric = parse_metric(metric);
    c.sigma = sigma;
    c.seed = seed;
    c.threads = threads;
    return c;
  }
};

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const auto value = parse_number<T>(item);
    if (!value) throw ConfigError(std::string("invalid ") + what + " '" + item + "'");
    values.push_back(*value);
  }
  if (values.empty()) throw ConfigError(std::string("empty ") + what + " list");
  return values;
}

std::vector<TreeVariant> parse_variants(const std::string& text) {
  std::vector<TreeVariant> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) values.push_back(parse_variant(item));
  if (values.empty()) throw ConfigError("empty variant list");
  return values;
}

// Loads train and optional valid files with a shared feature count.
std::pair<Dataset, Dataset> load_pair(const std::string& train_path, const std::string& valid_path) {
  Dataset train_set = load_dataset(train_path);
  if (valid_path.empty()) return {std::move(train_set), Dataset{}};
  Dataset valid_set = load_dataset(valid_path);
  const std::size_t l = std::max(train_set.feature_count(), valid_set.feature_count());
  if (train_set.feature_count() != l) train_set = load_dataset(train_path, l);
  if (valid_set.feature_count() != l) valid_set = load_dataset(valid_path, l);
  return {std::move(train_set), std::move(valid_set)};
}

void write_per_query(const std::string& path, std::span<const QueryId> ids,
                     std::span<const double> values) {
  auto out = open_output(path);
  for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << ' ' << format_real(values[i]) << '\n';
}

std::vector<double> read_per_query(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::vector<double> values;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::istringstream tokens(line);
    std::string token;
    std::string last;
    while (tokens >> token) last = token;
    if (last.empty()) continue;
    const auto value = parse_number<double>(last);
    if (!value) {
      throw ParseError(ParseError::Kind::kMalformed, line_number,
                       path + ": invalid score '" + last + "'");
    }
    values.push_back(*value);
  }
  return values;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"LambdaMART learning to rank with standard or oblivious trees", "rcrank"};
  app.require_subcommand(1);

  // train
  TrainFlags train_flags;
  std::string train_path, valid_path, model_path;
  auto* train_cmd = app.add_subcommand("train", "train a ranking model");
  train_cmd->add_option("--train", train_path, "training data (LibSVM)")->required();
  train_cmd->add_option("--valid", valid_path, "validation data used to cut the forest");
  train_cmd->add_option("--model", model_path, "output model file")->required();
  train_flags.attach(train_cmd, true);

  // predict
  std::string data_path, output_path;
  auto* predict_cmd = app.add_subcommand("predict", "score every row of a dataset");
  predict_cmd->add_option("--model", model_path)->required();
  predict_cmd->add_option("--data", data_path)->required();
  predict_cmd->add_option("--output", output_path, "one score per line")->required();

  // eval
  std::string metric_text = "ndcg@10";
  std::string per_query_path;
  auto* eval_cmd = app.add_subcommand("eval", "mean NDCG@k of a model on a dataset");
  eval_cmd->add_option("--model", model_path)->required();
  eval_cmd->add_option("--data", data_path)->required();
  eval_cmd->add_option("--metric", metric_text)->capture_default_str();
  eval_cmd->add_option("--per-query", per_query_path, "write '<qid> <ndcg>' lines");

  // cv
  TrainFlags cv_flags;
  std::size_t folds = 5;
  std::string report_path;
  std::optional<double> train_fraction;
  auto* cv_cmd = app.add_subcommand("cv", "query-wise k-fold cross-validation");
  cv_cmd->add_option("--data", data_path)->required();
  cv_cmd->add_option("--folds", folds)->capture_default_str();
  cv_cmd->add_option("--report", report_path, "results CSV")->required();
  cv_cmd->add_option("--train-fraction", train_fraction, "subsample each training split");
  cv_cmd->add_option("--per-query", per_query_path, "write pooled '<qid> <ndcg>' test lines");
  cv_flags.attach(cv_cmd, true);

  // grid
  TrainFlags grid_flags;
  std::string grid_variants = "oblivious,standard";
  std::string grid_leaves = "8,16,32,64";
  std::string grid_rates = "0.11,0.13,0.15,0.17,0.19";
  auto* grid_cmd = app.add_subcommand("grid", "cross-validate a leaves x learning-rate grid");
  grid_cmd->add_option("--data", data_path)->required();
  grid_cmd->add_option("--folds", folds)->capture_default_str();
  grid_cmd->add_option("--report", report_path, "results CSV")->required();
  grid_cmd->add_option("--train-fraction", train_fraction, "subsample each training split");
  grid_flags.attach(grid_cmd, false);
  grid_cmd->add_option("--variant", grid_variants, "comma-separated variants")->capture_default_str();
  grid_cmd->add_option("--leaves", grid_leaves, "comma-separated leaf counts")->capture_default_str();
  grid_cmd->add_option("--lr", grid_rates, "comma-separated learning rates")->capture_default_str();

  // feature-stats
  std::vector<std::string> model_paths;
  std::size_t top = 50;
  std::string mapping_path;
  auto* features_cmd = app.add_subcommand("feature-stats", "rank features by rule occurrences");
  features_cmd->add_option("--models", model_paths)->required();
  features_cmd->add_option("--top", top)->capture_default_str();
  features_cmd->add_option("--mapping", mapping_path, "write '<old> <new>' 1-based indices")
      ->required();
  features_cmd->add_option("--data", data_path, "dataset to reduce to the top features");
  features_cmd->add_option("--output", output_path, "reduced dataset (LibSVM)");

  // significance
  std::string a_path, b_path;
  auto* significance_cmd = app.add_subcommand("significance", "paired t-test on per-query scores");
  significance_cmd->add_option("--a", a_path)->required();
  significance_cmd->add_option("--b", b_path)->required();

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "dataset summary");
  stats_cmd->add_option("--data", data_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (train_cmd->parsed()) {
      const TrainConfig config = train_flags.config();
      config.validate();
      const auto [train_set, valid_set] = load_pair(train_path, valid_path);
      const auto result = train(train_set, valid_set, config, [&](const IterationRecord& r) {
        err << format_progress(r, config.metric) << '\n';
      });
      save_model(result.ensemble, model_path);
      err << "trees=" << result.ensemble.size() << " of " << result.full_length << '\n';
    } else if (predict_cmd->parsed()) {
      const Ensemble model = load_model(model_path);
      const Dataset data = load_dataset(data_path, model.feature_count());
      auto file = open_output(output_path);
      for (const auto& group : data.groups()) {
        for (const auto& doc : group.documents) file << format_real(model.score(doc.features)) << '\n';
      }
    } else if (eval_cmd->parsed()) {
      const MetricConfig metric = parse_metric(metric_text);
      const Ensemble model = load_model(model_path);
      const Dataset data = load_dataset(data_path, model.feature_count());
      const auto per_query = per_query_ndcg(data, predict_scores(model, data), metric);
      double mean = 0.0;
      for (const double v : per_query) mean += v;
      mean /= static_cast<double>(per_query.size());
      out << format_fixed(mean, 6) << '\n';
      if (!per_query_path.empty()) write_per_query(per_query_path, data.query_ids(), per_query);
    } else if (cv_cmd->parsed()) {
      const TrainConfig config = cv_flags.config();
      config.validate();
      const Dataset data = load_dataset(data_path);
      const GridCell cell = run_cv(data, config, CvOptions{folds, train_fraction});
      auto report = open_output(report_path);
      write_results(std::span(&cell, 1), config.metric, report);
      for (const auto& fold : cell.folds) {
        err << "fold=" << fold.fold << " test_" << config.metric.name() << '='
            << format_fixed(fold.test_metric, 6) << " trees=" << fold.trees << '\n';
      }
      out << format_fixed(cell.mean, 6) << '\n';
      if (!per_query_path.empty()) {
        std::vector<QueryId> ids;
        for (const auto& fold : cell.folds) {
          ids.insert(ids.end(), fold.test_queries.begin(), fold.test_queries.end());
        }
        write_per_query(per_query_path, ids, cell.pooled_per_query());
      }
    } else if (grid_cmd->parsed()) {
      TrainConfig base = grid_flags.config();
      const auto variants = parse_variants(grid_variants);
      const auto leaves = parse_list<std::size_t>(grid_leaves, "leaf count");
      const auto rates = parse_list<double>(grid_rates, "learning rate");
      for (const auto v : variants) {
        for (const auto l : leaves) {
          for (const auto r : rates) {
            TrainConfig probe = base;
            probe.variant = v;
            probe.leaves = l;
            probe.learning_rate = r;
            probe.validate();
          }
        }
      }
      const Dataset data = load_dataset(data_path);
      const GridResult result =
          run_grid(data, variants, leaves, rates, base, CvOptions{folds, train_fraction});
      auto report = open_output(report_path);
      write_results(result.cells, base.metric, report);
      out << format_report(result, base.metric);
      if (!result.failures.empty()) return kRuntime;
    } else if (features_cmd->parsed()) {
      std::vector<Ensemble> models;
      for (const auto& path : model_paths) models.push_back(load_model(path));
      const FeatureUsage usage = feature_usage(models);
      if (top == 0 || top > usage.counts.size()) {
        throw ConfigError("--top must be in [1, " + std::to_string(usage.counts.size()) + "]");
      }
      const auto ranked = usage.ranked();
      for (const auto f : ranked) out << (f + 1) << ' ' << usage.counts[f] << '\n';

      std::vector<std::size_t> kept(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(top));
      std::sort(kept.begin(), kept.end());
      auto mapping = open_output(mapping_path);
      for (std::size_t n = 0; n < kept.size(); ++n) mapping << (kept[n] + 1) << ' ' << (n + 1) << '\n';

      if (!data_path.empty()) {
        if (output_path.empty()) throw ConfigError("--data requires --output");
        const Dataset data = load_dataset(data_path, usage.counts.size());
        const FeatureSelection selection = select_top_features(data, usage, top);
        auto file = open_output(output_path);
        write_dataset(selection.dataset, file);
      }
    } else if (significance_cmd->parsed()) {
      const auto a = read_per_query(a_path);
      const auto b = read_per_query(b_path);
      const auto test = paired_t_test(a, b);
      out << "p_value=" << format_real(test.p_value) << " t=" << format_fixed(test.t_statistic, 6)
          << " n=" << test.n << " mean_difference=" << format_real(test.mean_difference)
          << " test=" << kPairedTestName << '\n';
    } else if (stats_cmd->parsed()) {
      const DatasetStats s = dataset_stats(load_dataset(data_path));
      out << "queries=" << s.queries << " rows=" << s.rows << " mean=" << format_fixed(s.mean_docs, 2)
          << " median=" << s.median_docs << " max=" << s.max_docs << " min=" << s.min_docs
          << " features=" << s.features << '\n';
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}

}  // namespace rcrank::cli
