#include "rcrank/ensemble.hpp"

#include <string>

#include "rcrank/error.hpp"

namespace rcrank {

std::string_view to_string(TreeVariant variant) {
  return variant == TreeVariant::kOblivious ? "oblivious" : "standard";
}

TreeVariant parse_variant(std::string_view text) {
  if (text == "oblivious") return TreeVariant::kOblivious;
  if (text == "standard") return TreeVariant::kStandard;
  throw ConfigError("unknown tree variant '" + std::string(text) +
                    "', expected standard or oblivious");
}

Ensemble::Ensemble(TreeVariant variant, std::size_t feature_count, MetricConfig metric)
    : variant_(variant), feature_count_(feature_count), metric_(metric) {}

void Ensemble::add(ObliviousTree tree, double weight) {
  if (variant_ != TreeVariant::kOblivious) {
    throw Error("cannot add an oblivious tree to a standard ensemble");
  }
  for (const auto& rule : tree.rules) {
    if (rule.feature >= feature_count_) {
      throw Error("rule references feature " + std::to_string(rule.feature) + " but the model has " +
                  std::to_string(feature_count_) + " features");
    }
  }
  tables_.emplace_back(tree);
  oblivious_.push_back(std::move(tree));
  weights_.push_back(weight);
}

void Ensemble::add(RegressionTree tree, double weight) {
  if (variant_ != TreeVariant::kStandard) {
    throw Error("cannot add a standard tree to an oblivious ensemble");
  }
  if (tree.nodes.empty()) throw Error("regression tree has no nodes");
  for (const auto& node : tree.nodes) {
    if (!node.is_leaf && node.rule.feature >= feature_count_) {
      throw Error("rule references feature " + std::to_string(node.rule.feature) +
                  " but the model has " + std::to_string(feature_count_) + " features");
    }
  }
  standard_.push_back(std::move(tree));
  weights_.push_back(weight);
}

void Ensemble::truncate(std::size_t length) {
  if (length >= size()) return;
  weights_.resize(length);
  if (variant_ == TreeVariant::kOblivious) {
    oblivious_.resize(length);
    tables_.resize(length);
  } else {
    standard_.resize(length);
  }
}

void Ensemble::check_vector(std::span<const double> x) const {
  if (x.size() != feature_count_) {
    throw Error("feature vector has " + std::to_string(x.size()) + " entries, model expects " +
                std::to_string(feature_count_));
  }
}

double Ensemble::tree_output(std::size_t t, std::span<const double> x) const {
  return variant_ == TreeVariant::kOblivious ? tables_[t].score(x) : standard_[t].evaluate(x);
}

double Ensemble::score(std::span<const double> x) const {
  check_vector(x);
  double total = 0.0;
  if (variant_ == TreeVariant::kOblivious) {
    for (std::size_t t = 0; t < tables_.size(); ++t) total += weights_[t] * tables_[t].score(x);
  } else {
    for (std::size_t t = 0; t < standard_.size(); ++t) {
      total += weights_[t] * standard_[t].evaluate(x);
    }
  }
  return total;
}

double Ensemble::score_by_traversal(std::span<const double> x) const {
  check_vector(x);
  if (variant_ == TreeVariant::kStandard) return score(x);
  double total = 0.0;
  for (std::size_t t = 0; t < oblivious_.size(); ++t) {
    total += weights_[t] * oblivious_[t].evaluate_by_traversal(x);
  }
  return total;
}

bool Ensemble::operator==(const Ensemble& other) const {
  return variant_ == other.variant_ && feature_count_ == other.feature_count_ &&
         metric_ == other.metric_ && weights_ == other.weights_ &&
         oblivious_ == other.oblivious_ && standard_ == other.standard_;
}

GroupScores predict_scores(const Ensemble& ensemble, const Dataset& dataset) {
  if (dataset.feature_count() != ensemble.feature_count()) {
    throw Error("dataset has " + std::to_string(dataset.feature_count()) +
                " features, model expects " + std::to_string(ensemble.feature_count()));
  }
  GroupScores scores;
  scores.reserve(dataset.query_count());
  for (const auto& group : dataset.groups()) {
    std::vector<double> s;
    s.reserve(group.size());
    for (const auto& doc : group.documents) s.push_back(ensemble.score(doc.features));
    scores.push_back(std::move(s));
  }
  return scores;
}

}  // namespace rcrank
