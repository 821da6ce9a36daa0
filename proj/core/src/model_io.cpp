#include "rcrank/model_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rcrank/error.hpp"
#include "rcrank/numeric_text.hpp"

namespace rcrank {

void save_model(const Ensemble& ensemble, std::ostream& out) {
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "variant " << to_string(ensemble.variant()) << '\n';
  out << "features " << ensemble.feature_count() << '\n';
  out << "metric " << ensemble.metric().name() << '\n';
  out << "trees " << ensemble.size() << '\n';
  for (std::size_t t = 0; t < ensemble.size(); ++t) {
    const std::string weight = format_real(ensemble.weights()[t]);
    if (ensemble.variant() == TreeVariant::kOblivious) {
      const auto& tree = ensemble.oblivious_trees()[t];
      out << "tree " << t << " weight " << weight << " depth " << tree.depth() << '\n';
      for (std::size_t d = 0; d < tree.depth(); ++d) {
        out << "rule " << d << ' ' << tree.rules[d].feature << ' '
            << format_real(tree.rules[d].threshold) << '\n';
      }
      out << "leaves";
      for (const double v : tree.leaf_values) out << ' ' << format_real(v);
      out << '\n';
    } else {
      const auto& tree = ensemble.standard_trees()[t];
      out << "tree " << t << " weight " << weight << " nodes " << tree.nodes.size() << '\n';
      for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
        const auto& node = tree.nodes[id];
        if (node.is_leaf) {
          out << "node " << id << " leaf " << format_real(node.value) << '\n';
        } else {
          out << "node " << id << " split " << node.rule.feature << ' '
              << format_real(node.rule.threshold) << ' ' << node.left << ' ' << node.right << '\n';
        }
      }
    }
  }
  if (!out) throw Error("failed to write model");
}

void save_model(const Ensemble& ensemble, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  save_model(ensemble, out);
  out.flush();
  if (!out) throw Error("failed to write model to '" + path.string() + "'");
}

namespace {

using Kind = ParseError::Kind;

class ModelReader {
 public:
  explicit ModelReader(std::istream& in) : in_(in) {}

  // Next line split on single spaces; `expected` names the section for EOF errors.
  std::vector<std::string_view> next(std::string_view expected) {
    if (!std::getline(in_, line_)) {
      throw ParseError(Kind::kMalformed, line_number_ + 1,
                       "unexpected end of file, expected '" + std::string(expected) + "'");
    }
    ++line_number_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    std::vector<std::string_view> tokens;
    std::string_view rest(line_);
    while (!rest.empty()) {
      const auto space = rest.find(' ');
      const auto token = rest.substr(0, space);
      if (!token.empty()) tokens.push_back(token);
      if (space == std::string_view::npos) break;
      rest.remove_prefix(space + 1);
    }
    if (tokens.empty() || tokens[0] != expected) {
      fail("expected '" + std::string(expected) + "'");
    }
    return tokens;
  }

  void expect_count(const std::vector<std::string_view>& tokens, std::size_t n) const {
    if (tokens.size() != n) {
      fail("'" + std::string(tokens[0]) + "' line needs " + std::to_string(n - 1) + " fields, got " +
           std::to_string(tokens.size() - 1));
    }
  }

  template <class T>
  T number(std::string_view token, std::string_view what) const {
    const auto value = parse_number<T>(token);
    if (!value) fail("invalid " + std::string(what) + " '" + std::string(token) + "'");
    return *value;
  }

  void expect_keyword(std::string_view token, std::string_view keyword) const {
    if (token != keyword) {
      fail("expected '" + std::string(keyword) + "', got '" + std::string(token) + "'");
    }
  }

  [[noreturn]] void fail(const std::string& message, Kind kind = Kind::kMalformed) const {
    throw ParseError(kind, line_number_, message);
  }

  bool at_end() {
    std::string rest;
    while (std::getline(in_, rest)) {
      ++line_number_;
      if (!rest.empty() && rest != "\r") return false;
    }
    return true;
  }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t line_number_ = 0;
};

void check_structure(const RegressionTree& tree, const ModelReader& reader) {
  std::vector<int> parents(tree.nodes.size(), 0);
  for (const auto& node : tree.nodes) {
    if (node.is_leaf) continue;
    for (const auto child : {node.left, node.right}) {
      if (child == 0 || child >= tree.nodes.size()) {
        reader.fail("node child id " + std::to_string(child) + " out of range", Kind::kFormat);
      }
      ++parents[child];
    }
  }
  for (std::size_t id = 1; id < tree.nodes.size(); ++id) {
    if (parents[id] != 1) {
      reader.fail("node " + std::to_string(id) + " is not referenced by exactly one parent",
                  Kind::kFormat);
    }
  }
  // Unique parents plus an unreferenced root can still hide a detached cycle.
  std::vector<std::uint32_t> stack{0};
  std::size_t reached = 0;
  while (!stack.empty()) {
    const auto id = stack.back();
    stack.pop_back();
    ++reached;
    if (!tree.nodes[id].is_leaf) {
      stack.push_back(tree.nodes[id].left);
      stack.push_back(tree.nodes[id].right);
    }
  }
  if (reached != tree.nodes.size()) reader.fail("tree contains unreachable nodes", Kind::kFormat);
}

}  // namespace

Ensemble load_model(std::istream& in) {
  ModelReader reader(in);

  auto tokens = reader.next(kModelMagic);
  reader.expect_count(tokens, 2);
  if (reader.number<int>(tokens[1], "version") != kModelVersion) {
    reader.fail("unsupported model version " + std::string(tokens[1]) + ", expected " +
                std::to_string(kModelVersion), Kind::kFormat);
  }

  tokens = reader.next("variant");
  reader.expect_count(tokens, 2);
  TreeVariant variant{};
  try {
    variant = parse_variant(tokens[1]);
  } catch (const ConfigError& e) {
    reader.fail(e.what());
  }

  tokens = reader.next("features");
  reader.expect_count(tokens, 2);
  const auto features = reader.number<std::size_t>(tokens[1], "feature count");

  tokens = reader.next("metric");
  reader.expect_count(tokens, 2);
  MetricConfig metric;
  try {
    metric = parse_metric(tokens[1]);
  } catch (const ConfigError& e) {
    reader.fail(e.what());
  }

  tokens = reader.next("trees");
  reader.expect_count(tokens, 2);
  const auto tree_count = reader.number<std::size_t>(tokens[1], "tree count");

  Ensemble ensemble(variant, features, metric);
  for (std::size_t t = 0; t < tree_count; ++t) {
    tokens = reader.next("tree");
    reader.expect_count(tokens, 6);
    if (reader.number<std::size_t>(tokens[1], "tree index") != t) {
      reader.fail("expected tree index " + std::to_string(t), Kind::kFormat);
    }
    reader.expect_keyword(tokens[2], "weight");
    const double weight = reader.number<double>(tokens[3], "tree weight");

    if (variant == TreeVariant::kOblivious) {
      reader.expect_keyword(tokens[4], "depth");
      const auto depth = reader.number<std::size_t>(tokens[5], "depth");
      if (depth > 20) reader.fail("depth " + std::to_string(depth) + " exceeds 20", Kind::kRange);
      ObliviousTree tree;
      for (std::size_t d = 0; d < depth; ++d) {
        tokens = reader.next("rule");
        reader.expect_count(tokens, 4);
        if (reader.number<std::size_t>(tokens[1], "level") != d) {
          reader.fail("expected rule level " + std::to_string(d), Kind::kFormat);
        }
        const auto feature = reader.number<std::size_t>(tokens[2], "feature");
        if (feature >= features) {
          reader.fail("feature " + std::to_string(feature) + " out of range", Kind::kRange);
        }
        tree.rules.push_back({feature, reader.number<double>(tokens[3], "threshold")});
      }
      tokens = reader.next("leaves");
      const std::size_t expected = std::size_t{1} << depth;
      if (tokens.size() - 1 != expected) {
        reader.fail("expected " + std::to_string(expected) + " leaf values for depth " +
                    std::to_string(depth) + ", got " + std::to_string(tokens.size() - 1),
                    Kind::kFormat);
      }
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        tree.leaf_values.push_back(reader.number<double>(tokens[i], "leaf value"));
      }
      ensemble.add(std::move(tree), weight);
    } else {
      reader.expect_keyword(tokens[4], "nodes");
      const auto node_count = reader.number<std::size_t>(tokens[5], "node count");
      if (node_count == 0) reader.fail("a tree needs at least one node", Kind::kFormat);
      RegressionTree tree;
      tree.nodes.resize(node_count);
      for (std::size_t id = 0; id < node_count; ++id) {
        tokens = reader.next("node");
        if (tokens.size() < 3) reader.fail("truncated node line");
        if (reader.number<std::size_t>(tokens[1], "node id") != id) {
          reader.fail("expected node id " + std::to_string(id), Kind::kFormat);
        }
        auto& node = tree.nodes[id];
        if (tokens[2] == "leaf") {
          reader.expect_count(tokens, 4);
          node.value = reader.number<double>(tokens[3], "leaf value");
        } else if (tokens[2] == "split") {
          reader.expect_count(tokens, 7);
          node.is_leaf = false;
          node.rule.feature = reader.number<std::size_t>(tokens[3], "feature");
          if (node.rule.feature >= features) {
            reader.fail("feature " + std::to_string(node.rule.feature) + " out of range",
                        Kind::kRange);
          }
          node.rule.threshold = reader.number<double>(tokens[4], "threshold");
          node.left = reader.number<std::uint32_t>(tokens[5], "left child");
          node.right = reader.number<std::uint32_t>(tokens[6], "right child");
        } else {
          reader.fail("expected 'leaf' or 'split', got '" + std::string(tokens[2]) + "'");
        }
      }
      check_structure(tree, reader);
      ensemble.add(std::move(tree), weight);
    }
  }
  if (!reader.at_end()) reader.fail("unexpected content after the last tree");
  return ensemble;
}

Ensemble load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model '" + path.string() + "'");
  return load_model(in);
}

}  // namespace rcrank
