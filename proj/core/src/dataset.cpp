#include "rcrank/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <unordered_map>

#include "rcrank/error.hpp"
#include "rcrank/numeric_text.hpp"

namespace rcrank {

namespace {

struct SparseRow {
  int label = 0;
  QueryId query_id = 0;
  std::vector<std::pair<std::size_t, double>> entries;  // 1-based index
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string_view next_token(std::string_view& rest) {
  std::size_t begin = 0;
  while (begin < rest.size() && is_space(rest[begin])) ++begin;
  std::size_t end = begin;
  while (end < rest.size() && !is_space(rest[end])) ++end;
  const auto token = rest.substr(begin, end - begin);
  rest.remove_prefix(end);
  return token;
}

std::string_view strip_comment(std::string_view text) {
  if (const auto hash = text.find('#'); hash != std::string_view::npos) {
    text = text.substr(0, hash);
  }
  return text;
}

bool is_blank(std::string_view text) {
  return std::all_of(text.begin(), text.end(), is_space);
}

// Parses without the feature-count range check, which needs the whole file
// when the count is inferred.
SparseRow parse_sparse(std::string_view text, std::size_t line_number) {
  using Kind = ParseError::Kind;
  std::string_view rest = strip_comment(text);
  SparseRow row;

  const auto label_token = next_token(rest);
  const auto label = parse_number<int>(label_token);
  if (!label) {
    throw ParseError(Kind::kMalformed, line_number,
                     "invalid relevance label '" + std::string(label_token) + "'");
  }
  row.label = *label;

  const auto qid_token = next_token(rest);
  if (!qid_token.starts_with("qid:")) {
    throw ParseError(Kind::kMalformed, line_number,
                     "expected qid:<int>, got '" + std::string(qid_token) + "'");
  }
  const auto qid = parse_number<QueryId>(qid_token.substr(4));
  if (!qid) {
    throw ParseError(Kind::kMalformed, line_number,
                     "invalid query id '" + std::string(qid_token) + "'");
  }
  row.query_id = *qid;

  std::size_t previous = 0;
  for (auto token = next_token(rest); !token.empty(); token = next_token(rest)) {
    const auto colon = token.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(Kind::kMalformed, line_number,
                       "expected <index>:<value>, got '" + std::string(token) + "'");
    }
    const auto index = parse_number<std::size_t>(token.substr(0, colon));
    const auto value = parse_number<double>(token.substr(colon + 1));
    if (!index || !value || *index == 0) {
      throw ParseError(Kind::kMalformed, line_number,
                       "invalid feature token '" + std::string(token) + "'");
    }
    if (*index == previous) {
      throw ParseError(Kind::kFormat, line_number,
                       "duplicate feature index " + std::to_string(*index));
    }
    if (*index < previous) {
      throw ParseError(Kind::kFormat, line_number,
                       "feature indices must be strictly increasing (" +
                           std::to_string(*index) + " after " + std::to_string(previous) + ")");
    }
    previous = *index;
    row.entries.emplace_back(*index, *value);
  }
  return row;
}

void check_range(const SparseRow& row, std::size_t feature_count, std::size_t line_number) {
  if (!row.entries.empty() && row.entries.back().first > feature_count) {
    throw ParseError(ParseError::Kind::kRange, line_number,
                     "feature index " + std::to_string(row.entries.back().first) +
                         " exceeds feature count " + std::to_string(feature_count));
  }
}

std::vector<double> densify(const SparseRow& row, std::size_t feature_count) {
  std::vector<double> dense(feature_count, 0.0);
  for (const auto& [index, value] : row.entries) dense[index - 1] = value;
  return dense;
}

}  // namespace

std::vector<int> QueryGroup::labels() const {
  std::vector<int> out;
  out.reserve(documents.size());
  for (const auto& d : documents) out.push_back(d.label);
  return out;
}

ParsedRow parse_line(std::string_view text, std::size_t feature_count,
                     std::size_t line_number) {
  const SparseRow sparse = parse_sparse(text, line_number);
  check_range(sparse, feature_count, line_number);
  return ParsedRow{sparse.label, sparse.query_id, densify(sparse, feature_count)};
}

Dataset::Dataset(std::vector<QueryGroup> groups, std::size_t feature_count)
    : groups_(std::move(groups)), feature_count_(feature_count) {
  int lo = std::numeric_limits<int>::max();
  int hi = std::numeric_limits<int>::min();
  for (const auto& group : groups_) {
    rows_ += group.documents.size();
    for (const auto& doc : group.documents) {
      if (doc.features.size() != feature_count_) {
        throw Error("document in query " + std::to_string(group.query_id) + " has " +
                    std::to_string(doc.features.size()) + " features, expected " +
                    std::to_string(feature_count_));
      }
      lo = std::min(lo, doc.label);
      hi = std::max(hi, doc.label);
    }
  }
  if (rows_ > 0) label_range_ = {lo, hi};
}

std::vector<QueryId> Dataset::query_ids() const {
  std::vector<QueryId> ids;
  ids.reserve(groups_.size());
  for (const auto& g : groups_) ids.push_back(g.query_id);
  return ids;
}

Dataset Dataset::subset(std::span<const QueryId> ids) const {
  std::unordered_map<QueryId, std::size_t> position;
  position.reserve(groups_.size());
  for (std::size_t i = 0; i < groups_.size(); ++i) position.emplace(groups_[i].query_id, i);

  std::vector<QueryGroup> picked;
  picked.reserve(ids.size());
  for (const QueryId id : ids) {
    const auto it = position.find(id);
    if (it == position.end()) throw Error("unknown query id " + std::to_string(id));
    picked.push_back(groups_[it->second]);
  }
  return Dataset(std::move(picked), feature_count_);
}

Dataset read_dataset(std::istream& in, std::optional<std::size_t> feature_count) {
  std::vector<SparseRow> rows;
  std::vector<std::size_t> line_numbers;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (is_blank(strip_comment(line))) continue;
    SparseRow row = parse_sparse(line, line_number);
    if (feature_count) check_range(row, *feature_count, line_number);
    if (!row.entries.empty()) max_index = std::max(max_index, row.entries.back().first);
    rows.push_back(std::move(row));
    line_numbers.push_back(line_number);
  }
  if (rows.empty()) throw Error("dataset contains no rows");

  const std::size_t l = feature_count.value_or(max_index);
  const int min_label =
      std::min_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.label < b.label;
      })->label;
  const int shift = 1 - min_label;

  std::vector<QueryGroup> groups;
  std::unordered_map<QueryId, std::size_t> slot;
  for (const auto& row : rows) {
    auto [it, inserted] = slot.emplace(row.query_id, groups.size());
    if (inserted) groups.push_back(QueryGroup{row.query_id, {}});
    auto& docs = groups[it->second].documents;
    docs.push_back(Document{densify(row, l), row.label + shift, docs.size()});
  }
  return Dataset(std::move(groups), l);
}

Dataset load_dataset(const std::filesystem::path& path,
                     std::optional<std::size_t> feature_count) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset '" + path.string() + "'");
  return read_dataset(in, feature_count);
}

void write_dataset(const Dataset& dataset, std::ostream& out) {
  for (const auto& group : dataset.groups()) {
    for (const auto& doc : group.documents) {
      out << doc.label << " qid:" << group.query_id;
      for (std::size_t f = 0; f < doc.features.size(); ++f) {
        if (doc.features[f] != 0.0) out << ' ' << (f + 1) << ':' << format_real(doc.features[f]);
      }
      out << '\n';
    }
  }
}

DatasetStats dataset_stats(const Dataset& dataset) {
  if (dataset.empty()) throw Error("dataset_stats requires a non-empty dataset");
  std::vector<std::size_t> sizes;
  sizes.reserve(dataset.query_count());
  for (const auto& g : dataset.groups()) sizes.push_back(g.size());
  std::sort(sizes.begin(), sizes.end());

  DatasetStats stats;
  stats.queries = sizes.size();
  stats.rows = dataset.row_count();
  stats.mean_docs = static_cast<double>(stats.rows) / static_cast<double>(stats.queries);
  stats.median_docs = sizes[(sizes.size() - 1) / 2];
  stats.max_docs = sizes.back();
  stats.min_docs = sizes.front();
  stats.features = dataset.feature_count();
  return stats;
}

std::vector<FoldSplit> split_folds(const Dataset& dataset, std::size_t n_folds,
                                   std::uint64_t seed) {
  if (n_folds < 2) throw ConfigError("number of folds must be at least 2");
  if (dataset.query_count() < n_folds) {
    throw ConfigError("need at least " + std::to_string(n_folds) + " queries for " +
                      std::to_string(n_folds) + "-fold splitting, have " +
                      std::to_string(dataset.query_count()));
  }
  std::vector<QueryId> ids = dataset.query_ids();
  deterministic_shuffle(ids, seed);

  const std::size_t n = ids.size();
  std::vector<std::vector<QueryId>> buckets(n_folds);
  for (std::size_t b = 0; b < n_folds; ++b) {
    const std::size_t begin = b * n / n_folds;
    const std::size_t end = (b + 1) * n / n_folds;
    buckets[b].assign(ids.begin() + static_cast<std::ptrdiff_t>(begin),
                      ids.begin() + static_cast<std::ptrdiff_t>(end));
  }

  std::vector<FoldSplit> folds;
  folds.reserve(n_folds);
  for (std::size_t k = 0; k < n_folds; ++k) {
    FoldSplit split;
    split.fold_index = k;
    const std::size_t test_bucket = (k + n_folds - 1) % n_folds;
    const std::size_t valid_bucket = (k + n_folds - 2) % n_folds;
    for (std::size_t offset = 0; offset < n_folds; ++offset) {
      const std::size_t b = (k + offset) % n_folds;
      auto& target = b == test_bucket                        ? split.test
                     : (n_folds > 2 && b == valid_bucket) ? split.valid
                                                            : split.train;
      target.insert(target.end(), buckets[b].begin(), buckets[b].end());
    }
    folds.push_back(std::move(split));
  }
  return folds;
}

Dataset subsample(const Dataset& dataset, double target_fraction, std::uint64_t seed) {
  if (!(target_fraction > 0.0 && target_fraction <= 1.0)) {
    throw ConfigError("subsample fraction must be in (0, 1]");
  }
  if (dataset.empty()) return dataset;

  const auto& groups = dataset.groups();
  std::vector<std::size_t> order(groups.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  deterministic_shuffle(order, seed);

  const double target = target_fraction * static_cast<double>(dataset.row_count());
  std::vector<std::size_t> chosen;

  const auto smallest = std::min_element(order.begin(), order.end(), [&](auto a, auto b) {
    return groups[a].size() < groups[b].size();
  });
  if (static_cast<double>(groups[*smallest].size()) >= target) {
    chosen.push_back(*smallest);
  } else {
    double total = 0.0;
    for (const std::size_t g : order) {
      chosen.push_back(g);
      total += static_cast<double>(groups[g].size());
      if (total >= target) break;
    }
  }
  std::sort(chosen.begin(), chosen.end());

  std::vector<QueryGroup> picked;
  picked.reserve(chosen.size());
  for (const std::size_t g : chosen) picked.push_back(groups[g]);
  return Dataset(std::move(picked), dataset.feature_count());
}

}  // namespace rcrank
