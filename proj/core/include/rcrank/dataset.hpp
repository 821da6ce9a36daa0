#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace rcrank {

using QueryId = std::uint64_t;

struct Document {
  std::vector<double> features;
  int label = 1;
  std::size_t original_index = 0;

  bool operator==(const Document&) const = default;
};

struct QueryGroup {
  QueryId query_id = 0;
  std::vector<Document> documents;

  std::size_t size() const noexcept { return documents.size(); }
  std::vector<int> labels() const;

  bool operator==(const QueryGroup&) const = default;
};

/// One LibSVM row before grouping and label alignment.
struct ParsedRow {
  int label = 0;
  QueryId query_id = 0;
  std::vector<double> features;

  bool operator==(const ParsedRow&) const = default;
};

/// Parses `<label> qid:<qid> (<idx>:<value>)* [# comment]`. Feature indices
/// are 1-based and strictly increasing; absent features are 0.0. `line_number`
/// only decorates error messages.
ParsedRow parse_line(std::string_view text, std::size_t feature_count,
                     std::size_t line_number = 0);

/// Query groups with dense feature vectors. Groups keep the order in which
/// their qid first appeared; documents keep file order.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<QueryGroup> groups, std::size_t feature_count);

  const std::vector<QueryGroup>& groups() const noexcept { return groups_; }
  std::size_t feature_count() const noexcept { return feature_count_; }
  std::size_t query_count() const noexcept { return groups_.size(); }
  std::size_t row_count() const noexcept { return rows_; }
  bool empty() const noexcept { return groups_.empty(); }
  std::pair<int, int> label_range() const noexcept { return label_range_; }

  std::vector<QueryId> query_ids() const;

  /// Groups whose qid is in `ids`, in the order of `ids`. Unknown ids throw.
  Dataset subset(std::span<const QueryId> ids) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<QueryGroup> groups_;
  std::size_t feature_count_ = 0;
  std::size_t rows_ = 0;
  std::pair<int, int> label_range_{0, 0};
};

/// Loads a LibSVM ranking file. When `feature_count` is omitted it is the
/// largest feature index seen. Labels are shifted so the minimum becomes 1.
Dataset load_dataset(const std::filesystem::path& path,
                     std::optional<std::size_t> feature_count = std::nullopt);
Dataset read_dataset(std::istream& in,
                     std::optional<std::size_t> feature_count = std::nullopt);

/// Writes rows back in LibSVM form (non-zero features only, shortest
/// round-trip decimals).
void write_dataset(const Dataset& dataset, std::ostream& out);

struct DatasetStats {
  std::size_t queries = 0;
  std::size_t rows = 0;
  double mean_docs = 0.0;
  std::size_t median_docs = 0;
  std::size_t max_docs = 0;
  std::size_t min_docs = 0;
  std::size_t features = 0;
};

/// Median uses the lower middle element for even counts.
DatasetStats dataset_stats(const Dataset& dataset);

struct FoldSplit {
  std::size_t fold_index = 0;
  std::vector<QueryId> train;
  std::vector<QueryId> valid;
  std::vector<QueryId> test;

  bool operator==(const FoldSplit&) const = default;
};

/// Shuffles the query ids once and cuts them into `n_folds` near-equal
/// buckets. Fold k tests on bucket k+n-1, validates on bucket k+n-2 and
/// trains on the rest (indices mod n). With n_folds == 2 there is no
/// validation bucket.
std::vector<FoldSplit> split_folds(const Dataset& dataset, std::size_t n_folds,
                                   std::uint64_t seed);

/// Draws whole query groups in seeded random order until the document count
/// first reaches target_fraction * rows. Selected groups keep dataset order.
Dataset subsample(const Dataset& dataset, double target_fraction, std::uint64_t seed);

/// Seeded Fisher-Yates over mt19937_64; identical across standard libraries.
template <class T>
void deterministic_shuffle(std::vector<T>& values, std::uint64_t seed);

}  // namespace rcrank

#include <random>

namespace rcrank {

template <class T>
void deterministic_shuffle(std::vector<T>& values, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace rcrank
