#ifndef UNIFSEL_DATASET_HPP
#define UNIFSEL_DATASET_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace unifsel {

// Column-oriented matrix of category codes. Codes in column i live in
// [0, cardinalities[i]); one designated column is the class attribute.
// Immutable after construction; all operations below are pure.
struct DiscreteDataset {
  std::vector<std::string> feature_names;  // one per column, class included
  std::vector<int> cardinalities;         // one per column, class included
  std::vector<std::vector<std::int32_t>> columns;
  int class_index = -1;
  // raw value behind each code, per column; decode(encode(v)) == v.
  // May be empty for synthetic data, in which case codes print as-is.
  std::vector<std::vector<std::string>> levels;

  std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
  std::size_t n_columns() const { return columns.size(); }
  int class_cardinality() const { return cardinalities[class_index]; }

  // all column indices except the class attribute
  std::vector<int> feature_indices() const;

  std::string decode(int column, std::int32_t code) const;

  // throws std::runtime_error on any invariant violation
  void validate() const;
};

struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;  // per-row fold index in [0, k)
  std::uint64_t seed = 0;
};

struct DiscretizeWarning {
  int column;
  std::string message;
};

enum class BinStrategy { EqualFrequency, EqualWidth };

// CSV ingestion: UTF-8, comma-separated, one header row, quoted fields
// allowed. Codes are assigned per column in first-appearance order.
// class_spec is a header name or a 0-based column index.
DiscreteDataset load_csv(const std::string& path, const std::string& class_spec);
DiscreteDataset load_csv_text(const std::string& text, const std::string& class_spec);

void save_csv(const DiscreteDataset& data, const std::string& path);

// Native dataset format: JSON with feature_names, cardinalities,
// class_index, columns (and levels when known). Round-trips bit-exactly.
void save_dataset_json(const DiscreteDataset& data, const std::string& path);
DiscreteDataset load_dataset_json(const std::string& path);

// Re-bins every numeric column (all level strings parse as numbers and the
// column has more distinct values than bins). Constant columns collapse to a
// single bin and produce a warning instead of an error.
DiscreteDataset discretize(const DiscreteDataset& data, int bins, BinStrategy strategy,
                           std::vector<DiscretizeWarning>* warnings = nullptr);

// Stratified k-fold assignment, deterministic per (data, k, seed).
FoldPlan make_folds(const DiscreteDataset& data, int k, std::uint64_t seed);

// Row subsets sharing the parent's schema.
DiscreteDataset take_rows(const DiscreteDataset& data, const std::vector<std::size_t>& row_ids);

}  // namespace unifsel

#endif
