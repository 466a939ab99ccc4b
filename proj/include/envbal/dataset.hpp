#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "envbal/types.hpp"

namespace envbal {

/// Binary labeled dataset. Labels are stored as indices into `class_names`,
/// which is kept sorted lexicographically so label order is deterministic.
struct Dataset {
  Matrix features;                         // n x d
  std::vector<int> labels;                 // n entries, each 0 or 1
  std::vector<std::string> feature_names;  // d entries
  std::array<std::string, 2> class_names;  // sorted lexicographically
  std::string label_name = "class";

  Index rows() const { return features.rows(); }
  Index dims() const { return features.cols(); }
};

struct ClassStats {
  Index min_count = 0;
  Index maj_count = 0;
  double ir = 1.0;  // maj_count / min_count
  int minority_index = 0;
  std::string minority_label;
};

/// Per-feature min-max scaler fitted on one dataset. Constant features map
/// to 0 on transform and back to their original value on inverse.
struct Scaler {
  RowVector lo;
  RowVector hi;

  Matrix transform(const Matrix& x) const;
  Matrix inverse(const Matrix& x) const;
};

/// Label column selector: 0-based column index or header name.
using LabelColumn = std::variant<Index, std::string>;

/// Throws ConfigError if any Dataset invariant is violated.
void validate(const Dataset& ds);

/// Loads an RFC-4180-style CSV with a mandatory header row. The label
/// column defaults to the last column. Columns whose header appears in
/// `ignore_columns` are dropped (the CLI uses this for its own
/// `provenance` column so balanced exports reload cleanly).
Dataset load_csv(const std::string& path,
                 const std::optional<LabelColumn>& label_column = std::nullopt,
                 const std::vector<std::string>& ignore_columns = {});

/// Loads a KEEL @relation/@attribute/@data file. Feature attributes must be
/// numeric (real/integer); the @outputs attribute becomes the label and may
/// be nominal.
Dataset load_keel(const std::string& path);

/// Writes a dataset as CSV (shortest round-trip number formatting). When
/// `provenance` is non-empty it is appended as one extra trailing column.
void save_csv(const Dataset& ds, const std::string& path,
              const std::vector<std::string>& provenance = {});

ClassStats class_stats(const Dataset& ds);

std::pair<Dataset, Scaler> normalize_minmax(const Dataset& ds);

/// Seeded stratified index split: per class, round(count * fraction) rows go
/// to train, the rest to test. Selected indices are emitted in dataset order.
std::pair<std::vector<Index>, std::vector<Index>> split_indices(
    const Dataset& ds, double train_fraction, std::uint64_t seed);

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds,
                                             double train_fraction,
                                             std::uint64_t seed);

Dataset take_rows(const Dataset& ds, const std::vector<Index>& idx);

/// Feature rows of one class, in dataset order.
Matrix rows_of_class(const Dataset& ds, int cls);

}  // namespace envbal
