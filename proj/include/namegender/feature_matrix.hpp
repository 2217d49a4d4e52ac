#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace namegender {

using Labels = std::vector<int>;

// Read-only view of one sparse row: strictly increasing column indices.
struct RowView {
  std::span<const std::uint32_t> index;
  std::span<const double> value;
  std::size_t width = 0;

  double dot(std::span<const double> dense) const;
  double at(std::size_t column) const;
};

// Samples x features, stored compressed by row. Most feature families here
// (one-hot, n-gram counts) are overwhelmingly zero, so only nonzeros are kept;
// the logical matrix is dense.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(std::vector<std::string> column_names);

  static FeatureMatrix from_dense(const std::vector<std::vector<double>>& rows,
                                  std::vector<std::string> column_names = {});

  // Appends a row from (column, value) pairs in any order; zeros are dropped,
  // repeated columns are summed.
  void add_row(std::vector<std::pair<std::uint32_t, double>> entries);

  std::size_t rows() const { return row_start_.size() - 1; }
  std::size_t cols() const { return names_.size(); }
  std::size_t nonzeros() const { return values_.size(); }

  RowView row(std::size_t i) const;
  double at(std::size_t i, std::size_t j) const { return row(i).at(j); }

  const std::vector<std::string>& column_names() const { return names_; }

  bool all_finite() const;
  bool nonnegative() const;

  // New matrix holding only `columns` (in the given order).
  FeatureMatrix select_columns(std::span<const std::size_t> columns) const;
  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  FeatureMatrix scaled(double factor) const;

  std::vector<std::vector<double>> to_dense() const;

 private:
  std::vector<std::string> names_;
  std::vector<std::size_t> row_start_{0};
  std::vector<std::uint32_t> index_;
  std::vector<double> values_;
};

// Throws LabelMismatch unless `y` has one 0/1 entry per row.
void check_labels(const FeatureMatrix& x, std::span<const int> y);

}  // namespace namegender
