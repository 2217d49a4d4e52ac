#include "namegender/feature_matrix.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "namegender/error.hpp"

namespace namegender {

double RowView::dot(std::span<const double> dense) const {
  double s = 0.0;
  for (std::size_t k = 0; k < index.size(); ++k) s += value[k] * dense[index[k]];
  return s;
}

double RowView::at(std::size_t column) const {
  const auto it = std::lower_bound(index.begin(), index.end(), column);
  if (it == index.end() || *it != column) return 0.0;
  return value[static_cast<std::size_t>(it - index.begin())];
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> column_names)
    : names_(std::move(column_names)) {}

FeatureMatrix FeatureMatrix::from_dense(const std::vector<std::vector<double>>& rows,
                                        std::vector<std::string> column_names) {
  const std::size_t width = rows.empty() ? column_names.size() : rows.front().size();
  if (column_names.empty()) {
    for (std::size_t j = 0; j < width; ++j) column_names.push_back(fmt::format("f{}", j));
  }
  if (column_names.size() != width) {
    throw Error(ErrorCode::ShapeMismatch, "column name count differs from row width");
  }
  FeatureMatrix m(std::move(column_names));
  for (const auto& r : rows) {
    if (r.size() != width) throw Error(ErrorCode::ShapeMismatch, "ragged dense rows");
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (r[j] != 0.0) entries.emplace_back(static_cast<std::uint32_t>(j), r[j]);
    }
    m.add_row(std::move(entries));
  }
  return m;
}

void FeatureMatrix::add_row(std::vector<std::pair<std::uint32_t, double>> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t k = 0;
  while (k < entries.size()) {
    const auto col = entries[k].first;
    if (col >= cols()) {
      throw Error(ErrorCode::WidthMismatch,
                  fmt::format("column {} outside matrix width {}", col, cols()));
    }
    double sum = 0.0;
    for (; k < entries.size() && entries[k].first == col; ++k) sum += entries[k].second;
    if (sum != 0.0) {
      index_.push_back(col);
      values_.push_back(sum);
    }
  }
  row_start_.push_back(values_.size());
}

RowView FeatureMatrix::row(std::size_t i) const {
  const auto begin = row_start_[i];
  const auto end = row_start_[i + 1];
  return RowView{std::span(index_).subspan(begin, end - begin),
                 std::span(values_).subspan(begin, end - begin), cols()};
}

bool FeatureMatrix::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool FeatureMatrix::nonnegative() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::size_t> columns) const {
  std::vector<std::int64_t> remap(cols(), -1);
  std::vector<std::string> names;
  names.reserve(columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k) {
    remap.at(columns[k]) = static_cast<std::int64_t>(k);
    names.push_back(names_[columns[k]]);
  }
  FeatureMatrix out(std::move(names));
  for (std::size_t i = 0; i < rows(); ++i) {
    const auto r = row(i);
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (std::size_t k = 0; k < r.index.size(); ++k) {
      if (remap[r.index[k]] >= 0) {
        entries.emplace_back(static_cast<std::uint32_t>(remap[r.index[k]]), r.value[k]);
      }
    }
    out.add_row(std::move(entries));
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows_to_keep) const {
  FeatureMatrix out(names_);
  for (auto i : rows_to_keep) {
    const auto r = row(i);
    out.index_.insert(out.index_.end(), r.index.begin(), r.index.end());
    out.values_.insert(out.values_.end(), r.value.begin(), r.value.end());
    out.row_start_.push_back(out.values_.size());
  }
  return out;
}

FeatureMatrix FeatureMatrix::scaled(double factor) const {
  FeatureMatrix out = *this;
  for (auto& v : out.values_) v *= factor;
  return out;
}

std::vector<std::vector<double>> FeatureMatrix::to_dense() const {
  std::vector<std::vector<double>> out(rows(), std::vector<double>(cols(), 0.0));
  for (std::size_t i = 0; i < rows(); ++i) {
    const auto r = row(i);
    for (std::size_t k = 0; k < r.index.size(); ++k) out[i][r.index[k]] = r.value[k];
  }
  return out;
}

void check_labels(const FeatureMatrix& x, std::span<const int> y) {
  if (y.size() != x.rows()) {
    throw Error(ErrorCode::LabelMismatch,
                fmt::format("{} labels for {} rows", y.size(), x.rows()));
  }
  for (int v : y) {
    if (v != 0 && v != 1) {
      throw Error(ErrorCode::LabelMismatch, fmt::format("label {} is not binary", v));
    }
  }
}

}  // namespace namegender
