#pragma once

#include <cstddef>
#include <span>

namespace namegender {

// Confusion counts with male as the positive class. Precision or recall with
// a zero denominator is 0, and f1 is 0 when both are 0.
struct EvalReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const EvalReport&) const = default;
};

EvalReport report_from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn);

inline constexpr double kDefaultThreshold = 0.5;

// A sample is predicted male when p_male >= threshold.
EvalReport evaluate(std::span<const double> p_male, std::span<const int> labels,
                    double threshold = kDefaultThreshold);

// Share of the remaining error removed when accuracy moves from `before` to
// `after`: 1 - (1 - after) / (1 - before).
double error_rate_reduction(double before, double after);

}  // namespace namegender
