#include "namegender/metrics.hpp"

#include <fmt/format.h>

#include "namegender/error.hpp"

namespace namegender {

EvalReport report_from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
  EvalReport r{tp, fp, tn, fn};
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  r.accuracy = ratio(tp + tn, r.total());
  r.precision = ratio(tp, tp + fp);
  r.recall = ratio(tp, tp + fn);
  const double pr = r.precision + r.recall;
  r.f1 = pr > 0.0 ? 2.0 * r.precision * r.recall / pr : 0.0;
  return r;
}

EvalReport evaluate(std::span<const double> p_male, std::span<const int> labels, double threshold) {
  if (p_male.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("{} predictions for {} labels", p_male.size(), labels.size()));
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "threshold must lie in (0,1)");
  }
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted_male = p_male[i] >= threshold;
    const bool male = labels[i] == 1;
    if (predicted_male) {
      (male ? tp : fp) += 1;
    } else {
      (male ? fn : tn) += 1;
    }
  }
  return report_from_counts(tp, fp, tn, fn);
}

double error_rate_reduction(double before, double after) {
  if (before >= 1.0) throw Error(ErrorCode::InvalidArgument, "baseline accuracy leaves no error");
  return 1.0 - (1.0 - after) / (1.0 - before);
}

}  // namespace namegender
