#include "namegender/naive_bayes.hpp"

#include <cmath>

#include <fmt/format.h>

#include "namegender/error.hpp"

namespace namegender {

NaiveBayesModel nb_fit(const FeatureMatrix& x, std::span<const int> y, double alpha) {
  check_labels(x, y);
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "smoothing alpha must be positive");
  if (!x.nonnegative()) {
    throw Error(ErrorCode::NegativeFeatureValue, "multinomial Naive Bayes needs counts >= 0");
  }
  const std::size_t width = x.cols();
  std::array<double, 2> class_count{0.0, 0.0};
  std::array<std::vector<double>, 2> feature_count{std::vector<double>(width, 0.0),
                                                   std::vector<double>(width, 0.0)};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto c = static_cast<std::size_t>(y[i]);
    class_count[c] += 1.0;
    const auto r = x.row(i);
    for (std::size_t k = 0; k < r.index.size(); ++k) feature_count[c][r.index[k]] += r.value[k];
  }
  if (class_count[0] == 0.0 || class_count[1] == 0.0) {
    throw Error(ErrorCode::SingleClassInput, "Naive Bayes needs samples of both classes");
  }

  NaiveBayesModel model;
  model.alpha = alpha;
  const double n = class_count[0] + class_count[1];
  for (std::size_t c = 0; c < 2; ++c) {
    model.log_prior[c] = std::log(class_count[c] / n);
    double total = 0.0;
    for (double v : feature_count[c]) total += v;
    const double log_denominator = std::log(total + alpha * static_cast<double>(width));
    auto& ll = model.log_likelihood[c];
    ll.resize(width);
    for (std::size_t f = 0; f < width; ++f) ll[f] = std::log(feature_count[c][f] + alpha) - log_denominator;
  }
  return model;
}

double nb_predict_proba(const NaiveBayesModel& model, const RowView& row) {
  if (row.width != model.width()) {
    throw Error(ErrorCode::WidthMismatch,
                fmt::format("row width {} but model expects {}", row.width, model.width()));
  }
  const double female = model.log_prior[0] + row.dot(model.log_likelihood[0]);
  const double male = model.log_prior[1] + row.dot(model.log_likelihood[1]);
  // P(male) = 1 / (1 + exp(female - male)), evaluated on the stable side.
  const double d = female - male;
  if (d > 0.0) {
    const double e = std::exp(-d);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(d));
}

}  // namespace namegender
