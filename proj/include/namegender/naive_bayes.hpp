#pragma once

#include <array>
#include <span>
#include <vector>

#include "namegender/feature_matrix.hpp"

namespace namegender {

/// Multinomial Naive Bayes with additive (Laplace) smoothing.
///
/// Class index 1 is male, 0 is female. Likelihoods are kept in log space:
/// log P(f|c) = log((count(f,c) + alpha) / (sum_f count(f,c) + alpha * F)).
struct NaiveBayesModel {
  std::array<double, 2> log_prior{};
  std::array<std::vector<double>, 2> log_likelihood;
  double alpha = 1.0;

  std::size_t width() const { return log_likelihood[0].size(); }
};

NaiveBayesModel nb_fit(const FeatureMatrix& x, std::span<const int> y, double alpha = 1.0);

// Softmax over the two class log scores; returns P(male).
double nb_predict_proba(const NaiveBayesModel& model, const RowView& row);

}  // namespace namegender
