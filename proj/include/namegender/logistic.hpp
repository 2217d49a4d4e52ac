#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "namegender/feature_matrix.hpp"

namespace namegender {

enum class Penalty { L1, L2 };

std::string_view to_string(Penalty p);  // "l1" / "l2"
Penalty parse_penalty(std::string_view value);

struct LogisticOptions {
  Penalty penalty = Penalty::L2;
  double C = 1.0;  // inverse regularization strength
  double tolerance = 1e-6;
  int max_iterations = 5000;
};

struct LogisticDiagnostics {
  int iterations = 0;
  bool converged = false;
  double parameter_change = 0.0;  // max-norm of the last accepted step
  double gradient_norm = 0.0;     // max-norm of the proximal gradient mapping
  std::vector<double> objective_history;  // objective after each iteration
};

struct LogisticModel {
  std::vector<double> weights;
  double intercept = 0.0;
  Penalty penalty = Penalty::L2;
  double C = 1.0;
  LogisticDiagnostics diagnostics;

  std::size_t width() const { return weights.size(); }
};

// Minimizes (1/C) R(w) + sum_i log(1 + exp(-s_i (w.x_i + b))), s_i in {-1,+1},
// R = ||w||_1 or ||w||_2^2 / 2, intercept unpenalized. Monotone accelerated
// proximal gradient with backtracking; soft-thresholding handles L1.
// Hitting the iteration cap is reported through diagnostics, not thrown.
LogisticModel logreg_fit(const FeatureMatrix& x, std::span<const int> y,
                         const LogisticOptions& options = {});

double logreg_predict_proba(const LogisticModel& model, const RowView& row);

// Sum of per-sample logistic losses (no penalty).
double logistic_loss(const LogisticModel& model, const FeatureMatrix& x, std::span<const int> y);
// Full training objective including the penalty term.
double logistic_objective(const LogisticModel& model, const FeatureMatrix& x,
                          std::span<const int> y);

}  // namespace namegender
