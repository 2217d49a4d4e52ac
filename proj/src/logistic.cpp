#include "namegender/logistic.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "namegender/error.hpp"

namespace namegender {

std::string_view to_string(Penalty p) { return p == Penalty::L1 ? "l1" : "l2"; }

Penalty parse_penalty(std::string_view value) {
  if (value == "l1") return Penalty::L1;
  if (value == "l2") return Penalty::L2;
  throw Error(ErrorCode::InvalidArgument, fmt::format("unknown penalty '{}'", value));
}

namespace {

// log(1 + exp(-m)) without overflow.
double softplus_neg(double m) {
  return m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Parameters packed as [w_0 .. w_{F-1}, b].
class Problem {
 public:
  Problem(const FeatureMatrix& x, std::span<const int> y, const LogisticOptions& o)
      : x_(x), y_(y), width_(x.cols()), penalty_(o.penalty), inv_c_(1.0 / o.C),
        margins_(x.rows()) {}

  std::size_t size() const { return width_ + 1; }

  void compute_margins(const std::vector<double>& theta) {
    const std::span<const double> w(theta.data(), width_);
    for (std::size_t i = 0; i < x_.rows(); ++i) margins_[i] = x_.row(i).dot(w) + theta[width_];
  }

  double loss_at(const std::vector<double>& theta) {
    compute_margins(theta);
    double total = 0.0;
    for (std::size_t i = 0; i < x_.rows(); ++i) {
      total += softplus_neg(y_[i] == 1 ? margins_[i] : -margins_[i]);
    }
    return total;
  }

  // Smooth part: data loss plus the L2 penalty when present.
  double smooth(const std::vector<double>& theta) {
    double v = loss_at(theta);
    if (penalty_ == Penalty::L2) {
      double sq = 0.0;
      for (std::size_t j = 0; j < width_; ++j) sq += theta[j] * theta[j];
      v += 0.5 * inv_c_ * sq;
    }
    return v;
  }

  double nonsmooth(const std::vector<double>& theta) const {
    if (penalty_ != Penalty::L1) return 0.0;
    double s = 0.0;
    for (std::size_t j = 0; j < width_; ++j) s += std::abs(theta[j]);
    return inv_c_ * s;
  }

  // Value and gradient of the smooth part.
  double smooth_with_gradient(const std::vector<double>& theta, std::vector<double>& grad) {
    const double value = smooth(theta);
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < x_.rows(); ++i) {
      const double r = sigmoid(margins_[i]) - y_[i];
      const auto row = x_.row(i);
      for (std::size_t k = 0; k < row.index.size(); ++k) grad[row.index[k]] += r * row.value[k];
      grad[width_] += r;
    }
    if (penalty_ == Penalty::L2) {
      for (std::size_t j = 0; j < width_; ++j) grad[j] += inv_c_ * theta[j];
    }
    return value;
  }

  // Proximal step for the L1 term with step 1/L; intercept untouched.
  void prox(std::vector<double>& theta, double lipschitz) const {
    if (penalty_ != Penalty::L1) return;
    const double shrink = inv_c_ / lipschitz;
    for (std::size_t j = 0; j < width_; ++j) {
      const double v = theta[j];
      theta[j] = v > shrink ? v - shrink : (v < -shrink ? v + shrink : 0.0);
    }
  }

  // Upper bound on the Lipschitz constant of the smooth gradient from a few
  // power iterations on [X 1]^T [X 1].
  double lipschitz_estimate() const {
    std::vector<double> v(size(), 1.0 / std::sqrt(static_cast<double>(size())));
    std::vector<double> av(x_.rows());
    std::vector<double> next(size());
    double lambda = 1.0;
    for (int it = 0; it < 30; ++it) {
      const std::span<const double> w(v.data(), width_);
      for (std::size_t i = 0; i < x_.rows(); ++i) av[i] = x_.row(i).dot(w) + v[width_];
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t i = 0; i < x_.rows(); ++i) {
        const auto row = x_.row(i);
        for (std::size_t k = 0; k < row.index.size(); ++k) next[row.index[k]] += av[i] * row.value[k];
        next[width_] += av[i];
      }
      double norm = 0.0;
      for (double e : next) norm += e * e;
      norm = std::sqrt(norm);
      if (norm == 0.0) break;
      lambda = norm;
      for (std::size_t j = 0; j < next.size(); ++j) v[j] = next[j] / norm;
    }
    double l = 0.25 * lambda * 1.05;
    if (penalty_ == Penalty::L2) l += inv_c_;
    return std::max(l, 1e-12);
  }

 private:
  const FeatureMatrix& x_;
  std::span<const int> y_;
  std::size_t width_;
  Penalty penalty_;
  double inv_c_;
  std::vector<double> margins_;
};

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

LogisticModel logreg_fit(const FeatureMatrix& x, std::span<const int> y,
                         const LogisticOptions& options) {
  check_labels(x, y);
  if (!x.all_finite()) throw Error(ErrorCode::NonFiniteInput, "feature matrix has non-finite values");
  if (!(options.C > 0.0) || !std::isfinite(options.C)) {
    throw Error(ErrorCode::InvalidArgument, "C must be positive and finite");
  }
  if (std::count(y.begin(), y.end(), 1) == 0 || std::count(y.begin(), y.end(), 0) == 0) {
    throw Error(ErrorCode::SingleClassInput, "logistic regression needs both classes");
  }

  Problem problem(x, y, options);
  const std::size_t size = problem.size();
  std::vector<double> current(size, 0.0);   // accepted iterate
  std::vector<double> previous(size, 0.0);
  std::vector<double> extrapolated(size, 0.0);
  std::vector<double> candidate(size, 0.0);
  std::vector<double> grad(size, 0.0);

  double lipschitz = problem.lipschitz_estimate();
  double objective = problem.smooth(current) + problem.nonsmooth(current);
  double momentum = 1.0;

  LogisticDiagnostics diag;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    const double f_y = problem.smooth_with_gradient(extrapolated, grad);
    double f_candidate = 0.0;
    for (;;) {
      for (std::size_t j = 0; j < size; ++j) candidate[j] = extrapolated[j] - grad[j] / lipschitz;
      problem.prox(candidate, lipschitz);
      f_candidate = problem.smooth(candidate);
      double linear = 0.0;
      double quad = 0.0;
      for (std::size_t j = 0; j < size; ++j) {
        const double d = candidate[j] - extrapolated[j];
        linear += grad[j] * d;
        quad += d * d;
      }
      if (f_candidate <= f_y + linear + 0.5 * lipschitz * quad + 1e-12 * std::abs(f_y)) break;
      lipschitz *= 2.0;
    }
    const double gradient_mapping = lipschitz * max_abs_diff(extrapolated, candidate);
    const double candidate_objective = f_candidate + problem.nonsmooth(candidate);

    previous = current;
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    const bool accepted = candidate_objective <= objective;
    if (accepted) {
      current = candidate;
      objective = candidate_objective;
      for (std::size_t j = 0; j < size; ++j) {
        extrapolated[j] = current[j] + ((momentum - 1.0) / next_momentum) * (current[j] - previous[j]);
      }
      momentum = next_momentum;
    } else {
      // Restart: the next step is a plain proximal gradient step from current.
      extrapolated = current;
      momentum = 1.0;
    }
    diag.objective_history.push_back(objective);
    diag.iterations = iter;
    diag.parameter_change = max_abs_diff(current, previous);
    diag.gradient_norm = gradient_mapping;
    if (accepted && diag.parameter_change < options.tolerance &&
        gradient_mapping < options.tolerance) {
      diag.converged = true;
      break;
    }
  }

  LogisticModel model;
  model.weights.assign(current.begin(), current.end() - 1);
  model.intercept = current.back();
  model.penalty = options.penalty;
  model.C = options.C;
  model.diagnostics = std::move(diag);
  return model;
}

double logreg_predict_proba(const LogisticModel& model, const RowView& row) {
  if (row.width != model.width()) {
    throw Error(ErrorCode::WidthMismatch,
                fmt::format("row width {} but model expects {}", row.width, model.width()));
  }
  return sigmoid(row.dot(model.weights) + model.intercept);
}

double logistic_loss(const LogisticModel& model, const FeatureMatrix& x, std::span<const int> y) {
  check_labels(x, y);
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double m = x.row(i).dot(model.weights) + model.intercept;
    total += softplus_neg(y[i] == 1 ? m : -m);
  }
  return total;
}

double logistic_objective(const LogisticModel& model, const FeatureMatrix& x,
                          std::span<const int> y) {
  double penalty = 0.0;
  for (double w : model.weights) penalty += model.penalty == Penalty::L1 ? std::abs(w) : 0.5 * w * w;
  return logistic_loss(model, x, y) + penalty / model.C;
}

}  // namespace namegender
