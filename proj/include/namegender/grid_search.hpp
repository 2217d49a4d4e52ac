#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "namegender/feature_matrix.hpp"

namespace namegender {

using ParamValue = std::variant<double, std::string>;

struct GridAxis {
  std::string name;
  std::vector<ParamValue> values;
};

using Grid = std::vector<GridAxis>;
using Candidate = std::vector<std::pair<std::string, ParamValue>>;

std::string format_param(const ParamValue& v);
double param_number(const Candidate& c, std::string_view name);
const std::string& param_text(const Candidate& c, std::string_view name);

// Cartesian product in grid order: the first axis varies slowest.
std::vector<Candidate> expand_grid(const Grid& grid);

// Fold id per sample. Each class is shuffled independently and dealt
// round-robin, so every fold gets floor or ceil of its share.
std::vector<std::size_t> stratified_folds(std::span<const int> y, std::size_t folds,
                                          std::uint64_t seed);

// Fraction of rows where (p >= 0.5) agrees with the label.
double accuracy_score(std::span<const double> p_male, std::span<const int> y);

template <typename Model>
struct Learner {
  std::function<Model(const Candidate&, const FeatureMatrix&, std::span<const int>)> fit;
  std::function<double(const Model&, const RowView&)> predict;
};

struct CandidateScore {
  Candidate params;
  std::vector<double> fold_scores;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation over folds
};

template <typename Model>
struct GridSearchResult {
  std::vector<CandidateScore> candidates;  // grid order
  std::size_t best_index = 0;
  std::optional<Model> best_model;  // refit on all rows

  const CandidateScore& best() const { return candidates.at(best_index); }
};

struct GridSearchOptions {
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  bool refit = true;
};

namespace detail {

void check_grid_inputs(const FeatureMatrix& x, std::span<const int> y, std::size_t folds);
CandidateScore summarize(Candidate params, std::vector<double> fold_scores);
// Highest mean; equal means keep the earliest candidate.
std::size_t pick_best(const std::vector<CandidateScore>& scores);

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (std::size_t t = 0; t < std::min(threads, count); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

// Stratified k-fold cross-validated accuracy for every grid candidate.
// Candidates may run on several threads; results are merged in grid order.
template <typename Model>
GridSearchResult<Model> grid_search(const Learner<Model>& learner, const Grid& grid,
                                    const FeatureMatrix& x, std::span<const int> y,
                                    const GridSearchOptions& options = {}) {
  detail::check_grid_inputs(x, y, options.folds);
  const auto fold_of = stratified_folds(y, options.folds, options.seed);

  struct Fold {
    FeatureMatrix train_x, test_x;
    std::vector<int> train_y, test_y;
  };
  std::vector<Fold> folds(options.folds);
  for (std::size_t f = 0; f < options.folds; ++f) {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (fold_of[i] == f) {
        test_rows.push_back(i);
        folds[f].test_y.push_back(y[i]);
      } else {
        train_rows.push_back(i);
        folds[f].train_y.push_back(y[i]);
      }
    }
    folds[f].train_x = x.select_rows(train_rows);
    folds[f].test_x = x.select_rows(test_rows);
  }

  const auto candidates = expand_grid(grid);
  GridSearchResult<Model> result;
  result.candidates.resize(candidates.size());
  detail::parallel_for(candidates.size(), options.threads, [&](std::size_t c) {
    std::vector<double> scores;
    for (const auto& fold : folds) {
      const Model model = learner.fit(candidates[c], fold.train_x, fold.train_y);
      std::vector<double> p(fold.test_x.rows());
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = learner.predict(model, fold.test_x.row(i));
      scores.push_back(accuracy_score(p, fold.test_y));
    }
    result.candidates[c] = detail::summarize(candidates[c], std::move(scores));
  });
  result.best_index = detail::pick_best(result.candidates);
  if (options.refit) result.best_model = learner.fit(result.best().params, x, y);
  return result;
}

}  // namespace namegender
