#include "namegender/grid_search.hpp"

#include <algorithm>
#include <array>
#include <charconv>

#include <fmt/format.h>

#include "namegender/error.hpp"
#include "namegender/rng.hpp"

namespace namegender {

std::string format_param(const ParamValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), std::get<double>(v));
  return std::string(buf.data(), res.ptr);
}

namespace {

const ParamValue& find_param(const Candidate& c, std::string_view name) {
  for (const auto& [k, v] : c) {
    if (k == name) return v;
  }
  throw Error(ErrorCode::InvalidArgument, fmt::format("candidate has no parameter '{}'", name));
}

}  // namespace

double param_number(const Candidate& c, std::string_view name) {
  const auto& v = find_param(c, name);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  throw Error(ErrorCode::InvalidArgument, fmt::format("parameter '{}' is not numeric", name));
}

const std::string& param_text(const Candidate& c, std::string_view name) {
  const auto& v = find_param(c, name);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw Error(ErrorCode::InvalidArgument, fmt::format("parameter '{}' is not text", name));
}

std::vector<Candidate> expand_grid(const Grid& grid) {
  std::vector<Candidate> out{Candidate{}};
  for (const auto& axis : grid) {
    if (axis.values.empty()) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("grid axis '{}' is empty", axis.name));
    }
    std::vector<Candidate> next;
    next.reserve(out.size() * axis.values.size());
    for (const auto& partial : out) {
      for (const auto& v : axis.values) {
        auto c = partial;
        c.emplace_back(axis.name, v);
        next.push_back(std::move(c));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<std::size_t> stratified_folds(std::span<const int> y, std::size_t folds,
                                          std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorCode::InvalidArgument, "need at least two folds");
  Rng rng(derive_seed(seed, "folds"));
  std::vector<std::size_t> fold_of(y.size(), 0);
  for (int cls : {1, 0}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == cls) members.push_back(i);
    }
    if (members.size() < folds) {
      throw Error(ErrorCode::TooFewSamples,
                  fmt::format("class {} has {} samples, fewer than {} folds", cls,
                              members.size(), folds));
    }
    rng.shuffle(std::span(members));
    for (std::size_t k = 0; k < members.size(); ++k) fold_of[members[k]] = k % folds;
  }
  return fold_of;
}

double accuracy_score(std::span<const double> p_male, std::span<const int> y) {
  if (p_male.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "prediction and label counts differ");
  }
  if (y.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if ((p_male[i] >= 0.5 ? 1 : 0) == y[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(y.size());
}

namespace detail {

void check_grid_inputs(const FeatureMatrix& x, std::span<const int> y, std::size_t folds) {
  check_labels(x, y);
  if (folds < 2) throw Error(ErrorCode::InvalidArgument, "need at least two folds");
  const auto male = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  if (male < folds || y.size() - male < folds) {
    throw Error(ErrorCode::TooFewSamples, "every class needs at least `folds` samples");
  }
}

CandidateScore summarize(Candidate params, std::vector<double> fold_scores) {
  CandidateScore s;
  s.params = std::move(params);
  double sum = 0.0;
  for (double v : fold_scores) sum += v;
  s.mean = sum / static_cast<double>(fold_scores.size());
  double sq = 0.0;
  for (double v : fold_scores) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(fold_scores.size()));
  s.fold_scores = std::move(fold_scores);
  return s;
}

std::size_t pick_best(const std::vector<CandidateScore>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i].mean > scores[best].mean) best = i;
  }
  return best;
}

}  // namespace detail

}  // namespace namegender
