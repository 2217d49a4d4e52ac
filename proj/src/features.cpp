#include "namegender/features.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "namegender/error.hpp"

namespace namegender {

// ---------------------------------------------------------------------------
// Basic features

BasicFeatures extract_basic(std::string_view normalized) {
  BasicFeatures f;
  if (normalized.empty()) return f;
  const auto first_end = normalized.find(' ');
  const auto first = normalized.substr(0, first_end);
  f.chars[BasicFeatures::FirstOfFirst] = first.front();
  f.chars[BasicFeatures::LastOfFirst] = first.back();
  if (first_end != std::string_view::npos) {
    const auto last = normalized.substr(normalized.rfind(' ') + 1);
    f.chars[BasicFeatures::FirstOfLast] = last.front();
    f.chars[BasicFeatures::LastOfLast] = last.back();
  }
  return f;
}

OneHotEncoder::OneHotEncoder(std::array<std::vector<char>, BasicFeatures::kSlots> categories)
    : categories_(std::move(categories)) {
  std::size_t offset = 0;
  for (std::size_t s = 0; s < BasicFeatures::kSlots; ++s) {
    auto& cats = categories_[s];
    if (!std::is_sorted(cats.begin(), cats.end()) ||
        std::adjacent_find(cats.begin(), cats.end()) != cats.end()) {
      throw Error(ErrorCode::MalformedArtifact, "one-hot categories must be sorted and unique");
    }
    offsets_[s] = offset;
    offset += cats.size();
  }
  width_ = offset;
}

OneHotEncoder OneHotEncoder::fit(std::span<const BasicFeatures> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "one-hot fit on empty input");
  std::array<std::vector<char>, BasicFeatures::kSlots> categories;
  for (std::size_t s = 0; s < BasicFeatures::kSlots; ++s) {
    std::set<char> seen;
    for (const auto& v : values) seen.insert(v.chars[s]);
    categories[s].assign(seen.begin(), seen.end());
  }
  return OneHotEncoder(std::move(categories));
}

std::vector<std::string> OneHotEncoder::column_names() const {
  static constexpr std::array<std::string_view, BasicFeatures::kSlots> kSlotNames = {
      "first_first", "first_last", "last_first", "last_last"};
  std::vector<std::string> names;
  names.reserve(width_);
  for (std::size_t s = 0; s < BasicFeatures::kSlots; ++s) {
    for (char c : categories_[s]) {
      names.push_back(c == kAbsent ? fmt::format("{}=<absent>", kSlotNames[s])
                                   : fmt::format("{}={}", kSlotNames[s], c));
    }
  }
  return names;
}

std::vector<std::pair<std::uint32_t, double>> OneHotEncoder::encode(
    const BasicFeatures& value) const {
  std::vector<std::pair<std::uint32_t, double>> entries;
  for (std::size_t s = 0; s < BasicFeatures::kSlots; ++s) {
    const auto& cats = categories_[s];
    const auto it = std::lower_bound(cats.begin(), cats.end(), value.chars[s]);
    if (it != cats.end() && *it == value.chars[s]) {
      entries.emplace_back(static_cast<std::uint32_t>(offsets_[s] + (it - cats.begin())), 1.0);
    }
  }
  return entries;
}

std::vector<double> OneHotEncoder::transform_dense(const BasicFeatures& value) const {
  std::vector<double> row(width_, 0.0);
  for (const auto& [col, v] : encode(value)) row[col] = v;
  return row;
}

BasicFeaturizer BasicFeaturizer::fit(std::span<const std::string> names) {
  std::vector<BasicFeatures> values;
  values.reserve(names.size());
  for (const auto& n : names) values.push_back(extract_basic(n));
  return BasicFeaturizer(OneHotEncoder::fit(values));
}

FeatureMatrix BasicFeaturizer::transform(std::span<const std::string> names) const {
  FeatureMatrix x(encoder_.column_names());
  for (const auto& n : names) x.add_row(encoder_.encode(extract_basic(n)));
  return x;
}

// ---------------------------------------------------------------------------
// N-grams

namespace {

void check_n(int n) {
  if (n < kMinNgram || n > kMaxNgram) {
    throw Error(ErrorCode::InvalidN, fmt::format("n-gram size {} outside [2,5]", n));
  }
}

}  // namespace

std::vector<std::string> extract_ngrams(std::string_view name, int n) {
  check_n(n);
  std::vector<std::string> grams;
  const auto len = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + len <= name.size(); ++i) grams.emplace_back(name.substr(i, len));
  return grams;
}

NgramVocabulary::NgramVocabulary(int n, std::vector<std::string> grams,
                                 std::vector<std::size_t> doc_freq)
    : n_(n), grams_(std::move(grams)), doc_freq_(std::move(doc_freq)) {
  check_n(n_);
  if (doc_freq_.size() != grams_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "document frequency length differs from vocabulary");
  }
  for (std::size_t j = 0; j < grams_.size(); ++j) {
    if (grams_[j].size() != static_cast<std::size_t>(n_) || (j > 0 && grams_[j - 1] >= grams_[j])) {
      throw Error(ErrorCode::MalformedArtifact, "n-gram vocabulary must be sorted, unique, length n");
    }
    column_.emplace(grams_[j], static_cast<std::uint32_t>(j));
  }
}

NgramVocabulary NgramVocabulary::fit(std::span<const std::string> corpus, int n) {
  check_n(n);
  if (corpus.empty()) throw Error(ErrorCode::EmptyInput, "n-gram vocabulary fit on empty corpus");
  std::map<std::string, std::size_t> df;
  for (const auto& name : corpus) {
    auto grams = extract_ngrams(name, n);
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    for (auto& g : grams) ++df[std::move(g)];
  }
  std::vector<std::string> grams;
  std::vector<std::size_t> freq;
  for (auto& [g, f] : df) {
    grams.push_back(g);
    freq.push_back(f);
  }
  return NgramVocabulary(n, std::move(grams), std::move(freq));
}

std::int64_t NgramVocabulary::column_of(std::string_view gram) const {
  const auto it = column_.find(gram);
  return it == column_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::vector<std::pair<std::uint32_t, double>> NgramVocabulary::vectorize(
    std::string_view name) const {
  std::vector<std::pair<std::uint32_t, double>> entries;
  const auto len = static_cast<std::size_t>(n_);
  for (std::size_t i = 0; i + len <= name.size(); ++i) {
    const auto col = column_of(name.substr(i, len));
    if (col >= 0) entries.emplace_back(static_cast<std::uint32_t>(col), 1.0);
  }
  return entries;
}

std::vector<double> NgramVocabulary::vectorize_dense(std::string_view name) const {
  std::vector<double> row(grams_.size(), 0.0);
  for (const auto& [col, v] : vectorize(name)) row[col] += v;
  return row;
}

FeatureMatrix NgramVocabulary::transform(std::span<const std::string> names) const {
  FeatureMatrix x(grams_);
  for (const auto& n : names) x.add_row(vectorize(n));
  return x;
}

void NgramVocabulary::export_text(std::ostream& out) const {
  for (std::size_t j = 0; j < grams_.size(); ++j) out << grams_[j] << '\t' << j << '\n';
}

// ---------------------------------------------------------------------------
// Chi-squared selection

std::vector<double> chi2_scores(const FeatureMatrix& x, std::span<const int> y) {
  check_labels(x, y);
  if (!x.nonnegative()) {
    throw Error(ErrorCode::NegativeFeatureValue, "chi-squared requires nonnegative features");
  }
  const std::size_t width = x.cols();
  std::array<std::vector<double>, 2> observed{std::vector<double>(width, 0.0),
                                              std::vector<double>(width, 0.0)};
  std::array<double, 2> class_count{0.0, 0.0};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto c = static_cast<std::size_t>(y[i]);
    class_count[c] += 1.0;
    const auto r = x.row(i);
    for (std::size_t k = 0; k < r.index.size(); ++k) observed[c][r.index[k]] += r.value[k];
  }
  const double n = class_count[0] + class_count[1];
  std::vector<double> scores(width, 0.0);
  for (std::size_t f = 0; f < width; ++f) {
    const double total = observed[0][f] + observed[1][f];
    if (total == 0.0) continue;
    double score = 0.0;
    for (std::size_t c = 0; c < 2; ++c) {
      if (class_count[c] == 0.0) continue;
      const double expected = total * (class_count[c] / n);
      const double diff = observed[c][f] - expected;
      score += diff * diff / expected;
    }
    scores[f] = score;
  }
  return scores;
}

Chi2Selector select_top_k(std::span<const double> scores, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(std::min(k, order.size()));
  std::sort(order.begin(), order.end());
  return Chi2Selector{k, std::move(order), std::vector<double>(scores.begin(), scores.end())};
}

NgramFeaturizer::NgramFeaturizer(NgramVocabulary vocabulary, Chi2Selector selector)
    : vocab_(std::move(vocabulary)), selector_(std::move(selector)), remap_(vocab_.size(), -1) {
  for (std::size_t k = 0; k < selector_.selected.size(); ++k) {
    remap_.at(selector_.selected[k]) = static_cast<std::int64_t>(k);
  }
}

NgramFeaturizer NgramFeaturizer::fit(std::span<const std::string> names, std::span<const int> y,
                                     int n, std::size_t k) {
  auto vocab = NgramVocabulary::fit(names, n);
  const auto scores = chi2_scores(vocab.transform(names), y);
  auto selector = select_top_k(scores, k);
  return NgramFeaturizer(std::move(vocab), std::move(selector));
}

FeatureMatrix NgramFeaturizer::transform(std::span<const std::string> names) const {
  std::vector<std::string> columns;
  columns.reserve(selector_.selected.size());
  for (auto j : selector_.selected) columns.push_back(vocab_.grams()[j]);
  FeatureMatrix x(std::move(columns));
  for (const auto& name : names) {
    auto entries = vocab_.vectorize(name);
    std::erase_if(entries, [&](const auto& e) { return remap_[e.first] < 0; });
    for (auto& e : entries) e.first = static_cast<std::uint32_t>(remap_[e.first]);
    x.add_row(std::move(entries));
  }
  return x;
}

// ---------------------------------------------------------------------------
// Character indexing

CharIndexer::CharIndexer(std::string alphabet, std::size_t max_len, bool unknown_bucket)
    : alphabet_(std::move(alphabet)), max_len_(max_len), unknown_bucket_(unknown_bucket) {
  if (max_len_ == 0) throw Error(ErrorCode::InvalidArgument, "max_len must be positive");
  if (!std::is_sorted(alphabet_.begin(), alphabet_.end()) ||
      std::adjacent_find(alphabet_.begin(), alphabet_.end()) != alphabet_.end()) {
    throw Error(ErrorCode::MalformedArtifact, "alphabet must be sorted and unique");
  }
  lookup_.fill(0);
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    lookup_[static_cast<unsigned char>(alphabet_[i])] = static_cast<std::int32_t>(i + 1);
  }
}

CharIndexer CharIndexer::fit(std::span<const std::string> names, std::size_t max_len,
                             bool unknown_bucket) {
  if (names.empty()) throw Error(ErrorCode::EmptyInput, "char indexer fit on empty input");
  std::set<char> chars;
  std::size_t longest = 0;
  for (const auto& n : names) {
    chars.insert(n.begin(), n.end());
    longest = std::max(longest, n.size());
  }
  if (max_len == 0) max_len = longest;
  return CharIndexer(std::string(chars.begin(), chars.end()), max_len, unknown_bucket);
}

std::int32_t CharIndexer::index_of(char c) const {
  const auto idx = lookup_[static_cast<unsigned char>(c)];
  if (idx != 0) return idx;
  if (unknown_bucket_) return static_cast<std::int32_t>(alphabet_.size() + 1);
  throw Error(ErrorCode::UnknownCharacter,
              fmt::format("character '{}' was not seen when the indexer was fit", c));
}

PaddedSequence CharIndexer::index_and_pad(std::string_view name) const {
  if (name.size() > max_len_) {
    throw Error(ErrorCode::TooLong,
                fmt::format("name of {} characters exceeds max_len {}", name.size(), max_len_));
  }
  PaddedSequence seq;
  seq.indices.assign(max_len_, 0);
  seq.true_length = name.size();
  const std::size_t offset = max_len_ - name.size();
  for (std::size_t i = 0; i < name.size(); ++i) seq.indices[offset + i] = index_of(name[i]);
  return seq;
}

std::string CharIndexer::decode(const PaddedSequence& seq) const {
  std::string out;
  for (auto idx : seq.indices) {
    if (idx == 0) continue;
    if (idx > static_cast<std::int32_t>(alphabet_.size())) {
      out.push_back('?');
    } else {
      out.push_back(alphabet_[static_cast<std::size_t>(idx - 1)]);
    }
  }
  return out;
}

}  // namespace namegender
