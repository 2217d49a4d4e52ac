#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "namegender/feature_matrix.hpp"

namespace namegender {

// ---------------------------------------------------------------------------
// Basic features: first/last character of the first and last name tokens.

inline constexpr char kAbsent = '\0';

struct BasicFeatures {
  enum Slot : std::size_t { FirstOfFirst, LastOfFirst, FirstOfLast, LastOfLast, kSlots };
  // kAbsent marks the last-name slots of single-token names.
  std::array<char, kSlots> chars{kAbsent, kAbsent, kAbsent, kAbsent};

  bool operator==(const BasicFeatures&) const = default;
};

BasicFeatures extract_basic(std::string_view normalized);

class OneHotEncoder {
 public:
  OneHotEncoder() = default;
  // Per-slot sorted category lists, as produced by fit or read from an artifact.
  explicit OneHotEncoder(std::array<std::vector<char>, BasicFeatures::kSlots> categories);

  static OneHotEncoder fit(std::span<const BasicFeatures> values);

  std::size_t width() const { return width_; }
  const std::array<std::vector<char>, BasicFeatures::kSlots>& categories() const {
    return categories_;
  }
  std::vector<std::string> column_names() const;

  // Unseen categories produce an all-zero block.
  std::vector<std::pair<std::uint32_t, double>> encode(const BasicFeatures& value) const;
  std::vector<double> transform_dense(const BasicFeatures& value) const;

 private:
  std::array<std::vector<char>, BasicFeatures::kSlots> categories_;
  std::array<std::size_t, BasicFeatures::kSlots> offsets_{};
  std::size_t width_ = 0;
};

class BasicFeaturizer {
 public:
  BasicFeaturizer() = default;
  explicit BasicFeaturizer(OneHotEncoder encoder) : encoder_(std::move(encoder)) {}

  static BasicFeaturizer fit(std::span<const std::string> names);

  FeatureMatrix transform(std::span<const std::string> names) const;
  const OneHotEncoder& encoder() const { return encoder_; }

 private:
  OneHotEncoder encoder_;
};

// ---------------------------------------------------------------------------
// Character n-grams over the whole normalized string, spaces included.

inline constexpr int kMinNgram = 2;
inline constexpr int kMaxNgram = 5;

std::vector<std::string> extract_ngrams(std::string_view name, int n);

class NgramVocabulary {
 public:
  NgramVocabulary() = default;
  // grams must be sorted and unique; doc_freq is parallel to grams.
  NgramVocabulary(int n, std::vector<std::string> grams, std::vector<std::size_t> doc_freq);

  static NgramVocabulary fit(std::span<const std::string> corpus, int n);

  int n() const { return n_; }
  std::size_t size() const { return grams_.size(); }
  const std::vector<std::string>& grams() const { return grams_; }
  const std::vector<std::size_t>& document_frequency() const { return doc_freq_; }
  // -1 when the gram is not in the vocabulary.
  std::int64_t column_of(std::string_view gram) const;

  // Grams absent from the vocabulary are ignored.
  std::vector<std::pair<std::uint32_t, double>> vectorize(std::string_view name) const;
  std::vector<double> vectorize_dense(std::string_view name) const;
  FeatureMatrix transform(std::span<const std::string> names) const;

  // One `gram<TAB>column` line per gram.
  void export_text(std::ostream& out) const;

 private:
  int n_ = kMinNgram;
  std::vector<std::string> grams_;
  std::vector<std::size_t> doc_freq_;
  std::map<std::string, std::uint32_t, std::less<>> column_;
};

// Chi-squared statistic of each column against a binary label. Observed
// per-class column sums are compared with column_total * class_fraction.
std::vector<double> chi2_scores(const FeatureMatrix& x, std::span<const int> y);

struct Chi2Selector {
  std::size_t k = 1000;
  std::vector<std::size_t> selected;  // ascending column order
  std::vector<double> scores;
};

// Highest-scoring k columns; equal scores favour the lower column index.
Chi2Selector select_top_k(std::span<const double> scores, std::size_t k);

inline constexpr std::size_t kDefaultChi2K = 1000;

class NgramFeaturizer {
 public:
  NgramFeaturizer() = default;
  NgramFeaturizer(NgramVocabulary vocabulary, Chi2Selector selector);

  static NgramFeaturizer fit(std::span<const std::string> names, std::span<const int> y, int n,
                             std::size_t k = kDefaultChi2K);

  FeatureMatrix transform(std::span<const std::string> names) const;

  const NgramVocabulary& vocabulary() const { return vocab_; }
  const Chi2Selector& selector() const { return selector_; }
  std::size_t width() const { return selector_.selected.size(); }

 private:
  NgramVocabulary vocab_;
  Chi2Selector selector_;
  std::vector<std::int64_t> remap_;  // vocabulary column -> output column or -1
};

// ---------------------------------------------------------------------------
// Character indexing for the recurrent model.

struct PaddedSequence {
  std::vector<std::int32_t> indices;  // length max_len, zeros on the left
  std::size_t true_length = 0;
};

class CharIndexer {
 public:
  CharIndexer() = default;
  CharIndexer(std::string alphabet, std::size_t max_len, bool unknown_bucket);

  // Alphabet = sorted distinct characters of `names`. max_len = 0 means the
  // longest name in `names`.
  static CharIndexer fit(std::span<const std::string> names, std::size_t max_len = 0,
                         bool unknown_bucket = false);

  const std::string& alphabet() const { return alphabet_; }
  std::size_t max_len() const { return max_len_; }
  bool unknown_bucket() const { return unknown_bucket_; }
  // Number of real characters V; indices run 1..V.
  std::size_t vocab_size() const { return alphabet_.size(); }
  // Embedding rows needed: pad row, V characters, optional unknown row.
  std::size_t embedding_rows() const { return alphabet_.size() + 1 + (unknown_bucket_ ? 1 : 0); }

  std::int32_t index_of(char c) const;
  PaddedSequence index_and_pad(std::string_view name) const;
  // Inverse of index_and_pad for in-alphabet names.
  std::string decode(const PaddedSequence& seq) const;

 private:
  std::string alphabet_;
  std::array<std::int32_t, 256> lookup_{};
  std::size_t max_len_ = 0;
  bool unknown_bucket_ = false;
};

}  // namespace namegender
