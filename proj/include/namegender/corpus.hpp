#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace namegender {

enum class Gender : std::uint8_t { Female = 0, Male = 1 };

// Label encoding shared by every model: 1 = male (positive class), 0 = female.
inline int label_of(Gender g) { return g == Gender::Male ? 1 : 0; }

std::string_view gender_code(Gender g);  // "m" / "f"

// Accepts m, f, male, female in any case.
std::optional<Gender> parse_gender(std::string_view value);

struct NameRecord {
  std::string raw_name;
  std::string normalized;
  Gender gender = Gender::Male;
};

// Removes everything outside [a-z ] after ASCII lowercasing, collapses
// whitespace runs to one space and trims. Throws EmptyAfterNormalization.
std::string normalize_name(std::string_view raw);

// First space-delimited token of a normalized name.
std::string_view first_name(std::string_view normalized);

enum class NameView : std::uint8_t { FullName, FirstName };

std::string_view to_string(NameView view);  // "full" / "first"
NameView parse_name_view(std::string_view value);

// Applies the variant's view to a normalized name.
std::string apply_view(std::string_view normalized, NameView view);

struct Provenance {
  enum class Kind : std::uint8_t { File, Synthetic } kind = Kind::File;
  std::uint64_t seed = 0;
};

class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<NameRecord> records, Provenance provenance);

  const std::vector<NameRecord>& records() const { return records_; }
  const Provenance& provenance() const { return provenance_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const NameRecord& operator[](std::size_t i) const { return records_[i]; }

  std::size_t count(Gender g) const;

  std::vector<int> labels() const;
  std::vector<std::string> names(NameView view = NameView::FullName) const;

  // FNV-1a over the canonical `normalized,gender` lines.
  std::uint64_t fingerprint() const;

  Corpus subset(const std::vector<std::size_t>& indices) const;

 private:
  std::vector<NameRecord> records_;
  Provenance provenance_;
};

// Header-free `name,gender` rows. Blank lines are skipped; a leading UTF-8 BOM
// and CR line endings are tolerated.
Corpus parse_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);

void write_corpus(std::ostream& out, const Corpus& corpus);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  bool stratified = true;
};

struct CorpusSplit {
  Corpus train;
  Corpus test;
};

// Records keep their input order inside each partition.
CorpusSplit split(const Corpus& corpus, const SplitSpec& spec);

struct SyntheticOptions {
  // Probability that the first token is a unisex token (dwi, tri, rizki, ...).
  double unisex_fraction = 0.15;
  // Probability that a record is built only from unisex and clan tokens, so
  // its label carries no recoverable signal.
  double ambiguous_fraction = 0.03;
};

Corpus generate_synthetic(std::size_t n, double male_fraction, std::uint64_t seed,
                          const SyntheticOptions& options = {});

inline constexpr std::size_t kMaxFullNameLength = 56;
inline constexpr std::size_t kMaxFirstNameLength = 17;
inline constexpr double kDefaultMaleFraction = 0.6656;

}  // namespace namegender
