#include "namegender/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "namegender/error.hpp"
#include "namegender/rng.hpp"

namespace namegender {

std::string_view gender_code(Gender g) { return g == Gender::Male ? "m" : "f"; }

std::optional<Gender> parse_gender(std::string_view value) {
  std::string lower;
  for (char c : value) {
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (lower == "m" || lower == "male") return Gender::Male;
  if (lower == "f" || lower == "female") return Gender::Female;
  return std::nullopt;
}

std::string normalize_name(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char ch : raw) {
    const auto c = static_cast<unsigned char>(ch);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
      pending_space = !out.empty();
      continue;
    }
    char lower = 0;
    if (c >= 'A' && c <= 'Z') {
      lower = static_cast<char>(c - 'A' + 'a');
    } else if (c >= 'a' && c <= 'z') {
      lower = static_cast<char>(c);
    } else {
      // Apostrophes, periods, hyphens, digits and non-ASCII bytes vanish
      // without acting as a token boundary.
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(lower);
  }
  if (out.empty()) {
    throw Error(ErrorCode::EmptyAfterNormalization,
                fmt::format("name '{}' is empty after normalization", raw));
  }
  return out;
}

std::string_view first_name(std::string_view normalized) {
  return normalized.substr(0, normalized.find(' '));
}

std::string_view to_string(NameView view) {
  return view == NameView::FullName ? "full" : "first";
}

NameView parse_name_view(std::string_view value) {
  if (value == "full") return NameView::FullName;
  if (value == "first") return NameView::FirstName;
  throw Error(ErrorCode::InvalidArgument,
              fmt::format("unknown variant '{}', expected full|first", value));
}

std::string apply_view(std::string_view normalized, NameView view) {
  return std::string(view == NameView::FullName ? normalized : first_name(normalized));
}

Corpus::Corpus(std::vector<NameRecord> records, Provenance provenance)
    : records_(std::move(records)), provenance_(provenance) {}

std::size_t Corpus::count(Gender g) const {
  return static_cast<std::size_t>(std::count_if(
      records_.begin(), records_.end(), [g](const NameRecord& r) { return r.gender == g; }));
}

std::vector<int> Corpus::labels() const {
  std::vector<int> y;
  y.reserve(records_.size());
  for (const auto& r : records_) y.push_back(label_of(r.gender));
  return y;
}

std::vector<std::string> Corpus::names(NameView view) const {
  std::vector<std::string> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(apply_view(r.normalized, view));
  return out;
}

std::uint64_t Corpus::fingerprint() const {
  std::uint64_t h = fnv1a64("");
  for (const auto& r : records_) {
    h = fnv1a64(r.normalized, h);
    h = fnv1a64(",", h);
    h = fnv1a64(gender_code(r.gender), h);
    h = fnv1a64("\n", h);
  }
  return h;
}

Corpus Corpus::subset(const std::vector<std::size_t>& indices) const {
  std::vector<NameRecord> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(records_.at(i));
  return Corpus(std::move(out), provenance_);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

Corpus parse_corpus(std::istream& in) {
  std::vector<NameRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (trim(view).empty()) continue;

    const auto comma = view.find(',');
    if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos) {
      throw Error(ErrorCode::MalformedRow,
                  fmt::format("line {}: expected exactly two comma-separated fields", line_no));
    }
    const auto raw = view.substr(0, comma);
    const auto label = trim(view.substr(comma + 1));
    const auto gender = parse_gender(label);
    if (!gender) {
      throw Error(ErrorCode::UnknownGenderLabel,
                  fmt::format("line {}: unknown gender label '{}'", line_no, label));
    }
    NameRecord record;
    record.raw_name = std::string(raw);
    try {
      record.normalized = normalize_name(raw);
    } catch (const Error&) {
      throw Error(ErrorCode::EmptyAfterNormalization,
                  fmt::format("line {}: name '{}' is empty after normalization", line_no, raw));
    }
    record.gender = *gender;
    records.push_back(std::move(record));
  }
  return Corpus(std::move(records), Provenance{});
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::Io, fmt::format("cannot open '{}'", path.string()));
  }
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& r : corpus.records()) {
    out << r.normalized << ',' << gender_code(r.gender) << '\n';
  }
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
  }
  write_corpus(out, corpus);
}

CorpusSplit split(const Corpus& corpus, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidFraction,
                fmt::format("test fraction {} outside (0,1)", spec.test_fraction));
  }
  if (corpus.size() < 2) {
    throw Error(ErrorCode::TooFewSamples, "need at least two records to split");
  }

  Rng rng(derive_seed(spec.seed, "split"));
  std::vector<bool> in_test(corpus.size(), false);

  auto assign = [&](std::vector<std::size_t> members) {
    rng.shuffle(std::span(members));
    const auto n = static_cast<long long>(members.size());
    auto n_test = std::llround(spec.test_fraction * static_cast<double>(n));
    n_test = std::clamp<long long>(n_test, 1, n - 1);
    for (long long i = 0; i < n_test; ++i) in_test[members[static_cast<std::size_t>(i)]] = true;
  };

  if (spec.stratified) {
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      by_class[static_cast<std::size_t>(label_of(corpus[i].gender))].push_back(i);
    }
    for (const auto& members : by_class) {
      if (members.size() < 2) {
        throw Error(ErrorCode::TooFewSamples,
                    "stratified split needs at least two records of each class");
      }
    }
    assign(std::move(by_class[1]));
    assign(std::move(by_class[0]));
  } else {
    std::vector<std::size_t> all(corpus.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    assign(std::move(all));
  }

  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (in_test[i] ? test_idx : train_idx).push_back(i);
  }
  return {corpus.subset(train_idx), corpus.subset(test_idx)};
}

// ---------------------------------------------------------------------------
// Synthetic corpus

namespace {

constexpr std::array kSyllables = {"ba", "bu", "da", "de", "ha", "he", "ju", "ka", "ku",
                                   "la", "li", "ma", "mu", "na", "nu", "pra", "ra", "sa",
                                   "se", "su", "ta", "te", "wi", "ya", "gu", "har", "sur",
                                   "kur", "ser", "ir", "in", "yo"};

// The last character alone is a weak cue: "-di" and "-ri" end in i like most
// female endings, "-an" and "-wan" share their final n.
constexpr std::array kMaleEndings = {"o", "anto", "wan", "man", "di", "an", "ar",
                                     "us", "ril", "yanto", "ardi", "ri"};
constexpr std::array kFemaleEndings = {"i", "ati", "wati", "ni", "ti", "ah", "na",
                                       "sih", "yu", "yani", "ita", "ri"};

constexpr std::array kMaleGiven = {"budi",  "agus",   "joko",   "ahmad",  "muhammad",
                                   "bambang", "eko", "hendra", "fajar", "yusuf"};
constexpr std::array kFemaleGiven = {"siti",  "dewi",  "sri",   "ayu",   "fitri",
                                     "indah", "rina",  "nurul", "ratna", "wulan"};
constexpr std::array kUnisex = {"dwi", "tri", "rizki", "eka", "nur", "ade", "yuli"};

constexpr std::array kMaleTerminal = {"putra",   "saputra",  "pratama",  "nugroho",
                                      "setiawan", "hidayat", "kurniawan", "santoso",
                                      "wibowo",  "firmansyah"};
constexpr std::array kFemaleTerminal = {"putri",     "saputri",     "lestari",  "wulandari",
                                        "rahayu",    "handayani",   "permatasari",
                                        "anggraini", "rahmawati",   "safitri"};
constexpr std::array kClan = {"siregar", "nasution", "lubis",    "harahap", "sitorus",  "wijaya",
                              "halim",   "tanjung",  "hasibuan", "pohan",   "tambunan", "manurung"};

std::string stem(Rng& rng, Gender g) {
  std::string s = rng.pick(kSyllables);
  if (rng.bernoulli(0.5)) s += rng.pick(kSyllables);
  s += g == Gender::Male ? rng.pick(kMaleEndings) : rng.pick(kFemaleEndings);
  return s;
}

std::string given(Rng& rng, Gender g) {
  return g == Gender::Male ? rng.pick(kMaleGiven) : rng.pick(kFemaleGiven);
}

std::string terminal(Rng& rng, Gender g) {
  // putra/putri dominate the terminal slot.
  if (rng.bernoulli(0.4)) return g == Gender::Male ? "putra" : "putri";
  return g == Gender::Male ? rng.pick(kMaleTerminal) : rng.pick(kFemaleTerminal);
}

std::vector<std::string> cued_tokens(Rng& rng, Gender g, std::size_t count,
                                     const SyntheticOptions& options) {
  std::vector<std::string> tokens;
  bool cued = false;
  if (rng.bernoulli(options.unisex_fraction)) {
    tokens.emplace_back(rng.pick(kUnisex));
  } else {
    tokens.push_back(rng.bernoulli(0.5) ? given(rng, g) : stem(rng, g));
    cued = true;
  }
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const double u = rng.uniform();
    if (u < 0.55) {
      tokens.push_back(stem(rng, g));
      cued = true;
    } else if (u < 0.70) {
      tokens.push_back(given(rng, g));
      cued = true;
    } else if (u < 0.80) {
      tokens.emplace_back(rng.pick(kUnisex));
    } else {
      tokens.emplace_back(rng.pick(kClan));
    }
  }
  // Signal-free names come only from ambiguous_tokens, so an uncued prefix
  // forces a gendered last token.
  const double u = rng.uniform();
  if (u < 0.3) {
    tokens.push_back(terminal(rng, g));
  } else if (u < 0.6 || !cued) {
    tokens.push_back(stem(rng, g));
  } else {
    tokens.emplace_back(rng.pick(kClan));
  }
  return tokens;
}

std::vector<std::string> ambiguous_tokens(Rng& rng, std::size_t count) {
  std::vector<std::string> tokens;
  tokens.emplace_back(rng.pick(kUnisex));
  for (std::size_t i = 1; i < count; ++i) {
    tokens.emplace_back(rng.bernoulli(0.3) ? rng.pick(kUnisex) : rng.pick(kClan));
  }
  return tokens;
}

}  // namespace

Corpus generate_synthetic(std::size_t n, double male_fraction, std::uint64_t seed,
                          const SyntheticOptions& options) {
  if (n == 0) {
    throw Error(ErrorCode::InvalidArgument, "synthetic corpus size must be at least 1");
  }
  if (!(male_fraction > 0.0 && male_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidFraction,
                fmt::format("male fraction {} outside (0,1)", male_fraction));
  }
  for (double f : {options.unisex_fraction, options.ambiguous_fraction}) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw Error(ErrorCode::InvalidFraction, fmt::format("option fraction {} outside [0,1]", f));
    }
  }

  Rng rng(derive_seed(seed, "synthetic"));
  std::vector<NameRecord> records;
  records.reserve(n);
  while (records.size() < n) {
    const Gender g = rng.bernoulli(male_fraction) ? Gender::Male : Gender::Female;
    const double u = rng.uniform();
    const std::size_t count = u < 0.5 ? 2 : (u < 0.85 ? 3 : 4);
    const auto tokens = rng.bernoulli(options.ambiguous_fraction) ? ambiguous_tokens(rng, count)
                                                                  : cued_tokens(rng, g, count, options);
    std::string name = tokens.front();
    for (std::size_t i = 1; i < tokens.size(); ++i) name += ' ' + tokens[i];
    if (name.size() > kMaxFullNameLength || tokens.front().size() > kMaxFirstNameLength) {
      continue;
    }
    records.push_back(NameRecord{name, name, g});
  }
  return Corpus(std::move(records), Provenance{Provenance::Kind::Synthetic, seed});
}

}  // namespace namegender
