#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace namegender {

enum class Method { NaiveBayes, Logistic, Boosted, Lstm };
enum class FeatureKind { Basic, Ngram, Chars };

struct FeatureSpec {
  FeatureKind kind = FeatureKind::Basic;
  int n = 0;  // n-gram size when kind == Ngram

  bool operator==(const FeatureSpec&) const = default;
};

struct MethodSpec {
  Method method = Method::NaiveBayes;
  FeatureSpec features;

  bool operator==(const MethodSpec&) const = default;
};

std::string_view to_string(Method m);  // nb | logreg | gbt | lstm
std::string to_string(const FeatureSpec& f);  // basic | ngram:N | chars
Method parse_method(std::string_view value);
FeatureSpec parse_features(std::string_view value);

// Throws IncompatiblePair: the recurrent model consumes only character
// sequences, the other models only basic or n-gram features.
void check_pairing(const MethodSpec& spec);

// Every tunable of a run. Defaults follow the documented protocol.
struct RunConfig {
  std::uint64_t seed = 42;
  std::string variant = "full";
  std::string method = "lstm";
  std::string features = "chars";

  double test_fraction = 0.2;
  bool stratified = true;
  std::size_t cv_folds = 5;
  bool tune = false;
  std::size_t threads = 1;

  double nb_alpha = 1.0;

  std::string logreg_penalty = "l2";
  double logreg_c = 1.0;
  double logreg_tolerance = 1e-6;
  int logreg_max_iter = 5000;

  int gbt_max_depth = 6;
  double gbt_min_child_weight = 1.0;
  double gbt_gamma = 0.0;
  double gbt_eta = 0.3;
  double gbt_lambda = 1.0;
  int gbt_rounds = 100;
  bool gbt_prior_base_score = true;

  std::size_t chi2_k = 1000;

  std::size_t embed = 64;
  std::size_t hidden = 64;
  int epochs = 20;
  std::size_t batch = 32;
  bool unknown_bucket = false;

  MethodSpec method_spec() const;
};

nlohmann::json to_json(const RunConfig& config);
// Rejects unknown keys and mistyped values; missing keys keep defaults.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace namegender
