#include "namegender/run_config.hpp"

#include <charconv>
#include <fstream>

#include <fmt/format.h>

#include "namegender/error.hpp"

namespace namegender {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::NaiveBayes: return "nb";
    case Method::Logistic: return "logreg";
    case Method::Boosted: return "gbt";
    case Method::Lstm: return "lstm";
  }
  return "?";
}

std::string to_string(const FeatureSpec& f) {
  switch (f.kind) {
    case FeatureKind::Basic: return "basic";
    case FeatureKind::Ngram: return fmt::format("ngram:{}", f.n);
    case FeatureKind::Chars: return "chars";
  }
  return "?";
}

Method parse_method(std::string_view value) {
  if (value == "nb") return Method::NaiveBayes;
  if (value == "logreg") return Method::Logistic;
  if (value == "gbt") return Method::Boosted;
  if (value == "lstm") return Method::Lstm;
  throw Error(ErrorCode::InvalidArgument,
              fmt::format("unknown method '{}', expected nb|logreg|gbt|lstm", value));
}

FeatureSpec parse_features(std::string_view value) {
  if (value == "basic") return {FeatureKind::Basic, 0};
  if (value == "chars") return {FeatureKind::Chars, 0};
  if (value.starts_with("ngram:")) {
    const auto digits = value.substr(6);
    int n = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && n >= 2 && n <= 5) {
      return {FeatureKind::Ngram, n};
    }
    throw Error(ErrorCode::InvalidN, fmt::format("'{}': n-gram size must be 2..5", value));
  }
  throw Error(ErrorCode::InvalidArgument,
              fmt::format("unknown features '{}', expected basic|ngram:N|chars", value));
}

void check_pairing(const MethodSpec& spec) {
  const bool chars = spec.features.kind == FeatureKind::Chars;
  if ((spec.method == Method::Lstm) != chars) {
    throw Error(ErrorCode::IncompatiblePair,
                fmt::format("method '{}' cannot use features '{}' (lstm requires chars; nb, "
                            "logreg and gbt require basic or ngram:N)",
                            to_string(spec.method), to_string(spec.features)));
  }
}

MethodSpec RunConfig::method_spec() const {
  MethodSpec spec{parse_method(method), parse_features(features)};
  check_pairing(spec);
  return spec;
}

namespace {

// Field table shared by serialization and parsing, so both stay in sync.
template <typename Visitor>
void visit_fields(RunConfig& c, Visitor&& v) {
  v("seed", c.seed);
  v("variant", c.variant);
  v("method", c.method);
  v("features", c.features);
  v("test_fraction", c.test_fraction);
  v("stratified", c.stratified);
  v("cv_folds", c.cv_folds);
  v("tune", c.tune);
  v("threads", c.threads);
  v("nb_alpha", c.nb_alpha);
  v("logreg_penalty", c.logreg_penalty);
  v("logreg_c", c.logreg_c);
  v("logreg_tolerance", c.logreg_tolerance);
  v("logreg_max_iter", c.logreg_max_iter);
  v("gbt_max_depth", c.gbt_max_depth);
  v("gbt_min_child_weight", c.gbt_min_child_weight);
  v("gbt_gamma", c.gbt_gamma);
  v("gbt_eta", c.gbt_eta);
  v("gbt_lambda", c.gbt_lambda);
  v("gbt_rounds", c.gbt_rounds);
  v("gbt_prior_base_score", c.gbt_prior_base_score);
  v("chi2_k", c.chi2_k);
  v("embed", c.embed);
  v("hidden", c.hidden);
  v("epochs", c.epochs);
  v("batch", c.batch);
  v("unknown_bucket", c.unknown_bucket);
}

}  // namespace

nlohmann::json to_json(const RunConfig& config) {
  nlohmann::json j = nlohmann::json::object();
  RunConfig copy = config;
  visit_fields(copy, [&](const char* key, const auto& value) { j[key] = value; });
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "run config must be a JSON object");
  RunConfig config;
  std::size_t matched = 0;
  visit_fields(config, [&](const char* key, auto& field) {
    const auto it = j.find(key);
    if (it == j.end()) return;
    ++matched;
    try {
      field = it->template get<std::remove_reference_t<decltype(field)>>();
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("config key '{}' has the wrong type", key));
    }
  });
  if (matched != j.size()) {
    for (const auto& [key, value] : j.items()) {
      bool known = false;
      visit_fields(config, [&](const char* k, auto&) { known = known || key == k; });
      if (!known) throw Error(ErrorCode::UnknownConfigKey, fmt::format("unknown config key '{}'", key));
    }
  }
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open config '{}'", path.string()));
  try {
    return run_config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("config '{}': {}", path.string(), e.what()));
  }
}

}  // namespace namegender
