#include "namegender/artifact.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "namegender/error.hpp"

namespace namegender {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedArtifact, what);
}

json tensor(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return json{{"shape", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

json tensor(const std::vector<double>& v) {
  return json{{"shape", {v.size()}}, {"data", v}};
}

Eigen::MatrixXd matrix_from(const json& t, Eigen::Index rows, Eigen::Index cols) {
  const auto shape = t.at("shape").get<std::vector<Eigen::Index>>();
  const auto data = t.at("data").get<std::vector<double>>();
  const bool vector_shape = shape.size() == 1 && cols == 1 && shape[0] == rows;
  const bool matrix_shape = shape.size() == 2 && shape[0] == rows && shape[1] == cols;
  if (!(vector_shape || matrix_shape) || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    malformed(fmt::format("tensor shape {} does not match expected {}x{}", json(shape).dump(), rows, cols));
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++];
  }
  return m;
}

std::vector<double> vector_from(const json& t) {
  const auto shape = t.at("shape").get<std::vector<std::size_t>>();
  auto data = t.at("data").get<std::vector<double>>();
  if (shape.size() != 1 || shape[0] != data.size()) malformed("vector tensor shape mismatch");
  return data;
}

// ---- featurizers

json featurizer_json(const Featurizer& f) {
  return std::visit(
      overloaded{
          [](const BasicFeaturizer& b) {
            json cats = json::array();
            for (const auto& slot : b.encoder().categories()) {
              json values = json::array();
              for (char c : slot) values.push_back(c == kAbsent ? std::string() : std::string(1, c));
              cats.push_back(std::move(values));
            }
            return json{{"kind", "basic"}, {"categories", std::move(cats)}};
          },
          [](const NgramFeaturizer& n) {
            const auto& v = n.vocabulary();
            const auto& s = n.selector();
            return json{{"kind", "ngram"},
                        {"n", v.n()},
                        {"grams", v.grams()},
                        {"document_frequency", v.document_frequency()},
                        {"k", s.k},
                        {"selected", s.selected},
                        {"scores", tensor(s.scores)}};
          },
          [](const CharIndexer& c) {
            return json{{"kind", "chars"},
                        {"alphabet", c.alphabet()},
                        {"max_len", c.max_len()},
                        {"unknown_bucket", c.unknown_bucket()}};
          }},
      f);
}

Featurizer featurizer_from(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "basic") {
    std::array<std::vector<char>, BasicFeatures::kSlots> cats;
    const auto& slots = j.at("categories");
    if (!slots.is_array() || slots.size() != BasicFeatures::kSlots) malformed("expected four one-hot slots");
    for (std::size_t s = 0; s < BasicFeatures::kSlots; ++s) {
      for (const auto& v : slots[s]) {
        const auto text = v.get<std::string>();
        if (text.size() > 1) malformed("one-hot category must be one character");
        cats[s].push_back(text.empty() ? kAbsent : text[0]);
      }
    }
    return BasicFeaturizer(OneHotEncoder(std::move(cats)));
  }
  if (kind == "ngram") {
    NgramVocabulary vocab(j.at("n").get<int>(), j.at("grams").get<std::vector<std::string>>(),
                          j.at("document_frequency").get<std::vector<std::size_t>>());
    Chi2Selector sel{j.at("k").get<std::size_t>(), j.at("selected").get<std::vector<std::size_t>>(),
                     vector_from(j.at("scores"))};
    for (auto col : sel.selected) {
      if (col >= vocab.size()) malformed("selected column outside vocabulary");
    }
    return NgramFeaturizer(std::move(vocab), std::move(sel));
  }
  if (kind == "chars") {
    return CharIndexer(j.at("alphabet").get<std::string>(), j.at("max_len").get<std::size_t>(),
                       j.at("unknown_bucket").get<bool>());
  }
  malformed(fmt::format("unknown featurizer kind '{}'", kind));
}

// ---- trees

json node_json(const Tree& tree, std::size_t id) {
  const auto& n = tree.nodes[id];
  if (n.is_leaf()) return json{{"id", id}, {"leaf", n.weight}, {"hessian", n.hessian}};
  return json{{"id", id},
              {"split",
               {{"feature", n.feature}, {"threshold", n.threshold}, {"gain", n.gain}, {"hessian", n.hessian}}},
              {"left", node_json(tree, static_cast<std::size_t>(n.left))},
              {"right", node_json(tree, static_cast<std::size_t>(n.right))}};
}

int node_from(const json& j, Tree& tree, std::size_t width, int depth) {
  if (depth > 64) malformed("tree too deep");
  const auto id = j.at("id").get<std::size_t>();
  if (id >= 1u << 20) malformed("tree node id out of range");
  if (tree.nodes.size() <= id) tree.nodes.resize(id + 1);
  TreeNode node;
  if (j.contains("leaf")) {
    node.weight = j.at("leaf").get<double>();
    node.hessian = j.at("hessian").get<double>();
  } else {
    const auto& s = j.at("split");
    node.feature = s.at("feature").get<int>();
    if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= width) malformed("split feature out of range");
    node.threshold = s.at("threshold").get<double>();
    node.gain = s.at("gain").get<double>();
    node.hessian = s.at("hessian").get<double>();
    node.left = node_from(j.at("left"), tree, width, depth + 1);
    node.right = node_from(j.at("right"), tree, width, depth + 1);
  }
  tree.nodes[id] = node;
  return static_cast<int>(id);
}

// ---- models

json model_json(const Model& m) {
  return std::visit(
      overloaded{
          [](const NaiveBayesModel& nb) {
            Eigen::MatrixXd ll(2, static_cast<Eigen::Index>(nb.width()));
            for (std::size_t c = 0; c < 2; ++c) {
              for (std::size_t f = 0; f < nb.width(); ++f) {
                ll(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(f)) = nb.log_likelihood[c][f];
              }
            }
            return json{{"kind", "nb"},
                        {"alpha", nb.alpha},
                        {"log_prior", {nb.log_prior[0], nb.log_prior[1]}},
                        {"log_likelihood", tensor(ll)}};
          },
          [](const LogisticModel& lr) {
            const auto& d = lr.diagnostics;
            return json{{"kind", "logreg"},
                        {"penalty", std::string(to_string(lr.penalty))},
                        {"C", lr.C},
                        {"weights", tensor(lr.weights)},
                        {"intercept", lr.intercept},
                        {"diagnostics",
                         {{"iterations", d.iterations},
                          {"converged", d.converged},
                          {"parameter_change", d.parameter_change},
                          {"gradient_norm", d.gradient_norm}}}};
          },
          [](const BoostedModel& gb) {
            json trees = json::array();
            for (const auto& t : gb.trees) trees.push_back(node_json(t, 0));
            const auto& p = gb.params;
            return json{{"kind", "gbt"},
                        {"base_score", gb.base_score},
                        {"width", gb.width},
                        {"params",
                         {{"max_depth", p.max_depth},
                          {"min_child_weight", p.min_child_weight},
                          {"gamma", p.gamma},
                          {"eta", p.eta},
                          {"lambda", p.lambda},
                          {"rounds", p.rounds},
                          {"prior_base_score", p.prior_base_score}}},
                        {"trees", std::move(trees)}};
          },
          [](const LstmNetwork& net) {
            const auto& p = net.params;
            return json{{"kind", "lstm"},
                        {"embedding_rows", p.embedding_rows()},
                        {"embed_dim", p.embed_dim()},
                        {"hidden", p.hidden()},
                        {"tensors",
                         {{"embedding", tensor(p.embedding)},
                          {"kernel", tensor(p.kernel)},
                          {"recurrent", tensor(p.recurrent)},
                          {"bias", tensor(Eigen::MatrixXd(p.bias))},
                          {"out_weight", tensor(Eigen::MatrixXd(p.out_weight))},
                          {"out_bias", tensor(Eigen::MatrixXd(p.out_bias))}}}};
          }},
      m);
}

Model model_from(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "nb") {
    NaiveBayesModel nb;
    nb.alpha = j.at("alpha").get<double>();
    const auto prior = j.at("log_prior").get<std::vector<double>>();
    if (prior.size() != 2) malformed("naive bayes needs two priors");
    nb.log_prior = {prior[0], prior[1]};
    const auto& t = j.at("log_likelihood");
    const auto shape = t.at("shape").get<std::vector<Eigen::Index>>();
    if (shape.size() != 2 || shape[0] != 2) malformed("naive bayes likelihood must be 2 x F");
    const auto ll = matrix_from(t, 2, shape[1]);
    for (Eigen::Index c = 0; c < 2; ++c) {
      auto& row = nb.log_likelihood[static_cast<std::size_t>(c)];
      for (Eigen::Index f = 0; f < ll.cols(); ++f) row.push_back(ll(c, f));
    }
    return nb;
  }
  if (kind == "logreg") {
    LogisticModel lr;
    lr.penalty = parse_penalty(j.at("penalty").get<std::string>());
    lr.C = j.at("C").get<double>();
    lr.weights = vector_from(j.at("weights"));
    lr.intercept = j.at("intercept").get<double>();
    const auto& d = j.at("diagnostics");
    lr.diagnostics.iterations = d.at("iterations").get<int>();
    lr.diagnostics.converged = d.at("converged").get<bool>();
    lr.diagnostics.parameter_change = d.at("parameter_change").get<double>();
    lr.diagnostics.gradient_norm = d.at("gradient_norm").get<double>();
    return lr;
  }
  if (kind == "gbt") {
    BoostedModel gb;
    gb.base_score = j.at("base_score").get<double>();
    gb.width = j.at("width").get<std::size_t>();
    const auto& p = j.at("params");
    gb.params.max_depth = p.at("max_depth").get<int>();
    gb.params.min_child_weight = p.at("min_child_weight").get<double>();
    gb.params.gamma = p.at("gamma").get<double>();
    gb.params.eta = p.at("eta").get<double>();
    gb.params.lambda = p.at("lambda").get<double>();
    gb.params.rounds = p.at("rounds").get<int>();
    gb.params.prior_base_score = p.at("prior_base_score").get<bool>();
    for (const auto& t : j.at("trees")) {
      Tree tree;
      if (node_from(t, tree, gb.width, 0) != 0) malformed("tree root must have id 0");
      gb.trees.push_back(std::move(tree));
    }
    return gb;
  }
  if (kind == "lstm") {
    const auto rows = j.at("embedding_rows").get<Eigen::Index>();
    const auto d = j.at("embed_dim").get<Eigen::Index>();
    const auto h = j.at("hidden").get<Eigen::Index>();
    const auto& t = j.at("tensors");
    LstmNetwork net;
    auto& p = net.params;
    p.embedding = matrix_from(t.at("embedding"), rows, d);
    p.kernel = matrix_from(t.at("kernel"), 4 * h, d);
    p.recurrent = matrix_from(t.at("recurrent"), 4 * h, h);
    p.bias = matrix_from(t.at("bias"), 4 * h, 1);
    p.out_weight = matrix_from(t.at("out_weight"), h, 1);
    p.out_bias = matrix_from(t.at("out_bias"), 1, 1);
    return net;
  }
  malformed(fmt::format("unknown model kind '{}'", kind));
}

}  // namespace

std::string fingerprint_hex(std::uint64_t fingerprint) { return fmt::format("{:016x}", fingerprint); }

json artifact_to_json(const ModelArtifact& a) {
  const auto& p = a.pipeline;
  return json{{"format", "namegender-model"},
              {"format_version", a.format_version},
              {"variant", std::string(to_string(p.view))},
              {"method", std::string(to_string(p.spec.method))},
              {"features", to_string(p.spec.features)},
              {"featurizer", featurizer_json(p.featurizer)},
              {"model", model_json(p.model)},
              {"metadata",
               {{"seed", a.config.seed},
                {"config", to_json(a.config)},
                {"corpus_fingerprint", fingerprint_hex(a.corpus_fingerprint)},
                {"train_size", a.train_size},
                {"test_size", a.test_size}}}};
}

ModelArtifact artifact_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "namegender-model") malformed("not a namegender model");
    const int version = j.at("format_version").get<int>();
    if (version != kArtifactFormatVersion) {
      throw Error(ErrorCode::VersionMismatch,
                  fmt::format("artifact format {} but this build reads {}", version, kArtifactFormatVersion));
    }
    ModelArtifact a;
    a.format_version = version;
    a.pipeline.view = parse_name_view(j.at("variant").get<std::string>());
    a.pipeline.spec = MethodSpec{parse_method(j.at("method").get<std::string>()),
                                 parse_features(j.at("features").get<std::string>())};
    check_pairing(a.pipeline.spec);
    a.pipeline.featurizer = featurizer_from(j.at("featurizer"));
    a.pipeline.model = model_from(j.at("model"));
    const auto& meta = j.at("metadata");
    a.config = run_config_from_json(meta.at("config"));
    const auto fp = meta.at("corpus_fingerprint").get<std::string>();
    a.corpus_fingerprint = std::stoull(fp, nullptr, 16);
    a.train_size = meta.at("train_size").get<std::size_t>();
    a.test_size = meta.at("test_size").get<std::size_t>();
    return a;
  } catch (const json::exception& e) {
    malformed(e.what());
  } catch (const std::invalid_argument& e) {
    malformed(e.what());
  } catch (const std::out_of_range& e) {
    malformed(e.what());
  }
}

std::string serialize_artifact(const ModelArtifact& artifact) {
  return artifact_to_json(artifact).dump(1) + "\n";
}

ModelArtifact parse_artifact(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    malformed(e.what());
  }
  return artifact_from_json(j);
}

void save_artifact(const std::filesystem::path& path, const ModelArtifact& artifact) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
  out << serialize_artifact(artifact);
}

ModelArtifact load_artifact(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_artifact(buf.str());
}

}  // namespace namegender
