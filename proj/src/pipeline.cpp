#include "namegender/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "namegender/error.hpp"
#include "namegender/rng.hpp"

namespace namegender {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double predict_row(const Model& model, const RowView& row) {
  return std::visit(
      overloaded{[&](const NaiveBayesModel& m) { return nb_predict_proba(m, row); },
                 [&](const LogisticModel& m) { return logreg_predict_proba(m, row); },
                 [&](const BoostedModel& m) { return gbt_predict_proba(m, row); },
                 [&](const LstmNetwork&) -> double {
                   throw Error(ErrorCode::WrongModelKind,
                               "recurrent model cannot score tabular features");
                 }},
      model);
}

const LstmNetwork& network_of(const Model& model) {
  if (const auto* net = std::get_if<LstmNetwork>(&model)) return *net;
  throw Error(ErrorCode::WrongModelKind, "character sequences need the recurrent model");
}

FeatureMatrix transform_tabular(const Featurizer& featurizer, std::span<const std::string> names) {
  return std::visit(overloaded{[&](const BasicFeaturizer& f) { return f.transform(names); },
                               [&](const NgramFeaturizer& f) { return f.transform(names); },
                               [&](const CharIndexer&) -> FeatureMatrix {
                                 throw Error(ErrorCode::WrongModelKind,
                                             "character indexer does not produce a matrix");
                               }},
                    featurizer);
}

LogisticOptions logistic_options(const RunConfig& c) {
  return LogisticOptions{parse_penalty(c.logreg_penalty), c.logreg_c, c.logreg_tolerance,
                         c.logreg_max_iter};
}

BoostParams boost_params(const RunConfig& c) {
  BoostParams p;
  p.max_depth = c.gbt_max_depth;
  p.min_child_weight = c.gbt_min_child_weight;
  p.gamma = c.gbt_gamma;
  p.eta = c.gbt_eta;
  p.lambda = c.gbt_lambda;
  p.rounds = c.gbt_rounds;
  p.prior_base_score = c.gbt_prior_base_score;
  return p;
}

Learner<LogisticModel> logistic_learner(const RunConfig& config) {
  return {[config](const Candidate& c, const FeatureMatrix& x, std::span<const int> y) {
            auto o = logistic_options(config);
            o.penalty = parse_penalty(param_text(c, "penalty"));
            o.C = param_number(c, "C");
            return logreg_fit(x, y, o);
          },
          [](const LogisticModel& m, const RowView& row) { return logreg_predict_proba(m, row); }};
}

Learner<BoostedModel> boosted_learner(const RunConfig& config) {
  return {[config](const Candidate& c, const FeatureMatrix& x, std::span<const int> y) {
            auto p = boost_params(config);
            p.max_depth = static_cast<int>(param_number(c, "max_depth"));
            p.min_child_weight = param_number(c, "min_child_weight");
            p.gamma = param_number(c, "gamma");
            return gbt_fit(x, y, p);
          },
          [](const BoostedModel& m, const RowView& row) { return gbt_predict_proba(m, row); }};
}

GridSearchOptions grid_options(const RunConfig& config) {
  return GridSearchOptions{config.cv_folds, derive_seed(config.seed, "cv"), config.threads, true};
}

Featurizer fit_featurizer(const FeatureSpec& spec, const RunConfig& config,
                          std::span<const std::string> train_names, std::span<const int> train_y,
                          std::span<const std::string> all_names) {
  switch (spec.kind) {
    case FeatureKind::Basic:
      return BasicFeaturizer::fit(train_names);
    case FeatureKind::Ngram:
      return NgramFeaturizer::fit(train_names, train_y, spec.n, config.chi2_k);
    case FeatureKind::Chars:
      // Alphabet and padding length come from every name in the corpus; labels
      // play no part in either.
      return CharIndexer::fit(all_names, 0, config.unknown_bucket);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown feature kind");
}

struct PreparedSplit {
  CorpusSplit split;
  std::vector<std::string> train_names, test_names, all_names;
  std::vector<int> train_y, test_y;
};

PreparedSplit prepare(const Corpus& corpus, NameView view, const RunConfig& config) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyInput, "corpus is empty");
  PreparedSplit p{split(corpus, SplitSpec{config.test_fraction, config.seed, config.stratified}),
                  {}, {}, {}, {}, {}};
  p.train_names = p.split.train.names(view);
  p.test_names = p.split.test.names(view);
  p.train_y = p.split.train.labels();
  p.test_y = p.split.test.labels();
  p.all_names = p.train_names;
  p.all_names.insert(p.all_names.end(), p.test_names.begin(), p.test_names.end());
  return p;
}

std::vector<PaddedSequence> index_all(const CharIndexer& indexer, std::span<const std::string> names) {
  std::vector<PaddedSequence> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(indexer.index_and_pad(n));
  return out;
}

}  // namespace

double TrainedPipeline::predict(std::string_view normalized) const {
  const std::string name = apply_view(normalized, view);
  if (const auto* indexer = std::get_if<CharIndexer>(&featurizer)) {
    return predict_proba(network_of(model), indexer->index_and_pad(name));
  }
  const FeatureMatrix x = transform_tabular(featurizer, std::span(&name, 1));
  return predict_row(model, x.row(0));
}

std::vector<double> TrainedPipeline::predict_all(std::span<const std::string> normalized) const {
  std::vector<std::string> names;
  names.reserve(normalized.size());
  for (const auto& n : normalized) names.push_back(apply_view(n, view));
  std::vector<double> out(names.size());
  if (const auto* indexer = std::get_if<CharIndexer>(&featurizer)) {
    const auto& net = network_of(model);
    for (std::size_t i = 0; i < names.size(); ++i) {
      out[i] = predict_proba(net, indexer->index_and_pad(names[i]));
    }
    return out;
  }
  const FeatureMatrix x = transform_tabular(featurizer, names);
  for (std::size_t i = 0; i < names.size(); ++i) out[i] = predict_row(model, x.row(i));
  return out;
}

std::vector<std::string> TrainedPipeline::feature_names() const {
  return std::visit(
      overloaded{[](const BasicFeaturizer& f) { return f.encoder().column_names(); },
                 [](const NgramFeaturizer& f) {
                   std::vector<std::string> names;
                   for (auto j : f.selector().selected) names.push_back(f.vocabulary().grams()[j]);
                   return names;
                 },
                 [](const CharIndexer&) { return std::vector<std::string>{}; }},
      featurizer);
}

Grid logreg_grid() {
  return {{"penalty", {std::string("l1"), std::string("l2")}},
          {"C", {0.01, 0.1, 1.0, 10.0, 100.0}}};
}

Grid gbt_grid() {
  return {{"max_depth", {3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0}},
          {"min_child_weight", {0.0, 0.1, 1.0, 100.0, 1000.0}},
          {"gamma", {0.0, 0.1, 1.0, 100.0, 1000.0}}};
}

std::vector<std::size_t> lstm_sweep_dims(NameView view) {
  if (view == NameView::FullName) return {64, 128, 256};
  return {32, 64, 128};
}

ExperimentResult run_experiment(const Corpus& corpus, NameView view, const MethodSpec& spec,
                                const RunConfig& config, const EpochCallback& on_epoch) {
  check_pairing(spec);
  const auto data = prepare(corpus, view, config);

  ExperimentResult result;
  result.train_size = data.train_names.size();
  result.test_size = data.test_names.size();
  result.pipeline.view = view;
  result.pipeline.spec = spec;
  result.pipeline.featurizer =
      fit_featurizer(spec.features, config, data.train_names, data.train_y, data.all_names);

  if (spec.method == Method::Lstm) {
    const auto& indexer = std::get<CharIndexer>(result.pipeline.featurizer);
    const auto train_seqs = index_all(indexer, data.train_names);
    const auto test_seqs = index_all(indexer, data.test_names);
    LstmNetwork net = LstmNetwork::initialize(indexer.embedding_rows(), config.embed,
                                              config.hidden, derive_seed(config.seed, "lstm"));
    TrainConfig tc;
    tc.batch_size = config.batch;
    tc.epochs = config.epochs;
    tc.seed = derive_seed(config.seed, "lstm-train");
    result.curve = train(net, train_seqs, data.train_y, tc, HeldOut{test_seqs, data.test_y}, on_epoch);
    if (!net.params.all_finite()) {
      throw Error(ErrorCode::NonConvergence, "training produced non-finite parameters");
    }
    result.pipeline.model = std::move(net);
  } else {
    const FeatureMatrix x = transform_tabular(result.pipeline.featurizer, data.train_names);
    switch (spec.method) {
      case Method::NaiveBayes:
        result.pipeline.model = nb_fit(x, data.train_y, config.nb_alpha);
        break;
      case Method::Logistic:
        if (config.tune) {
          auto gs = grid_search(logistic_learner(config), logreg_grid(), x, data.train_y,
                                grid_options(config));
          result.grid_scores = std::move(gs.candidates);
          result.pipeline.model = std::move(*gs.best_model);
        } else {
          result.pipeline.model = logreg_fit(x, data.train_y, logistic_options(config));
        }
        break;
      case Method::Boosted:
        if (config.tune) {
          auto gs = grid_search(boosted_learner(config), gbt_grid(), x, data.train_y,
                                grid_options(config));
          result.grid_scores = std::move(gs.candidates);
          result.pipeline.model = std::move(*gs.best_model);
        } else {
          result.pipeline.model = gbt_fit(x, data.train_y, boost_params(config));
        }
        break;
      case Method::Lstm:
        break;
    }
  }

  const auto p = result.pipeline.predict_all(data.split.test.names(NameView::FullName));
  result.report = evaluate(p, data.test_y);
  return result;
}

std::vector<TableRow> run_feature_table(const Corpus& corpus, NameView view,
                                        const RunConfig& config) {
  std::vector<TableRow> rows;
  std::vector<FeatureSpec> feature_sets{{FeatureKind::Basic, 0}};
  for (int n = kMinNgram; n <= kMaxNgram; ++n) feature_sets.push_back({FeatureKind::Ngram, n});
  for (const auto& features : feature_sets) {
    for (Method method : {Method::NaiveBayes, Method::Logistic, Method::Boosted}) {
      const auto r = run_experiment(corpus, view, MethodSpec{method, features}, config);
      rows.push_back(TableRow{view, features, method, r.report});
    }
  }
  return rows;
}

std::vector<CandidateScore> run_grid_search(const Corpus& corpus, NameView view,
                                            const MethodSpec& spec, const RunConfig& config) {
  check_pairing(spec);
  if (spec.method != Method::Logistic && spec.method != Method::Boosted) {
    throw Error(ErrorCode::WrongModelKind, "cross-validated grids exist for logreg and gbt only");
  }
  const auto data = prepare(corpus, view, config);
  const auto featurizer =
      fit_featurizer(spec.features, config, data.train_names, data.train_y, data.all_names);
  const FeatureMatrix x = transform_tabular(featurizer, data.train_names);
  auto options = grid_options(config);
  options.refit = false;
  if (spec.method == Method::Logistic) {
    return grid_search(logistic_learner(config), logreg_grid(), x, data.train_y, options).candidates;
  }
  return grid_search(boosted_learner(config), gbt_grid(), x, data.train_y, options).candidates;
}

std::vector<SweepRow> run_lstm_sweep(const Corpus& corpus, NameView view, const RunConfig& config) {
  std::vector<SweepRow> rows;
  const auto dims = lstm_sweep_dims(view);
  for (auto embed : dims) {
    for (auto hidden : dims) {
      RunConfig c = config;
      c.embed = embed;
      c.hidden = hidden;
      const auto r = run_experiment(corpus, view, MethodSpec{Method::Lstm, {FeatureKind::Chars, 0}}, c);
      SweepRow row{embed, hidden, 0.0, -1.0, 0};
      for (const auto& m : r.curve) {
        if (m.test_accuracy > row.best_test_accuracy) {
          row.best_test_accuracy = m.test_accuracy;
          row.best_epoch = m.epoch;
        }
      }
      row.final_test_accuracy = r.curve.empty() ? r.report.accuracy : r.curve.back().test_accuracy;
      if (r.curve.empty()) row.best_test_accuracy = row.final_test_accuracy;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string report_csv_header() { return "variant,features,model,accuracy,precision,recall,f1"; }

std::string report_csv_row(NameView view, const FeatureSpec& features, Method method,
                           const EvalReport& report) {
  return fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f}", to_string(view), to_string(features),
                     to_string(method), report.accuracy, report.precision, report.recall, report.f1);
}

}  // namespace namegender
