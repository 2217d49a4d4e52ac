#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "namegender/boosted_trees.hpp"
#include "namegender/char_lstm.hpp"
#include "namegender/corpus.hpp"
#include "namegender/features.hpp"
#include "namegender/grid_search.hpp"
#include "namegender/logistic.hpp"
#include "namegender/metrics.hpp"
#include "namegender/naive_bayes.hpp"
#include "namegender/run_config.hpp"

namespace namegender {

using Featurizer = std::variant<BasicFeaturizer, NgramFeaturizer, CharIndexer>;
using Model = std::variant<NaiveBayesModel, LogisticModel, BoostedModel, LstmNetwork>;

// A fitted featurizer and the model trained on its output.
struct TrainedPipeline {
  NameView view = NameView::FullName;
  MethodSpec spec;
  Featurizer featurizer;
  Model model;

  // `normalized` is a full normalized name; the view is applied here.
  double predict(std::string_view normalized) const;
  std::vector<double> predict_all(std::span<const std::string> normalized) const;

  // Column names of the tabular featurizers, empty for character input.
  std::vector<std::string> feature_names() const;
};

Grid logreg_grid();  // penalty x C
Grid gbt_grid();     // max_depth x min_child_weight x gamma
// Embedding and hidden sizes tried for each view.
std::vector<std::size_t> lstm_sweep_dims(NameView view);

struct ExperimentResult {
  EvalReport report;
  TrainedPipeline pipeline;
  std::vector<EpochMetrics> curve;           // recurrent model only
  std::vector<CandidateScore> grid_scores;   // when tuned
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

// Splits the corpus, fits featurizer and model on the training part, and
// evaluates on the held-out part.
ExperimentResult run_experiment(const Corpus& corpus, NameView view, const MethodSpec& spec,
                                const RunConfig& config, const EpochCallback& on_epoch = {});

struct TableRow {
  NameView view = NameView::FullName;
  FeatureSpec features;
  Method method = Method::NaiveBayes;
  EvalReport report;
};

// basic + 2..5-gram features crossed with nb, logreg and gbt.
std::vector<TableRow> run_feature_table(const Corpus& corpus, NameView view,
                                        const RunConfig& config);

// Cross-validated grid over the training split for logreg or gbt.
std::vector<CandidateScore> run_grid_search(const Corpus& corpus, NameView view,
                                            const MethodSpec& spec, const RunConfig& config);

struct SweepRow {
  std::size_t embed = 0;
  std::size_t hidden = 0;
  double final_test_accuracy = 0.0;
  double best_test_accuracy = 0.0;
  int best_epoch = 0;
};

// Every (embed, hidden) pair of lstm_sweep_dims trained on the training split
// and scored on the held-out split after each epoch.
std::vector<SweepRow> run_lstm_sweep(const Corpus& corpus, NameView view, const RunConfig& config);

// Report CSV: variant,features,model,accuracy,precision,recall,f1
std::string report_csv_header();
std::string report_csv_row(NameView view, const FeatureSpec& features, Method method,
                           const EvalReport& report);

}  // namespace namegender
