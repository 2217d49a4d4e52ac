#include "namegender/commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "namegender/boosted_trees.hpp"
#include "namegender/explain.hpp"

namespace namegender {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::IncompatiblePair:
    case ErrorCode::WrongModelKind:
    case ErrorCode::UnknownConfigKey:
    case ErrorCode::InvalidFraction:
    case ErrorCode::InvalidN:
      return kExitUsage;
    case ErrorCode::NonConvergence:
      return kExitTraining;
    default:
      return kExitData;
  }
}

TrainOutcome train_from_config(const Corpus& corpus, const RunConfig& config,
                               const EpochCallback& on_epoch) {
  const auto spec = config.method_spec();
  const auto view = parse_name_view(config.variant);
  TrainOutcome outcome{run_experiment(corpus, view, spec, config, on_epoch), {}};
  auto& a = outcome.artifact;
  a.pipeline = outcome.result.pipeline;
  a.config = config;
  a.corpus_fingerprint = corpus.fingerprint();
  a.train_size = outcome.result.train_size;
  a.test_size = outcome.result.test_size;
  return outcome;
}

void write_curve_csv(std::ostream& out, const std::vector<EpochMetrics>& curve) {
  out << "epoch,train_acc,test_acc,train_loss\n";
  for (const auto& m : curve) {
    out << fmt::format("{},{:.6f},{:.6f},{:.6f}\n", m.epoch, m.train_accuracy, m.test_accuracy,
                       m.train_loss);
  }
}

void write_grid_csv(std::ostream& out, const std::vector<CandidateScore>& scores) {
  if (scores.empty()) return;
  std::string header;
  for (const auto& [name, value] : scores.front().params) header += name + ",";
  header += "mean_accuracy,std_accuracy";
  for (std::size_t f = 0; f < scores.front().fold_scores.size(); ++f) header += fmt::format(",fold{}", f + 1);
  out << header << "\n";
  for (const auto& s : scores) {
    std::string line;
    for (const auto& [name, value] : s.params) line += format_param(value) + ",";
    line += fmt::format("{:.6f},{:.6f}", s.mean, s.stddev);
    for (double v : s.fold_scores) line += fmt::format(",{:.6f}", v);
    out << line << "\n";
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "embed,hidden,final_test_acc,best_test_acc,best_epoch\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{:.6f},{:.6f},{}\n", r.embed, r.hidden, r.final_test_accuracy,
                       r.best_test_accuracy, r.best_epoch);
  }
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path));
  out << content;
  if (!out) throw Error(ErrorCode::Io, fmt::format("write to '{}' failed", path));
}

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream s;
  fn(s);
  return s.str();
}

std::string report_text(const EvalReport& r) {
  return fmt::format(
      "accuracy  {:.4f}\nprecision {:.4f}\nrecall    {:.4f}\nf1        {:.4f}\n"
      "tp {}  fp {}  tn {}  fn {}\n",
      r.accuracy, r.precision, r.recall, r.f1, r.tp, r.fp, r.tn, r.fn);
}

FeatureSpec default_features(Method m) {
  return m == Method::Lstm ? FeatureSpec{FeatureKind::Chars, 0} : FeatureSpec{FeatureKind::Basic, 0};
}

// RunConfig fields exposed as flags. A flag given on the command line
// overrides the value from --config.
class ConfigFlags {
 public:
  void attach(CLI::App* app, bool model_flags) {
    app->add_option("--config", config_path_, "JSON run configuration");
    add(app, "--variant", &RunConfig::variant, "full | first");
    add(app, "--seed", &RunConfig::seed, "master seed");
    add(app, "--epochs", &RunConfig::epochs, "recurrent training epochs (default 20)");
    add(app, "--batch", &RunConfig::batch, "mini-batch size (default 32)");
    add(app, "--folds", &RunConfig::cv_folds, "cross-validation folds (default 5)");
    add(app, "--threads", &RunConfig::threads, "grid-search worker threads");
    add(app, "--test-fraction", &RunConfig::test_fraction, "held-out fraction (default 0.2)");
    if (model_flags) {
      method_ = add(app, "--method", &RunConfig::method, "nb | logreg | gbt | lstm");
      features_ = add(app, "--features", &RunConfig::features, "basic | ngram:N | chars");
      add(app, "--embed", &RunConfig::embed, "embedding size");
      add(app, "--hidden", &RunConfig::hidden, "LSTM hidden units");
    }
  }

  void attach_tune(CLI::App* app) {
    app->add_flag("--tune", tune_, "pick hyperparameters by cross-validated grid search");
  }

  RunConfig resolve() const {
    RunConfig c = config_path_.empty() ? RunConfig{} : load_run_config(config_path_);
    for (const auto& apply : appliers_) apply(c);
    if (tune_) c.tune = true;
    const bool method_given = method_ && method_->count() > 0;
    const bool features_given = features_ && features_->count() > 0;
    if (method_given && !features_given) {
      const Method m = parse_method(c.method);
      try {
        check_pairing(MethodSpec{m, parse_features(c.features)});
      } catch (const Error&) {
        c.features = to_string(default_features(m));
      }
    }
    c.method_spec();
    parse_name_view(c.variant);
    return c;
  }

 private:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& flag, T RunConfig::*field, const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *value, help);
    appliers_.push_back([value, opt, field](RunConfig& c) {
      if (opt->count() > 0) c.*field = *value;
    });
    return opt;
  }

  std::string config_path_;
  bool tune_ = false;
  CLI::Option* method_ = nullptr;
  CLI::Option* features_ = nullptr;
  std::vector<std::function<void(RunConfig&)>> appliers_;
};

const BoostedModel& boosted_of(const ModelArtifact& a) {
  const auto* m = std::get_if<BoostedModel>(&a.pipeline.model);
  if (!m) throw Error(ErrorCode::WrongModelKind, "dump-trees needs a gbt model");
  return *m;
}

double predict_with_hint(const TrainedPipeline& p, const std::string& normalized) {
  try {
    return p.predict(normalized);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnknownCharacter || e.code() == ErrorCode::TooLong) {
      throw Error(e.code(), fmt::format("{} (the character set and maximum length are fixed when the "
                                        "model is trained; retrain with unknown_bucket or on data "
                                        "covering this name)",
                                        e.what()));
    }
    throw;
  }
}

std::string prediction_row(const std::string& name, double p) {
  return fmt::format("{},{},{},{}\n", name, p, 1.0 - p, p >= kDefaultThreshold ? "m" : "f");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Character-level name to gender classifier", "namegender"};
  app.require_subcommand(1);
  std::function<void()> action;

  // gen
  auto* gen = app.add_subcommand("gen", "write a synthetic name,gender corpus");
  std::size_t gen_n = 0;
  double gen_male_fraction = kDefaultMaleFraction;
  std::uint64_t gen_seed = 42;
  std::string gen_out;
  gen->add_option("--n", gen_n, "number of records")->required();
  gen->add_option("--male-fraction", gen_male_fraction, "share of male records")
      ->capture_default_str();
  gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
  gen->add_option("--out", gen_out, "output CSV")->required();
  gen->callback([&] {
    action = [&] {
      const auto corpus = generate_synthetic(gen_n, gen_male_fraction, gen_seed);
      save_corpus(gen_out, corpus);
      out << fmt::format("wrote {} records ({} male) to {}\n", corpus.size(),
                         corpus.count(Gender::Male), gen_out);
    };
  });

  // train
  auto* train_cmd = app.add_subcommand("train", "fit a model and evaluate on the held-out split");
  ConfigFlags train_flags;
  std::string train_data, train_out, train_report, train_curve;
  train_cmd->add_option("--data", train_data, "name,gender CSV")->required();
  train_cmd->add_option("--out", train_out, "model artifact path")->required();
  train_cmd->add_option("--report", train_report, "report CSV path");
  train_cmd->add_option("--curve", train_curve, "per-epoch CSV path (lstm)");
  train_flags.attach(train_cmd, true);
  train_flags.attach_tune(train_cmd);
  train_cmd->callback([&] {
    action = [&] {
      const RunConfig config = train_flags.resolve();
      const auto corpus = load_corpus(train_data);
      const auto outcome = train_from_config(corpus, config, [&](const EpochMetrics& m) {
        out << fmt::format("epoch {:>3}  loss {:.4f}  train_acc {:.4f}  test_acc {:.4f}\n", m.epoch,
                           m.train_loss, m.train_accuracy, m.test_accuracy);
      });
      const auto& r = outcome.result;
      save_artifact(train_out, outcome.artifact);
      const auto& p = r.pipeline;
      const std::string row = report_csv_row(p.view, p.spec.features, p.spec.method, r.report);
      if (!train_report.empty()) write_file(train_report, report_csv_header() + "\n" + row + "\n");
      if (!train_curve.empty()) {
        write_file(train_curve, render([&](std::ostream& s) { write_curve_csv(s, r.curve); }));
      }
      out << fmt::format("train {}  test {}\n", r.train_size, r.test_size) << report_text(r.report);
    };
  });

  // gridsearch
  auto* grid_cmd = app.add_subcommand("gridsearch", "score every candidate of a hyperparameter grid");
  ConfigFlags grid_flags;
  std::string grid_data, grid_out;
  grid_cmd->add_option("--data", grid_data, "name,gender CSV")->required();
  grid_cmd->add_option("--out", grid_out, "candidate CSV path")->required();
  grid_flags.attach(grid_cmd, true);
  grid_cmd->callback([&] {
    action = [&] {
      const RunConfig config = grid_flags.resolve();
      const auto corpus = load_corpus(grid_data);
      const auto spec = config.method_spec();
      const auto view = parse_name_view(config.variant);
      std::size_t count = 0;
      if (spec.method == Method::Lstm) {
        const auto rows = run_lstm_sweep(corpus, view, config);
        count = rows.size();
        write_file(grid_out, render([&](std::ostream& s) { write_sweep_csv(s, rows); }));
      } else {
        const auto scores = run_grid_search(corpus, view, spec, config);
        count = scores.size();
        write_file(grid_out, render([&](std::ostream& s) { write_grid_csv(s, scores); }));
      }
      out << fmt::format("{} candidates written to {}\n", count, grid_out);
    };
  });

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "basic and n-gram features crossed with nb, logreg, gbt");
  ConfigFlags exp_flags;
  std::string exp_data, exp_out;
  exp_cmd->add_option("--data", exp_data, "name,gender CSV")->required();
  exp_cmd->add_option("--out", exp_out, "report CSV path")->required();
  exp_flags.attach(exp_cmd, false);
  exp_cmd->callback([&] {
    action = [&] {
      const RunConfig config = exp_flags.resolve();
      const auto corpus = load_corpus(exp_data);
      const auto rows = run_feature_table(corpus, parse_name_view(config.variant), config);
      std::string csv = report_csv_header() + "\n";
      for (const auto& row : rows) {
        const auto line = report_csv_row(row.view, row.features, row.method, row.report);
        csv += line + "\n";
        out << line << "\n";
      }
      write_file(exp_out, csv);
    };
  });

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "score a saved model on every row of a CSV");
  std::string eval_model, eval_data, eval_report, eval_predictions;
  eval_cmd->add_option("--model", eval_model, "model artifact")->required();
  eval_cmd->add_option("--data", eval_data, "name,gender CSV")->required();
  eval_cmd->add_option("--report", eval_report, "report CSV path");
  eval_cmd->add_option("--predictions", eval_predictions, "per-name probability CSV path");
  eval_cmd->callback([&] {
    action = [&] {
      const auto artifact = load_artifact(eval_model);
      const auto corpus = load_corpus(eval_data);
      const auto& p = artifact.pipeline;
      std::vector<std::string> names;
      for (const auto& rec : corpus.records()) names.push_back(rec.normalized);
      const auto probs = p.predict_all(names);
      const auto report = evaluate(probs, corpus.labels());
      if (!eval_report.empty()) {
        write_file(eval_report, report_csv_header() + "\n" +
                                    report_csv_row(p.view, p.spec.features, p.spec.method, report) + "\n");
      }
      if (!eval_predictions.empty()) {
        std::string csv = "name,p_male,p_female,label\n";
        for (std::size_t i = 0; i < names.size(); ++i) csv += prediction_row(names[i], probs[i]);
        write_file(eval_predictions, csv);
      }
      out << report_text(report);
    };
  });

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "P(male) and P(female) for names");
  std::string predict_model;
  std::vector<std::string> predict_names;
  predict_cmd->add_option("--model", predict_model, "model artifact")->required();
  predict_cmd->add_option("--name", predict_names, "name to classify (repeatable)")->required();
  predict_cmd->callback([&] {
    action = [&] {
      const auto artifact = load_artifact(predict_model);
      std::string text = "name,p_male,p_female,label\n";
      for (const auto& raw : predict_names) {
        const auto normalized = normalize_name(raw);
        text += prediction_row(normalized, predict_with_hint(artifact.pipeline, normalized));
      }
      out << text;
    };
  });

  // explain
  auto* explain_cmd = app.add_subcommand("explain", "probability after each added character");
  std::string explain_model, explain_name, explain_out;
  explain_cmd->add_option("--model", explain_model, "lstm model artifact")->required();
  explain_cmd->add_option("--name", explain_name, "name to trace")->required();
  explain_cmd->add_option("--out", explain_out, "trace CSV path (stdout when omitted)");
  explain_cmd->callback([&] {
    action = [&] {
      const auto artifact = load_artifact(explain_model);
      const auto& p = artifact.pipeline;
      const auto* net = std::get_if<LstmNetwork>(&p.model);
      if (!net) {
        throw Error(ErrorCode::WrongModelKind,
                    fmt::format("explain needs an lstm model, got {}", to_string(p.spec.method)));
      }
      const auto name = apply_view(normalize_name(explain_name), p.view);
      const auto& indexer = std::get<CharIndexer>(p.featurizer);
      const auto trace = incremental_trace(*net, indexer, name, fingerprint_hex(artifact.corpus_fingerprint));
      render_trace_bars(out, trace);
      const auto csv = render([&](std::ostream& s) { write_trace_csv(s, trace); });
      if (explain_out.empty()) {
        out << csv;
      } else {
        write_file(explain_out, csv);
      }
    };
  });

  // dump-trees
  auto* dump_cmd = app.add_subcommand("dump-trees", "print the trees of a gbt model");
  std::string dump_model, dump_out;
  dump_cmd->add_option("--model", dump_model, "gbt model artifact")->required();
  dump_cmd->add_option("--out", dump_out, "output text path (stdout when omitted)");
  dump_cmd->callback([&] {
    action = [&] {
      const auto artifact = load_artifact(dump_model);
      const auto& model = boosted_of(artifact);
      const auto text = render([&](std::ostream& s) {
        dump_trees(s, model, artifact.pipeline.feature_names());
      });
      if (dump_out.empty()) {
        out << text;
      } else {
        write_file(dump_out, text);
      }
    };
  });

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace namegender
