// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "namegender/adam.hpp"
#include "namegender/boosted_trees.hpp"
#include "namegender/char_lstm.hpp"
#include "namegender/commands.hpp"
#include "namegender/corpus.hpp"
#include "namegender/explain.hpp"
#include "namegender/features.hpp"
#include "namegender/metrics.hpp"
#include "namegender/naive_bayes.hpp"
#include "namegender/pipeline.hpp"
#include "namegender/rng.hpp"

namespace fs = std::filesystem;
using namespace namegender;

namespace {

// Tolerances and limits.
constexpr double kGradDelta = 1e-5;
constexpr double kGradMaxRelError = 1e-4;
constexpr double kGradRelFloor = 1e-6;  // denominator floor for near-zero gradients
constexpr double kGradSeconds = 10.0;
constexpr double kChi2RelTol = 1e-12;
constexpr double kChi2Seconds = 1.0;
constexpr double kNbTol = 1e-12;
constexpr double kNbSeconds = 1.0;
constexpr double kStumpSeconds = 5.0;
constexpr double kStumpTieRel = 1e-12;
constexpr double kAdamTol = 1e-12;
constexpr double kIdentityTol = 1e-12;
constexpr double kEndToEndMinAccuracy = 0.95;
constexpr double kEndToEndSeconds = 600.0;
constexpr double kMemorizeMinAccuracy = 0.99;
constexpr double kMemorizeSeconds = 60.0;
constexpr std::size_t kMemorizeDim = 32;
constexpr int kMemorizeEpochs = 20;
constexpr int kMemorizeDiagnosticEpochs = 150;

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << (pass ? "PASS " : "FAIL ") << name << " :: " << detail << std::endl;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// ---------------------------------------------------------------------------

double fixture_loss(const LstmNetwork& net, const std::vector<PaddedSequence>& seqs,
                    const std::vector<int>& y) {
  const auto p = forward_batch(net, seqs);
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double q = std::clamp(p[static_cast<Eigen::Index>(i)], kProbabilityClamp, 1.0 - kProbabilityClamp);
    total += y[i] == 1 ? -std::log(q) : -std::log(1.0 - q);
  }
  return total / static_cast<double>(y.size());
}

void gradient_oracle() {
  Stopwatch sw;
  constexpr std::size_t rows = 7, d = 5, h = 4;
  LstmNetwork net;
  net.params = LstmParams::zeros(rows, d, h);
  Rng rng(20240611);
  for (auto t : net.params.tensors()) {
    for (double& v : t) v = rng.uniform(-0.6, 0.6);
  }
  const std::vector<std::vector<std::int32_t>> tokens = {
      {0, 0, 1, 2, 3, 4}, {5, 6, 1, 1, 2, 6}, {0, 0, 0, 0, 3, 5}, {2, 4, 6, 5, 3, 1}};
  std::vector<PaddedSequence> seqs;
  for (const auto& t : tokens) {
    const auto real = static_cast<std::size_t>(std::count_if(t.begin(), t.end(), [](int v) { return v != 0; }));
    seqs.push_back({t, real});
  }
  const std::vector<int> y = {1, 0, 0, 1};

  LstmCache cache;
  forward_batch(net, seqs, &cache);
  const LstmParams grads = backward(net, cache, y);

  double worst = 0.0;
  std::string worst_at = "-";
  std::size_t checked = 0;
  auto params = net.params.tensors();
  const auto analytic = grads.tensors();
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (std::size_t k = 0; k < params[t].size(); ++k) {
      const double saved = params[t][k];
      params[t][k] = saved + kGradDelta;
      const double up = fixture_loss(net, seqs, y);
      params[t][k] = saved - kGradDelta;
      const double down = fixture_loss(net, seqs, y);
      params[t][k] = saved;
      const double numeric = (up - down) / (2.0 * kGradDelta);
      const double a = analytic[t][k];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), kGradRelFloor});
      ++checked;
      if (rel > worst) {
        worst = rel;
        worst_at = fmt::format("{}[{}]", LstmParams::tensor_names()[t], k);
      }
    }
  }
  const double secs = sw.seconds();
  report("gradient_oracle", worst < kGradMaxRelError && secs < kGradSeconds,
         fmt::format("{} parameters, max relative error {:.3e} at {} (limit {:.0e}), {:.2f}s (limit {}s)",
                     checked, worst, worst_at, kGradMaxRelError, secs, kGradSeconds));
}

// ---------------------------------------------------------------------------

double chi2_oracle(const std::vector<std::vector<double>>& x, const std::vector<int>& y, std::size_t col) {
  double observed[2] = {0.0, 0.0};
  std::size_t class_count[2] = {0, 0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    observed[y[i]] += x[i][col];
    ++class_count[y[i]];
  }
  const double total = observed[0] + observed[1];
  double stat = 0.0;
  for (int c = 0; c < 2; ++c) {
    const double expected = total * static_cast<double>(class_count[c]) / static_cast<double>(x.size());
    if (expected > 0.0) stat += (observed[c] - expected) * (observed[c] - expected) / expected;
  }
  return stat;
}

void chi2_check() {
  Stopwatch sw;
  Rng rng(99);
  double worst = 0.0;
  int fixtures = 0;
  for (; fixtures < 50; ++fixtures) {
    const std::size_t n = 2 + rng.below(7);
    const std::size_t f = 1 + rng.below(6);
    std::vector<std::vector<double>> dense(n, std::vector<double>(f));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng.below(2));
      for (auto& v : dense[i]) v = rng.bernoulli(0.4) ? 0.0 : static_cast<double>(rng.below(5));
    }
    y[0] = 0;
    y[1] = 1;
    const auto scores = chi2_scores(FeatureMatrix::from_dense(dense), y);
    for (std::size_t j = 0; j < f; ++j) {
      const double want = chi2_oracle(dense, y, j);
      const double err = want == 0.0 ? std::abs(scores[j]) : std::abs(scores[j] - want) / std::abs(want);
      worst = std::max(worst, err);
    }
  }
  const double secs = sw.seconds();
  report("chi2_oracle", worst <= kChi2RelTol && secs < kChi2Seconds,
         fmt::format("{} fixtures, max relative error {:.3e} (limit {:.0e}), {:.3f}s", fixtures, worst,
                     kChi2RelTol, secs));
}

// ---------------------------------------------------------------------------

void nb_check() {
  Stopwatch sw;
  Rng rng(5);
  double worst = 0.0;
  int fixtures = 0;
  for (; fixtures < 50; ++fixtures) {
    const std::size_t n = 3 + rng.below(8);
    const std::size_t f = 1 + rng.below(5);
    std::vector<std::vector<double>> dense(n, std::vector<double>(f));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = i < 2 ? static_cast<int>(i) : static_cast<int>(rng.below(2));
      for (auto& v : dense[i]) v = static_cast<double>(rng.below(4));
    }
    const double alpha = 1.0;
    const auto x = FeatureMatrix::from_dense(dense);
    const auto model = nb_fit(x, y, alpha);

    // Direct enumeration in probability space.
    double prior[2] = {0, 0};
    std::vector<double> counts[2] = {std::vector<double>(f, 0.0), std::vector<double>(f, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
      prior[y[i]] += 1.0;
      for (std::size_t j = 0; j < f; ++j) counts[y[i]][j] += dense[i][j];
    }
    for (int probe = 0; probe < 5; ++probe) {
      std::vector<double> q(f);
      for (auto& v : q) v = static_cast<double>(rng.below(4));
      double joint[2];
      for (int c = 0; c < 2; ++c) {
        double total = 0.0;
        for (double v : counts[c]) total += v;
        double p = prior[c] / static_cast<double>(n);
        for (std::size_t j = 0; j < f; ++j) {
          const double theta = (counts[c][j] + alpha) / (total + alpha * static_cast<double>(f));
          p *= std::pow(theta, q[j]);
        }
        joint[c] = p;
      }
      const double want = joint[1] / (joint[0] + joint[1]);
      const auto qx = FeatureMatrix::from_dense({q});
      worst = std::max(worst, std::abs(nb_predict_proba(model, qx.row(0)) - want));
    }
  }
  const double secs = sw.seconds();
  report("naive_bayes_oracle", worst <= kNbTol && secs < kNbSeconds,
         fmt::format("{} fixtures x 5 probes, max abs posterior error {:.3e} (limit {:.0e}), {:.3f}s",
                     fixtures, worst, kNbTol, secs));
}

// ---------------------------------------------------------------------------

struct StumpChoice {
  bool split = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

StumpChoice stump_oracle(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                         const BoostParams& p) {
  const std::size_t n = y.size();
  double male = 0.0;
  for (int v : y) male += v;
  const double base = p.prior_base_score ? std::log(male / (static_cast<double>(n) - male)) : 0.0;
  const double prob = 1.0 / (1.0 + std::exp(-base));
  std::vector<double> g(n), h(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = prob - y[i];
    h[i] = prob * (1.0 - prob);
  }
  StumpChoice best;
  best.gain = 0.0;
  for (std::size_t f = 0; f < x[0].size(); ++f) {
    std::set<double> values;
    for (const auto& row : x) values.insert(row[f]);
    std::vector<double> sorted(values.begin(), values.end());
    for (std::size_t k = 1; k < sorted.size(); ++k) {
      const double threshold = sorted[k - 1] + 0.5 * (sorted[k] - sorted[k - 1]);
      double gl = 0, hl = 0, gr = 0, hr = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (x[i][f] < threshold) {
          gl += g[i];
          hl += h[i];
        } else {
          gr += g[i];
          hr += h[i];
        }
      }
      if (hl < p.min_child_weight || hr < p.min_child_weight) continue;
      const double gain = 0.5 * (gl * gl / (hl + p.lambda) + gr * gr / (hr + p.lambda) -
                                 (gl + gr) * (gl + gr) / (hl + hr + p.lambda)) -
                          p.gamma;
      if (gain <= 0.0) continue;
      const bool better = !best.split || gain > best.gain + kStumpTieRel * std::abs(best.gain);
      if (better) best = {true, static_cast<int>(f), threshold, gain};
    }
  }
  return best;
}

void stump_check() {
  Stopwatch sw;
  Rng rng(314);
  int agree = 0;
  int fixtures = 0;
  int splits_seen = 0;
  std::string first_mismatch;
  BoostParams p;
  p.rounds = 1;
  p.max_depth = 1;
  p.min_child_weight = 0.5;
  for (; fixtures < 50; ++fixtures) {
    const std::size_t n = 20;
    const std::size_t f = 1 + rng.below(5);
    std::vector<std::vector<double>> dense(n, std::vector<double>(f));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = i < 2 ? static_cast<int>(i) : static_cast<int>(rng.below(2));
      for (auto& v : dense[i]) v = static_cast<double>(static_cast<int>(rng.below(7)) - 2);
    }
    const auto model = gbt_fit(FeatureMatrix::from_dense(dense), y, p);
    const auto want = stump_oracle(dense, y, p);
    const auto& root = model.trees.at(0).nodes.at(0);
    const bool got_split = !root.is_leaf();
    bool same = got_split == want.split;
    if (same && got_split) {
      same = root.feature == want.feature && root.threshold == want.threshold &&
             std::abs(root.gain - want.gain) <= 1e-9 * std::max(1.0, std::abs(want.gain));
      ++splits_seen;
    }
    if (same) {
      ++agree;
    } else if (first_mismatch.empty()) {
      first_mismatch = fmt::format(" first mismatch fixture {}: got f{}<{} want f{}<{}", fixtures,
                                   root.feature, root.threshold, want.feature, want.threshold);
    }
  }

  // gamma = 1000 on the same kind of data: no split may survive.
  BoostParams strict = p;
  strict.gamma = 1000.0;
  strict.rounds = 5;
  strict.max_depth = 3;
  std::size_t gamma_splits = 0;
  for (int k = 0; k < 10; ++k) {
    std::vector<std::vector<double>> dense(20, std::vector<double>(3));
    std::vector<int> y(20);
    for (std::size_t i = 0; i < 20; ++i) {
      y[i] = i < 2 ? static_cast<int>(i) : static_cast<int>(rng.below(2));
      for (auto& v : dense[i]) v = static_cast<double>(rng.below(5));
    }
    gamma_splits += count_splits(gbt_fit(FeatureMatrix::from_dense(dense), y, strict));
  }
  const double secs = sw.seconds();
  report("gbt_stump_oracle",
         agree == fixtures && splits_seen > 0 && gamma_splits == 0 && secs < kStumpSeconds,
         fmt::format("{}/{} stumps match exhaustive enumeration ({} with a split), gamma=1000 splits {}, "
                     "{:.3f}s{}",
                     agree, fixtures, splits_seen, gamma_splits, secs, first_mismatch));
}

// ---------------------------------------------------------------------------

void adam_check() {
  AdamConfig cfg;
  cfg.learning_rate = 0.01;
  AdamState state{cfg, {}, {}, 0};
  std::vector<double> theta = {0.5};
  const double grads[3] = {0.2, -0.1, 0.4};

  double want = 0.5, m = 0.0, v = 0.0;
  double worst = 0.0;
  for (int t = 1; t <= 3; ++t) {
    std::vector<double> g = {grads[t - 1]};
    std::vector<std::span<double>> ps = {theta};
    std::vector<std::span<const double>> gs = {g};
    adam_step(ps, gs, state);

    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grads[t - 1];
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grads[t - 1] * grads[t - 1];
    const double mhat = m / (1.0 - std::pow(cfg.beta1, t));
    const double vhat = v / (1.0 - std::pow(cfg.beta2, t));
    want -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
    worst = std::max(worst, std::abs(theta[0] - want));
  }
  report("adam_trajectory", worst <= kAdamTol,
         fmt::format("3 steps, max deviation from hand recurrence {:.3e} (limit {:.0e})", worst, kAdamTol));
}

// ---------------------------------------------------------------------------

void metric_identities() {
  Rng rng(1000);
  int ok = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const std::size_t tp = rng.below(50), fp = rng.below(50), tn = rng.below(50), fn = rng.below(50);
    const auto r = report_from_counts(tp, fp, tn, fn);
    const double total = static_cast<double>(tp + fp + tn + fn);
    bool good = r.total() == tp + fp + tn + fn;
    if (total > 0) good &= std::abs(r.accuracy - static_cast<double>(tp + tn) / total) <= kIdentityTol;
    if (r.precision + r.recall > 0) {
      good &= std::abs(r.f1 - 2 * r.precision * r.recall / (r.precision + r.recall)) <= kIdentityTol;
    } else {
      good &= r.f1 == 0.0;
    }
    if (tp + fp > 0) good &= std::abs(r.precision - static_cast<double>(tp) / static_cast<double>(tp + fp)) <= kIdentityTol;
    if (tp + fn > 0) good &= std::abs(r.recall - static_cast<double>(tp) / static_cast<double>(tp + fn)) <= kIdentityTol;
    for (double v : {r.accuracy, r.precision, r.recall, r.f1}) good &= v >= 0.0 && v <= 1.0;
    ok += good;
  }
  report("f1_accuracy_identities", ok == trials, fmt::format("{}/{} confusion matrices", ok, trials));
}

// ---------------------------------------------------------------------------

struct EndToEnd {
  bool ran = false;
  ExperimentResult lstm;
  std::set<std::string> names;
};

EndToEnd end_to_end() {
  Stopwatch sw;
  EndToEnd e2e;
  const auto corpus = generate_synthetic(4000, kDefaultMaleFraction, 42);
  for (const auto& r : corpus.records()) e2e.names.insert(r.normalized);
  RunConfig config;
  config.seed = 42;
  config.test_fraction = 0.2;
  config.embed = 64;
  config.hidden = 64;
  config.epochs = 20;
  config.batch = 32;
  const auto nb = run_experiment(corpus, NameView::FullName, {Method::NaiveBayes, {FeatureKind::Basic, 0}}, config);
  e2e.lstm = run_experiment(corpus, NameView::FullName, {Method::Lstm, {FeatureKind::Chars, 0}}, config);
  e2e.ran = true;
  const double acc = e2e.lstm.report.accuracy;
  const double secs = sw.seconds();
  report("end_to_end_benchmark",
         acc >= kEndToEndMinAccuracy && acc > nb.report.accuracy && secs < kEndToEndSeconds,
         fmt::format("char-lstm test accuracy {:.4f} (min {}), basic nb {:.4f}, test size {}, {:.1f}s (limit {}s)",
                     acc, kEndToEndMinAccuracy, nb.report.accuracy, e2e.lstm.test_size, secs,
                     kEndToEndSeconds));
  return e2e;
}

void suffix_traces(const EndToEnd& e2e) {
  const auto& p = e2e.lstm.pipeline;
  const auto& net = std::get<LstmNetwork>(p.model);
  const auto& indexer = std::get<CharIndexer>(p.featurizer);
  const auto fresh = generate_synthetic(4000, kDefaultMaleFraction, 20241017);
  std::vector<std::string> putra, putri;
  for (const auto& r : fresh.records()) {
    const auto& n = r.normalized;
    if (e2e.names.count(n) || n.size() > indexer.max_len()) continue;
    if (n.ends_with(" putra") && putra.size() < 10) putra.push_back(n);
    if (n.ends_with(" putri") && putri.size() < 10) putri.push_back(n);
  }
  int ok = 0;
  std::string bad;
  for (const auto& n : putra) {
    const double p_male = incremental_trace(net, indexer, n).rows.back().p_male;
    if (p_male > 0.5) ++ok; else bad += fmt::format(" {}={:.3f}", n, p_male);
  }
  for (const auto& n : putri) {
    const double p_male = incremental_trace(net, indexer, n).rows.back().p_male;
    if (p_male < 0.5) ++ok; else bad += fmt::format(" {}={:.3f}", n, p_male);
  }
  const std::size_t total = putra.size() + putri.size();
  report("putra_putri_traces", total == 20 && ok == 20,
         fmt::format("{}/{} held-out names on the right side of 0.5{}", ok, total,
                     bad.empty() ? "" : " failing:" + bad));
}

void memorization() {
  const auto corpus = generate_synthetic(200, kDefaultMaleFraction, 7);
  const auto names = corpus.names();
  const auto y = corpus.labels();
  const auto indexer = CharIndexer::fit(names);
  std::vector<PaddedSequence> seqs;
  for (const auto& n : names) seqs.push_back(indexer.index_and_pad(n));
  auto net = LstmNetwork::initialize(indexer.embedding_rows(), kMemorizeDim, kMemorizeDim, derive_seed(7, "lstm"));
  const auto training_accuracy = [&] {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < seqs.size(); ++i) correct += (predict_proba(net, seqs[i]) >= 0.5) == (y[i] == 1);
    return static_cast<double>(correct) / static_cast<double>(seqs.size());
  };

  // Epochs past the limit only locate where the threshold would be met; the
  // verdict uses the state after kMemorizeEpochs.
  TrainConfig tc;
  tc.epochs = kMemorizeDiagnosticEpochs;
  tc.batch_size = 32;
  tc.seed = derive_seed(7, "lstm-train");
  Stopwatch sw;
  double acc = 0.0, secs = 0.0;
  int reached = -1;
  train(net, seqs, y, tc, std::nullopt, [&](const EpochMetrics& m) {
    const double a = training_accuracy();
    if (m.epoch == kMemorizeEpochs) {
      acc = a;
      secs = sw.seconds();
    }
    if (reached < 0 && a >= kMemorizeMinAccuracy) reached = m.epoch;
  });
  report("memorization", acc >= kMemorizeMinAccuracy && secs < kMemorizeSeconds,
         fmt::format("d=h={}, batch 32: training-set accuracy {:.4f} after {} epochs (min {}), {:.1f}s (limit {}s); "
                     "continued training first reaches {} at epoch {}",
                     kMemorizeDim, acc, kMemorizeEpochs, kMemorizeMinAccuracy, secs, kMemorizeSeconds,
                     kMemorizeMinAccuracy, reached < 0 ? fmt::format(">{}", kMemorizeDiagnosticEpochs)
                                                       : std::to_string(reached)));
}

// ---------------------------------------------------------------------------
// Command-line checks. Every command writes into its own directory; the suite
// runs twice and the two directories must hold identical files.

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t data_rows(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::size_t count = 0;
  while (std::getline(in, line)) count += !line.empty();
  return count == 0 ? 0 : count - 1;
}

struct CliRun {
  std::vector<std::string> failed;
  std::map<std::string, std::string> stdout_of;
};

CliRun run_commands(const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  CliRun run;
  const auto path = [&](const std::string& f) { return (dir / f).string(); };
  const auto cli = [&](const std::string& key, std::vector<std::string> args, bool keep_stdout = false) {
    args.insert(args.begin(), "namegender");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    if (code != 0) run.failed.push_back(fmt::format("{} (exit {}: {})", key, code, err.str()));
    if (keep_stdout) run.stdout_of[key] = out.str();
  };
  cli("gen", {"gen", "--n", "300", "--seed", "11", "--out", path("data.csv")});
  const auto data = path("data.csv");
  cli("train-nb", {"train", "--data", data, "--method", "nb", "--features", "ngram:3", "--out",
                   path("nb.json"), "--report", path("nb_report.csv")});
  cli("train-logreg", {"train", "--data", data, "--method", "logreg", "--features", "basic", "--out",
                       path("logreg.json"), "--report", path("logreg_report.csv")});
  cli("train-gbt", {"train", "--data", data, "--method", "gbt", "--features", "basic", "--out",
                    path("gbt.json"), "--report", path("gbt_report.csv")});
  cli("train-lstm", {"train", "--data", data, "--method", "lstm", "--features", "chars", "--embed", "16",
                     "--hidden", "16", "--epochs", "3", "--out", path("lstm.json"), "--report",
                     path("lstm_report.csv"), "--curve", path("lstm_curve.csv")});
  cli("eval", {"eval", "--model", path("gbt.json"), "--data", data, "--report", path("eval.csv"),
               "--predictions", path("eval_predictions.csv")});
  cli("predict", {"predict", "--model", path("lstm.json"), "--name", "Budi Putra", "--name", "Siti Putri"},
      true);
  cli("explain", {"explain", "--model", path("lstm.json"), "--name", "budi putra", "--out", path("trace.csv")});
  cli("dump-trees", {"dump-trees", "--model", path("gbt.json"), "--out", path("trees.txt")});
  cli("experiment", {"experiment", "--data", data, "--out", path("table.csv")});
  cli("grid-logreg", {"gridsearch", "--data", data, "--method", "logreg", "--features", "basic", "--out",
                      path("grid_logreg.csv")});
  cli("grid-gbt", {"gridsearch", "--data", data, "--method", "gbt", "--features", "basic", "--out",
                   path("grid_gbt.csv")});
  cli("grid-lstm", {"gridsearch", "--data", data, "--method", "lstm", "--variant", "full", "--epochs", "1",
                    "--out", path("grid_lstm.csv")});
  return run;
}

void cli_checks() {
  const fs::path root = fs::current_path() / "acceptance_out";
  Stopwatch sw;
  const auto first = run_commands(root / "run1");
  const double first_secs = sw.seconds();

  const std::size_t logreg = data_rows(root / "run1" / "grid_logreg.csv");
  const std::size_t gbt = data_rows(root / "run1" / "grid_gbt.csv");
  const std::size_t lstm = data_rows(root / "run1" / "grid_lstm.csv");
  report("grid_shapes", first.failed.empty() && logreg == 10 && gbt == 200 && lstm == 9,
         fmt::format("logreg {} (want 10), gbt {} (want 200), lstm full-name sweep {} (want 9){}", logreg,
                     gbt, lstm, first.failed.empty() ? "" : "; failed: " + first.failed.front()));

  const auto second = run_commands(root / "run2");
  std::size_t files = 0;
  std::vector<std::string> differing;
  for (const auto& entry : fs::directory_iterator(root / "run1")) {
    const auto name = entry.path().filename();
    ++files;
    if (!fs::exists(root / "run2" / name) || slurp(entry.path()) != slurp(root / "run2" / name)) {
      differing.push_back(name.string());
    }
  }
  if (first.stdout_of != second.stdout_of) differing.push_back("predict stdout");
  report("reproducibility",
         first.failed.empty() && second.failed.empty() && differing.empty() && files >= 17,
         fmt::format("{} output files compared across two runs, {} differ{}; one run {:.1f}s", files,
                     differing.size(), differing.empty() ? "" : " (" + differing.front() + ")",
                     first_secs));
}

}  // namespace

int main() {
  gradient_oracle();
  chi2_check();
  nb_check();
  stump_check();
  adam_check();
  metric_identities();
  memorization();
  const auto e2e = end_to_end();
  suffix_traces(e2e);
  cli_checks();
  std::cout << (failures == 0 ? "ALL PASS" : fmt::format("{} FAILED", failures)) << std::endl;
  return failures == 0 ? 0 : 1;
}
