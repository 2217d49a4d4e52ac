#include <cmath>

#include "helpers.hpp"
#include "namegender/adam.hpp"
#include "namegender/char_lstm.hpp"
#include "namegender/corpus.hpp"
#include "namegender/rng.hpp"

using namespace namegender;

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

LstmNetwork random_network(std::size_t rows, std::size_t d, std::size_t h, std::uint64_t seed,
                           double scale = 0.5) {
  LstmNetwork net{LstmParams::zeros(rows, d, h)};
  Rng rng(seed);
  for (auto t : net.params.tensors()) {
    for (auto& v : t) v = rng.uniform(-scale, scale);
  }
  return net;
}

// Plain nested loops, one sequence at a time.
double scalar_forward(const LstmParams& p, const std::vector<std::int32_t>& seq) {
  const std::size_t d = p.embed_dim(), h = p.hidden();
  std::vector<double> hs(h, 0.0), cs(h, 0.0);
  for (auto token : seq) {
    std::vector<double> z(4 * h);
    for (std::size_t r = 0; r < 4 * h; ++r) {
      double s = p.bias(r);
      for (std::size_t k = 0; k < d; ++k) s += p.kernel(r, k) * p.embedding(token, k);
      for (std::size_t k = 0; k < h; ++k) s += p.recurrent(r, k) * hs[k];
      z[r] = s;
    }
    for (std::size_t j = 0; j < h; ++j) {
      const double i = sigmoid(z[j]);
      const double f = sigmoid(z[h + j]);
      const double g = std::tanh(z[2 * h + j]);
      const double o = sigmoid(z[3 * h + j]);
      cs[j] = f * cs[j] + i * g;
      hs[j] = o * std::tanh(cs[j]);
    }
  }
  double logit = p.out_bias(0);
  for (std::size_t j = 0; j < h; ++j) logit += p.out_weight(j) * hs[j];
  return sigmoid(logit);
}

PaddedSequence seq_of(std::vector<std::int32_t> indices) {
  std::size_t len = 0;
  for (auto v : indices) len += v != 0;
  return {std::move(indices), len};
}

}  // namespace

TEST_CASE("forward matches a scalar-loop oracle") {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const auto net = random_network(6, 3, 4, 100 + t);
    std::vector<std::int32_t> idx(7);
    for (auto& v : idx) v = static_cast<std::int32_t>(rng.below(6));
    const auto seq = seq_of(idx);
    CHECK(std::abs(predict_proba(net, seq) - scalar_forward(net.params, idx)) <= 1e-12);
  }
}

TEST_CASE("batched forward equals per-sequence forward") {
  const auto net = random_network(5, 4, 3, 2);
  const std::vector<PaddedSequence> batch = {seq_of({0, 0, 1, 2}), seq_of({3, 4, 1, 2}), seq_of({0, 0, 0, 4})};
  const auto p = forward_batch(net, batch);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    CHECK(std::abs(p(static_cast<Eigen::Index>(b)) - predict_proba(net, batch[b])) <= 1e-14);
  }
}

TEST_CASE("zero network and output bias") {
  auto net = LstmNetwork{LstmParams::zeros(4, 2, 3)};
  CHECK(predict_proba(net, seq_of({0, 1, 2})) == 0.5);
  net.params.out_bias(0) = std::log(3.0);
  CHECK(predict_proba(net, seq_of({0, 1, 2})) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("cross-entropy values and clamping") {
  CHECK(bce_loss(0.5, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(bce_loss(0.25, 0) == doctest::Approx(-std::log(0.75)).epsilon(1e-15));
  CHECK(bce_loss(0.0, 1) == doctest::Approx(-std::log(kProbabilityClamp)).epsilon(1e-12));
  CHECK(std::isfinite(bce_loss(1.0, 0)));
}

TEST_CASE("backward: output-layer gradients on a zero network") {
  const auto net = LstmNetwork{LstmParams::zeros(4, 2, 3)};
  const std::vector<PaddedSequence> batch = {seq_of({1, 2}), seq_of({3, 1})};
  LstmCache cache;
  forward_batch(net, batch, &cache);
  const auto g = backward(net, cache, std::vector<int>{1, 1});
  CHECK(g.out_bias(0) == doctest::Approx(-0.5).epsilon(1e-15));
  // With zero weights the hidden state is exactly zero.
  CHECK(g.out_weight.cwiseAbs().maxCoeff() == 0.0);
  const auto g2 = backward(net, cache, std::vector<int>{1, 0});
  CHECK(g2.out_bias(0) == 0.0);
  CHECK_THROWS_CODE(backward(net, cache, std::vector<int>{1}), ErrorCode::ShapeMismatch);
}

TEST_CASE("backward matches central differences and reaches the pad row") {
  const auto net = random_network(5, 3, 2, 9);
  const std::vector<PaddedSequence> batch = {seq_of({0, 0, 1, 3}), seq_of({0, 2, 4, 1}), seq_of({3, 3, 2, 1})};
  const std::vector<int> y = {1, 0, 1};
  LstmCache cache;
  forward_batch(net, batch, &cache);
  const auto grad = backward(net, cache, y);

  auto probe = net;
  auto params = probe.params.tensors();
  const auto grads = grad.tensors();
  const double delta = 1e-5;
  double worst = 0;
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (std::size_t k = 0; k < params[t].size(); ++k) {
      const double saved = params[t][k];
      params[t][k] = saved + delta;
      const double up = mean_loss(probe, batch, y);
      params[t][k] = saved - delta;
      const double down = mean_loss(probe, batch, y);
      params[t][k] = saved;
      const double numeric = (up - down) / (2 * delta);
      const double a = grads[t][k];
      worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6}));
    }
  }
  CHECK(worst <= 1e-4);
  // Pads run through the recurrence, so embedding row 0 gets gradient.
  CHECK(grad.embedding.row(0).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("initialization") {
  const auto a = LstmNetwork::initialize(30, 8, 6, 5);
  const auto b = LstmNetwork::initialize(30, 8, 6, 5);
  const auto c = LstmNetwork::initialize(30, 8, 6, 6);
  CHECK(a.params.embedding == b.params.embedding);
  CHECK(a.params.kernel == b.params.kernel);
  CHECK(a.params.kernel != c.params.kernel);
  CHECK(a.params.embedding.cwiseAbs().maxCoeff() <= 0.05);
  CHECK(a.params.kernel.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / (8 + 24)));
  CHECK(a.params.recurrent.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / (6 + 24)));
  for (int j = 0; j < 24; ++j) CHECK(a.params.bias(j) == (j >= 6 && j < 12 ? 1.0 : 0.0));
  CHECK(a.params.out_bias(0) == 0.0);
  CHECK(a.params.all_finite());
  CHECK_THROWS_CODE(LstmNetwork::initialize(1, 8, 6, 5), ErrorCode::InvalidArgument);
  CHECK_THROWS_CODE(LstmNetwork::initialize(30, 0, 6, 5), ErrorCode::InvalidArgument);
}

TEST_CASE("forward errors") {
  const auto net = random_network(4, 2, 2, 1);
  const std::vector<PaddedSequence> ragged = {seq_of({1, 2}), seq_of({1, 2, 3})};
  CHECK_THROWS_CODE(forward_batch(net, ragged), ErrorCode::ShapeMismatch);
  CHECK_THROWS_CODE(predict_proba(net, seq_of({1, 4})), ErrorCode::IndexOutOfVocabulary);
  CHECK_THROWS_CODE(predict_proba(net, seq_of({-1, 1})), ErrorCode::IndexOutOfVocabulary);
}

TEST_CASE("adam first step and moments") {
  std::vector<double> w = {1.0, -2.0, 0.5};
  const std::vector<double> g = {0.2, -0.1, 0.0};
  AdamState state;
  const std::vector<std::span<double>> params = {w};
  const std::vector<std::span<const double>> grads = {g};
  adam_step(params, grads, state);
  CHECK(state.t == 1);
  // The first bias-corrected step is lr * g / (|g| + eps).
  CHECK(w[0] == doctest::Approx(1.0 - 0.001 * 0.2 / (0.2 + 1e-8)).epsilon(1e-14));
  CHECK(w[1] == doctest::Approx(-2.0 + 0.001 * 0.1 / (0.1 + 1e-8)).epsilon(1e-14));
  CHECK(w[2] == 0.5);
  CHECK(state.m[0][0] == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(state.v[0][0] == doctest::Approx(0.001 * 0.04).epsilon(1e-15));

  std::vector<double> other = {1.0};
  const std::vector<std::span<double>> wrong = {other};
  CHECK_THROWS_CODE(adam_step(wrong, grads, state), ErrorCode::ShapeMismatch);
}

TEST_CASE("training: determinism, metrics and loss decrease") {
  const auto corpus = generate_synthetic(120, 0.5, 3);
  const auto names = corpus.names();
  const auto indexer = CharIndexer::fit(names);
  std::vector<PaddedSequence> seqs;
  std::vector<int> y;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    seqs.push_back(indexer.index_and_pad(names[i]));
    y.push_back(corpus[i].gender == Gender::Male ? 1 : 0);
  }
  TrainConfig cfg;
  cfg.epochs = 6;
  cfg.batch_size = 16;
  cfg.seed = 4;
  cfg.adam.learning_rate = 0.01;

  auto a = LstmNetwork::initialize(indexer.embedding_rows(), 8, 8, 1);
  auto b = a;
  const double before = mean_loss(a, seqs, y);
  std::vector<int> seen;
  const auto ma = train(a, seqs, y, cfg, std::nullopt, [&](const EpochMetrics& m) { seen.push_back(m.epoch); });
  const auto mb = train(b, seqs, y, cfg);
  REQUIRE(ma.size() == 6);
  CHECK(seen == std::vector<int>{1, 2, 3, 4, 5, 6});
  CHECK(a.params.kernel == b.params.kernel);
  CHECK(a.params.embedding == b.params.embedding);
  for (std::size_t e = 0; e < ma.size(); ++e) {
    CHECK(ma[e].train_loss == mb[e].train_loss);
    CHECK(std::isnan(ma[e].test_accuracy));
    CHECK(ma[e].train_accuracy >= 0.0);
    CHECK(ma[e].train_accuracy <= 1.0);
  }
  CHECK(mean_loss(a, seqs, y) < before);

  auto c = LstmNetwork::initialize(indexer.embedding_rows(), 8, 8, 1);
  const HeldOut held{std::span<const PaddedSequence>(seqs).first(20), std::span<const int>(y).first(20)};
  const auto mc = train(c, seqs, y, cfg, held);
  for (const auto& m : mc) {
    CHECK(m.test_accuracy >= 0.0);
    CHECK(m.test_accuracy <= 1.0);
  }

  auto untouched = LstmNetwork::initialize(indexer.embedding_rows(), 8, 8, 1);
  auto zero_cfg = cfg;
  zero_cfg.epochs = 0;
  CHECK(train(untouched, seqs, y, zero_cfg).empty());
  CHECK(untouched.params.kernel == LstmNetwork::initialize(indexer.embedding_rows(), 8, 8, 1).params.kernel);
}

TEST_CASE("training errors") {
  auto net = random_network(4, 2, 2, 1);
  const std::vector<PaddedSequence> seqs = {seq_of({1, 2}), seq_of({2, 3})};
  TrainConfig cfg;
  CHECK_THROWS_CODE(train(net, seqs, std::vector<int>{1}, cfg), ErrorCode::LengthMismatch);
  CHECK_THROWS_CODE(train(net, std::vector<PaddedSequence>{}, std::vector<int>{}, cfg), ErrorCode::EmptyInput);
  cfg.batch_size = 0;
  CHECK_THROWS_CODE(train(net, seqs, std::vector<int>{1, 0}, cfg), ErrorCode::InvalidArgument);
}
