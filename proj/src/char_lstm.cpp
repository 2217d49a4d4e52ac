#include "namegender/char_lstm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "namegender/error.hpp"
#include "namegender/rng.hpp"

namespace namegender {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void fill_uniform(MatrixXd& m, double limit, Rng& rng) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-limit, limit);
  }
}

std::span<double> span_of(MatrixXd& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<double> span_of(VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<const double> span_of(const MatrixXd& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
std::span<const double> span_of(const VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

LstmParams LstmParams::zeros(std::size_t embedding_rows, std::size_t embed_dim, std::size_t hidden) {
  const auto rows = static_cast<Index>(embedding_rows);
  const auto d = static_cast<Index>(embed_dim);
  const auto h = static_cast<Index>(hidden);
  LstmParams p;
  p.embedding = MatrixXd::Zero(rows, d);
  p.kernel = MatrixXd::Zero(4 * h, d);
  p.recurrent = MatrixXd::Zero(4 * h, h);
  p.bias = VectorXd::Zero(4 * h);
  p.out_weight = VectorXd::Zero(h);
  p.out_bias = VectorXd::Zero(1);
  return p;
}

std::vector<std::span<double>> LstmParams::tensors() {
  return {span_of(embedding), span_of(kernel),     span_of(recurrent),
          span_of(bias),      span_of(out_weight), span_of(out_bias)};
}

std::vector<std::span<const double>> LstmParams::tensors() const {
  return {span_of(embedding), span_of(kernel),     span_of(recurrent),
          span_of(bias),      span_of(out_weight), span_of(out_bias)};
}

const std::array<std::string_view, LstmParams::kTensorCount>& LstmParams::tensor_names() {
  static constexpr std::array<std::string_view, kTensorCount> kNames = {
      "embedding", "kernel", "recurrent", "bias", "out_weight", "out_bias"};
  return kNames;
}

bool LstmParams::all_finite() const {
  for (const auto t : tensors()) {
    if (!std::all_of(t.begin(), t.end(), [](double v) { return std::isfinite(v); })) return false;
  }
  return true;
}

bool LstmParams::same_shape(const LstmParams& o) const {
  auto same = [](const auto& a, const auto& b) { return a.rows() == b.rows() && a.cols() == b.cols(); };
  return same(embedding, o.embedding) && same(kernel, o.kernel) && same(recurrent, o.recurrent) &&
         same(bias, o.bias) && same(out_weight, o.out_weight) && same(out_bias, o.out_bias);
}

LstmNetwork LstmNetwork::initialize(std::size_t embedding_rows, std::size_t embed_dim,
                                    std::size_t hidden, std::uint64_t seed) {
  if (embedding_rows < 2 || embed_dim == 0 || hidden == 0) {
    throw Error(ErrorCode::InvalidArgument, "network dimensions must be positive");
  }
  LstmNetwork net{LstmParams::zeros(embedding_rows, embed_dim, hidden)};
  auto& p = net.params;
  Rng rng(derive_seed(seed, "lstm-init"));
  const auto d = static_cast<double>(embed_dim);
  const auto h = static_cast<double>(hidden);
  fill_uniform(p.embedding, 0.05, rng);
  fill_uniform(p.kernel, std::sqrt(6.0 / (d + 4.0 * h)), rng);
  fill_uniform(p.recurrent, std::sqrt(6.0 / (h + 4.0 * h)), rng);
  p.bias.segment(static_cast<Index>(hidden), static_cast<Index>(hidden)).setOnes();
  for (Index j = 0; j < p.out_weight.size(); ++j) {
    p.out_weight(j) = rng.uniform(-std::sqrt(6.0 / (h + 1.0)), std::sqrt(6.0 / (h + 1.0)));
  }
  return net;
}

Eigen::VectorXd forward_batch(const LstmNetwork& net, std::span<const PaddedSequence> batch,
                              LstmCache* cache) {
  const auto& p = net.params;
  if (batch.empty()) return VectorXd(0);
  const auto h = static_cast<Index>(p.hidden());
  const auto d = static_cast<Index>(p.embed_dim());
  const auto b_count = static_cast<Index>(batch.size());
  const std::size_t steps = batch.front().indices.size();
  const auto rows = static_cast<std::int32_t>(p.embedding_rows());
  for (const auto& s : batch) {
    if (s.indices.size() != steps) {
      throw Error(ErrorCode::ShapeMismatch, "sequences in a batch must share one length");
    }
    for (auto idx : s.indices) {
      if (idx < 0 || idx >= rows) {
        throw Error(ErrorCode::IndexOutOfVocabulary,
                    fmt::format("index {} outside embedding table of {} rows", idx, rows));
      }
    }
  }

  if (cache != nullptr) {
    cache->batch = batch.size();
    cache->steps = steps;
    cache->tokens.resize(steps * batch.size());
    cache->gates.assign(steps, MatrixXd());
    cache->cell.assign(steps, MatrixXd());
    cache->hidden.assign(steps, MatrixXd());
  }

  MatrixXd hidden = MatrixXd::Zero(h, b_count);
  MatrixXd cell = MatrixXd::Zero(h, b_count);
  MatrixXd x(d, b_count);
  MatrixXd z(4 * h, b_count);
  for (std::size_t t = 0; t < steps; ++t) {
    for (Index b = 0; b < b_count; ++b) {
      const auto token = batch[static_cast<std::size_t>(b)].indices[t];
      x.col(b) = p.embedding.row(token).transpose();
      if (cache != nullptr) cache->tokens[t * batch.size() + static_cast<std::size_t>(b)] = token;
    }
    z.noalias() = p.kernel * x;
    z.noalias() += p.recurrent * hidden;
    z.colwise() += p.bias;
    z.topRows(2 * h) = z.topRows(2 * h).unaryExpr(&sigmoid);
    z.middleRows(2 * h, h) = z.middleRows(2 * h, h).array().tanh().matrix();
    z.bottomRows(h) = z.bottomRows(h).unaryExpr(&sigmoid);

    cell = z.middleRows(h, h).cwiseProduct(cell) + z.topRows(h).cwiseProduct(z.middleRows(2 * h, h));
    hidden = z.bottomRows(h).cwiseProduct(cell.array().tanh().matrix());
    if (cache != nullptr) {
      cache->gates[t] = z;
      cache->cell[t] = cell;
      cache->hidden[t] = hidden;
    }
  }

  VectorXd logits = hidden.transpose() * p.out_weight;
  logits.array() += p.out_bias(0);
  VectorXd probs = logits.unaryExpr(&sigmoid);
  if (cache != nullptr) cache->p_male = probs;
  return probs;
}

ForwardResult forward(const LstmNetwork& net, const PaddedSequence& seq) {
  ForwardResult r;
  r.p_male = forward_batch(net, std::span(&seq, 1), &r.cache)(0);
  return r;
}

double predict_proba(const LstmNetwork& net, const PaddedSequence& seq) {
  return forward_batch(net, std::span(&seq, 1), nullptr)(0);
}

double bce_loss(double p, int y) {
  const double q = std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
  return y == 1 ? -std::log(q) : -std::log(1.0 - q);
}

LstmParams backward(const LstmNetwork& net, const LstmCache& cache, std::span<const int> y) {
  const auto& p = net.params;
  if (y.size() != cache.batch) {
    throw Error(ErrorCode::ShapeMismatch, "label count differs from cached batch");
  }
  const auto h = static_cast<Index>(p.hidden());
  const auto d = static_cast<Index>(p.embed_dim());
  const auto b_count = static_cast<Index>(cache.batch);
  const std::size_t steps = cache.steps;
  LstmParams grad = LstmParams::zeros(p.embedding_rows(), p.embed_dim(), p.hidden());
  if (steps == 0 || b_count == 0) return grad;

  // d(mean loss)/d(logit) = (p - y) / batch
  VectorXd d_logit(b_count);
  for (Index b = 0; b < b_count; ++b) {
    d_logit(b) = (cache.p_male(b) - y[static_cast<std::size_t>(b)]) / static_cast<double>(b_count);
  }
  const MatrixXd& last_hidden = cache.hidden[steps - 1];
  grad.out_weight = last_hidden * d_logit;
  grad.out_bias(0) = d_logit.sum();

  MatrixXd d_hidden = p.out_weight * d_logit.transpose();  // h x B
  MatrixXd d_cell = MatrixXd::Zero(h, b_count);
  MatrixXd dz(4 * h, b_count);
  MatrixXd x(d, b_count);
  MatrixXd dx(d, b_count);
  const MatrixXd zeros = MatrixXd::Zero(h, b_count);

  for (std::size_t step = steps; step-- > 0;) {
    const MatrixXd& gates = cache.gates[step];
    const MatrixXd& prev_cell = step > 0 ? cache.cell[step - 1] : zeros;
    const MatrixXd& prev_hidden = step > 0 ? cache.hidden[step - 1] : zeros;
    const auto in = gates.topRows(h).array();
    const auto forget = gates.middleRows(h, h).array();
    const auto cand = gates.middleRows(2 * h, h).array();
    const auto out = gates.bottomRows(h).array();
    const MatrixXd tanh_cell = cache.cell[step].array().tanh().matrix();

    const auto d_out = d_hidden.array() * tanh_cell.array();
    d_cell.array() += d_hidden.array() * out * (1.0 - tanh_cell.array().square());

    dz.topRows(h) = (d_cell.array() * cand * in * (1.0 - in)).matrix();
    dz.middleRows(h, h) = (d_cell.array() * prev_cell.array() * forget * (1.0 - forget)).matrix();
    dz.middleRows(2 * h, h) = (d_cell.array() * in * (1.0 - cand.square())).matrix();
    dz.bottomRows(h) = (d_out * out * (1.0 - out)).matrix();
    d_cell.array() *= forget;

    for (Index b = 0; b < b_count; ++b) {
      x.col(b) = p.embedding.row(cache.tokens[step * cache.batch + static_cast<std::size_t>(b)]).transpose();
    }
    grad.kernel.noalias() += dz * x.transpose();
    grad.recurrent.noalias() += dz * prev_hidden.transpose();
    grad.bias += dz.rowwise().sum();
    dx.noalias() = p.kernel.transpose() * dz;
    for (Index b = 0; b < b_count; ++b) {
      grad.embedding.row(cache.tokens[step * cache.batch + static_cast<std::size_t>(b)]) +=
          dx.col(b).transpose();
    }
    d_hidden.noalias() = p.recurrent.transpose() * dz;
  }
  return grad;
}

double mean_loss(const LstmNetwork& net, std::span<const PaddedSequence> seqs,
                 std::span<const int> y) {
  if (seqs.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "sequence/label counts differ");
  if (seqs.empty()) return 0.0;
  const VectorXd probs = forward_batch(net, seqs);
  double total = 0.0;
  for (std::size_t i = 0; i < seqs.size(); ++i) total += bce_loss(probs(static_cast<Index>(i)), y[i]);
  return total / static_cast<double>(seqs.size());
}

std::vector<EpochMetrics> train(LstmNetwork& net, std::span<const PaddedSequence> seqs,
                                std::span<const int> y, const TrainConfig& config,
                                std::optional<HeldOut> held_out, const EpochCallback& on_epoch) {
  if (seqs.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "sequence/label counts differ");
  if (seqs.empty()) throw Error(ErrorCode::EmptyInput, "no training sequences");
  if (config.batch_size == 0 || config.epochs < 0) {
    throw Error(ErrorCode::InvalidArgument, "batch size must be positive and epochs nonnegative");
  }
  if (held_out && held_out->seqs.size() != held_out->y.size()) {
    throw Error(ErrorCode::LengthMismatch, "held-out sequence/label counts differ");
  }

  Rng rng(derive_seed(config.seed, "shuffle"));
  AdamState state{config.adam, {}, {}, 0};
  std::vector<std::size_t> order(seqs.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<PaddedSequence> batch;
  std::vector<int> batch_y;
  LstmCache cache;
  std::vector<EpochMetrics> history;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      batch_y.clear();
      for (std::size_t k = start; k < end; ++k) {
        batch.push_back(seqs[order[k]]);
        batch_y.push_back(y[order[k]]);
      }
      const VectorXd probs = forward_batch(net, batch, &cache);
      for (std::size_t k = 0; k < batch.size(); ++k) {
        const double pk = probs(static_cast<Index>(k));
        loss_sum += bce_loss(pk, batch_y[k]);
        if ((pk >= 0.5 ? 1 : 0) == batch_y[k]) ++correct;
      }
      const LstmParams grad = backward(net, cache, batch_y);
      const auto grads = grad.tensors();
      const auto params = net.params.tensors();
      adam_step(params, grads, state);
    }
    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = loss_sum / static_cast<double>(seqs.size());
    m.train_accuracy = static_cast<double>(correct) / static_cast<double>(seqs.size());
    m.test_accuracy = std::numeric_limits<double>::quiet_NaN();
    if (held_out && !held_out->seqs.empty()) {
      std::size_t hits = 0;
      for (std::size_t i = 0; i < held_out->seqs.size(); ++i) {
        if ((predict_proba(net, held_out->seqs[i]) >= 0.5 ? 1 : 0) == held_out->y[i]) ++hits;
      }
      m.test_accuracy = static_cast<double>(hits) / static_cast<double>(held_out->seqs.size());
    }
    history.push_back(m);
    if (on_epoch) on_epoch(m);
  }
  return history;
}

}  // namespace namegender
