#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "namegender/adam.hpp"
#include "namegender/features.hpp"

namespace namegender {

/// Parameters of the embedding -> LSTM -> sigmoid classifier.
///
/// Gate blocks inside `kernel`, `recurrent` and `bias` are stacked in the
/// order input, forget, cell candidate, output; each block has `hidden` rows.
struct LstmParams {
  Eigen::MatrixXd embedding;  // embedding_rows x embed_dim; row 0 is the pad index
  Eigen::MatrixXd kernel;     // 4*hidden x embed_dim
  Eigen::MatrixXd recurrent;  // 4*hidden x hidden
  Eigen::VectorXd bias;       // 4*hidden
  Eigen::VectorXd out_weight; // hidden
  Eigen::VectorXd out_bias;   // 1

  static LstmParams zeros(std::size_t embedding_rows, std::size_t embed_dim, std::size_t hidden);

  std::size_t embed_dim() const { return static_cast<std::size_t>(embedding.cols()); }
  std::size_t hidden() const { return static_cast<std::size_t>(recurrent.cols()); }
  std::size_t embedding_rows() const { return static_cast<std::size_t>(embedding.rows()); }

  // Tensors in a fixed order, for the optimizer and serialization.
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;
  static constexpr std::size_t kTensorCount = 6;
  static const std::array<std::string_view, kTensorCount>& tensor_names();

  bool all_finite() const;
  bool same_shape(const LstmParams& other) const;
};

struct LstmNetwork {
  LstmParams params;

  // Embedding uniform in [-0.05, 0.05], Glorot-uniform kernels (the gate
  // kernels treated as one embed_dim x 4*hidden matrix, likewise the
  // recurrent kernels), zero biases except forget-gate bias 1.
  static LstmNetwork initialize(std::size_t embedding_rows, std::size_t embed_dim,
                                std::size_t hidden, std::uint64_t seed);
};

// Activations kept for backpropagation through time.
struct LstmCache {
  std::size_t batch = 0;
  std::size_t steps = 0;
  std::vector<std::int32_t> tokens;      // steps x batch, time-major
  std::vector<Eigen::MatrixXd> gates;    // per step: 4h x batch, post-activation
  std::vector<Eigen::MatrixXd> cell;     // per step: h x batch
  std::vector<Eigen::MatrixXd> hidden;   // per step: h x batch
  Eigen::VectorXd p_male;                // batch
};

// Runs the recurrence over every position, pads included, and returns
// P(male) per sequence. All sequences must share one length.
Eigen::VectorXd forward_batch(const LstmNetwork& net, std::span<const PaddedSequence> batch,
                              LstmCache* cache = nullptr);

struct ForwardResult {
  double p_male = 0.5;
  LstmCache cache;
};
ForwardResult forward(const LstmNetwork& net, const PaddedSequence& seq);

double predict_proba(const LstmNetwork& net, const PaddedSequence& seq);

inline constexpr double kProbabilityClamp = 1e-7;

double bce_loss(double p, int y);

// Gradients of the batch-mean cross-entropy, same layout as the parameters.
LstmParams backward(const LstmNetwork& net, const LstmCache& cache, std::span<const int> y);

// Mean cross-entropy over a set of sequences (forward only).
double mean_loss(const LstmNetwork& net, std::span<const PaddedSequence> seqs,
                 std::span<const int> y);

struct TrainConfig {
  std::size_t batch_size = 32;
  int epochs = 20;
  std::uint64_t seed = 0;
  AdamConfig adam;
};

struct EpochMetrics {
  int epoch = 0;
  double train_accuracy = 0.0;  // running over the epoch's batches, before each update
  double test_accuracy = 0.0;   // NaN without held-out data
  double train_loss = 0.0;
};

struct HeldOut {
  std::span<const PaddedSequence> seqs;
  std::span<const int> y;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

// Seeded shuffle every epoch, mini-batches of batch_size with the final short
// batch kept, one Adam step per batch.
std::vector<EpochMetrics> train(LstmNetwork& net, std::span<const PaddedSequence> seqs,
                                std::span<const int> y, const TrainConfig& config,
                                std::optional<HeldOut> held_out = std::nullopt,
                                const EpochCallback& on_epoch = {});

}  // namespace namegender
