#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace namegender {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First and second moments for a fixed list of parameter tensors.
struct AdamState {
  AdamConfig config;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::int64_t t = 0;
};

// One bias-corrected Adam update applied to every tensor. Moments are
// allocated on the first step; later steps must present the same shapes.
void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state);

}  // namespace namegender
