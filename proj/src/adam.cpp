#include "namegender/adam.hpp"

#include <cmath>

#include "namegender/error.hpp"

namespace namegender {

void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state) {
  if (params.size() != grads.size()) {
    throw Error(ErrorCode::ShapeMismatch, "parameter and gradient tensor counts differ");
  }
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.size(), 0.0);
      state.v.emplace_back(p.size(), 0.0);
    }
  }
  if (state.m.size() != params.size()) {
    throw Error(ErrorCode::ShapeMismatch, "optimizer state tracks a different tensor count");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k].size() != grads[k].size() || state.m[k].size() != params[k].size()) {
      throw Error(ErrorCode::ShapeMismatch, "tensor shape differs from optimizer state");
    }
  }

  const auto& cfg = state.config;
  ++state.t;
  const double correction1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double correction2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& m = state.m[k];
    auto& v = state.v[k];
    const auto g = grads[k];
    const auto theta = params[k];
    for (std::size_t j = 0; j < theta.size(); ++j) {
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      theta[j] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

}  // namespace namegender
