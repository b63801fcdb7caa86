#include "discpar/optim.hpp"

#include <cmath>

#include "discpar/error.hpp"

namespace discpar {

void adam_step(std::span<ParamBlock* const> blocks, const AdamOptions& options) {
  for (const ParamBlock* block : blocks) {
    if (block->trainable && !block->grad.all_finite()) {
      throw TrainingError("adam_step: non-finite gradient in block '" + block->name + "'");
    }
  }
  for (ParamBlock* block : blocks) {
    if (!block->trainable) {
      block->zero_grad();
      continue;
    }
    ++block->step_count;
    const double t = static_cast<double>(block->step_count);
    const double correction1 = 1.0 - std::pow(options.beta1, t);
    const double correction2 = 1.0 - std::pow(options.beta2, t);
    auto value = block->value.values();
    auto grad = block->grad.values();
    auto m = block->adam_m.values();
    auto v = block->adam_v.values();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i];
      m[i] = options.beta1 * m[i] + (1.0 - options.beta1) * g;
      v[i] = options.beta2 * v[i] + (1.0 - options.beta2) * g * g;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      value[i] -= options.learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
      grad[i] = 0.0;
    }
  }
}

double global_grad_norm(std::span<ParamBlock* const> blocks) {
  double total = 0.0;
  for (const ParamBlock* block : blocks) {
    if (!block->trainable) continue;
    for (double g : block->grad.values()) total += g * g;
  }
  return std::sqrt(total);
}

double clip_global_norm(std::span<ParamBlock* const> blocks, double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("clip_global_norm: threshold must be positive");
  const double norm = global_grad_norm(blocks);
  if (norm > threshold) scale_gradients(blocks, threshold / norm);
  return norm;
}

void scale_gradients(std::span<ParamBlock* const> blocks, double factor) {
  for (ParamBlock* block : blocks) {
    if (!block->trainable) continue;
    for (double& g : block->grad.values()) g *= factor;
  }
}

void zero_gradients(std::span<ParamBlock* const> blocks) {
  for (ParamBlock* block : blocks) block->zero_grad();
}

}  // namespace discpar
