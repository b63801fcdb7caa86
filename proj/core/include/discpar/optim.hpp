#pragma once

#include <span>

#include "discpar/param.hpp"

namespace discpar {

struct AdamOptions {
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// One bias-corrected Adam update on every trainable block, then zeroes all
/// gradients. Throws TrainingError naming the block if any gradient is
/// non-finite; in that case no block is modified.
void adam_step(std::span<ParamBlock* const> blocks, const AdamOptions& options = {});

/// Joint L2 norm of the gradients of all trainable blocks.
double global_grad_norm(std::span<ParamBlock* const> blocks);

/// Rescales every gradient by threshold/norm when the joint norm exceeds
/// threshold. Returns the norm measured before clipping.
double clip_global_norm(std::span<ParamBlock* const> blocks, double threshold);

/// Multiplies every gradient by `factor`.
void scale_gradients(std::span<ParamBlock* const> blocks, double factor);

void zero_gradients(std::span<ParamBlock* const> blocks);

}  // namespace discpar
