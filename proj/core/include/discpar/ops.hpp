#pragma once

#include <span>

#include "discpar/matrix.hpp"
#include "discpar/rng.hpp"

namespace discpar {

/// W·x + b. Throws DimensionError when shapes do not conform.
Vector affine(const Matrix& w, std::span<const double> x, std::span<const double> b);

/// Accumulates the gradients of y = W·x + b given dy. Any of dw, dx, db may
/// be null/empty to skip that operand.
void affine_backward(const Matrix& w, std::span<const double> x, std::span<const double> dy,
                     Matrix* dw, std::span<double> dx, std::span<double> db);

/// y += W·x (no shape checks; hot path).
void matvec_add(const Matrix& w, std::span<const double> x, std::span<double> y) noexcept;
/// dx += Wᵀ·dy (no shape checks; hot path).
void matvec_transpose_add(const Matrix& w, std::span<const double> dy,
                          std::span<double> dx) noexcept;
/// dw += dy ⊗ x (no shape checks; hot path).
void outer_add(std::span<const double> dy, std::span<const double> x, Matrix& dw) noexcept;

/// Max-shifted softmax.
Vector softmax(std::span<const double> logits);

/// Stable log Σ exp(v_i). Returns -inf when every entry is -inf.
double logsumexp(std::span<const double> v);

double sigmoid(double x) noexcept;

/// Inverted dropout. In training mode each entry is zeroed with probability p
/// and survivors are scaled by 1/(1-p); otherwise identity. When `mask` is
/// given it receives the per-entry multipliers (for the backward pass).
Vector dropout(std::span<const double> x, double p, Rng& rng, bool training,
               Vector* mask = nullptr);

}  // namespace discpar
