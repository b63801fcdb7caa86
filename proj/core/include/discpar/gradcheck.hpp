#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "discpar/param.hpp"

namespace discpar {

struct GradCheckOptions {
  double step = 1e-4;
  double tolerance = 1e-3;
  /// Coordinates sampled per block; blocks at most this large are checked fully.
  std::size_t max_coords_per_block = 32;
  /// Denominator floor for the relative error, so coordinates whose true
  /// gradient is ~0 are compared absolutely.
  double denominator_floor = 1e-6;
  std::uint64_t seed = 0;
};

struct CoordinateCheck {
  std::string block;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
};

struct BlockCheck {
  std::string block;
  std::size_t checked = 0;
  double max_relative_error = 0.0;
  bool skipped = false;  // non-trainable
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t coordinates_checked = 0;
  std::vector<BlockCheck> blocks;
  std::vector<CoordinateCheck> offending;

  bool passed() const noexcept { return offending.empty(); }
  std::string summary() const;
};

/// Loss callback. When `with_grad` is true it must also accumulate analytic
/// gradients into the blocks' `grad` fields. Must be deterministic.
using LossFn = std::function<double(bool with_grad)>;

/// Compares analytic gradients against central differences
/// (f(w+h) - f(w-h)) / 2h on sampled coordinates of every trainable block.
/// Relative error is |a - n| / max(|a|, |n|, floor). Block values are restored.
GradCheckReport finite_diff_check(const LossFn& loss, std::span<ParamBlock* const> blocks,
                                  const GradCheckOptions& options = {});

/// As finite_diff_check, but throws VerificationError listing the offending
/// coordinates when any exceeds the tolerance.
GradCheckReport verify_gradients(const LossFn& loss, std::span<ParamBlock* const> blocks,
                                 const GradCheckOptions& options = {});

}  // namespace discpar
