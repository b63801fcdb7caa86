#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "discpar/matrix.hpp"

namespace discpar {

/// A named trainable tensor with its gradient and Adam moments.
struct ParamBlock {
  ParamBlock() = default;
  ParamBlock(std::string block_name, std::size_t rows, std::size_t cols, bool is_trainable = true)
      : name(std::move(block_name)),
        value(rows, cols),
        grad(rows, cols),
        adam_m(rows, cols),
        adam_v(rows, cols),
        trainable(is_trainable) {}

  void zero_grad() { grad.fill(0.0); }

  std::string name;
  Matrix value;
  Matrix grad;
  Matrix adam_m;
  Matrix adam_v;
  std::uint64_t step_count = 0;
  bool trainable = true;
};

using ParamRefs = std::vector<ParamBlock*>;

}  // namespace discpar
