#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "discpar/corpus.hpp"
#include "discpar/matrix.hpp"

namespace discpar {

class Model;
class EmbeddingTable;

/// Per-slot outputs of one run over a fixed slot ordering.
struct RunOutputs {
  std::vector<std::size_t> predictions;
  std::vector<Vector> probabilities;
};

/// Majority vote per slot. Ties go to the tied label with the largest
/// probability summed over all runs, then to the lowest index. Throws
/// DataError when runs disagree on the slot count or are empty.
std::vector<std::size_t> ensemble_vote(std::span<const RunOutputs> runs);

/// Decodes `split` and flattens the per-slot outputs in paragraph order.
RunOutputs collect_outputs(const Model& model, std::span<const Paragraph> split,
                           const EmbeddingTable& table);

/// Splits flat per-slot predictions back into per-paragraph rows.
std::vector<std::vector<std::size_t>> reshape_predictions(std::span<const Paragraph> split,
                                                          std::span<const std::size_t> flat);

}  // namespace discpar
