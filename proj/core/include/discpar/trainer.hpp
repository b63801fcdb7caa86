#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "discpar/config.hpp"
#include "discpar/corpus.hpp"
#include "discpar/embeddings.hpp"
#include "discpar/metrics.hpp"
#include "discpar/model.hpp"

namespace discpar {

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  std::size_t steps = 0;
  Metrics dev;
};

struct RunReport {
  TrainConfig config;
  std::uint64_t seed = 0;
  std::vector<EpochRecord> epochs;
  std::size_t selected_epoch = 0;  // maximizes dev implicit macro-F1
  Metrics dev;
  std::optional<Metrics> test;
  double wall_seconds = 0.0;
};

struct TrainResult {
  Model model;
  RunReport report;
};

/// Trains `config` on corpus.train, selecting the epoch with the best dev
/// implicit macro-F1 (ties keep the earlier epoch). Each epoch shuffles the
/// paragraphs, accumulates gradients over whole paragraphs until `window`
/// slots are covered, divides by the number of loss-bearing slots, clips to
/// the global norm `clip` and applies Adam. The corpus must already be bound
/// to `table`. Throws TrainingError on a non-finite loss.
TrainResult train(const TrainConfig& config, const Corpus& corpus, const EmbeddingTable& table);

/// One-vs-all training for `config.binary_target`. The returned report's
/// metrics have two classes; class 1 is the positive label.
TrainResult binary_mode_train(const TrainConfig& config, const Corpus& corpus,
                              const EmbeddingTable& table);

/// Context-blind DU-pair baseline (config.variant must be BASELINE-PAIR).
TrainResult baseline_pair_mode(const TrainConfig& config, const Corpus& corpus,
                               const EmbeddingTable& table);

/// Positive-class F1 of the implicit slots in a binary report.
double positive_f1(const Metrics& metrics);

}  // namespace discpar
