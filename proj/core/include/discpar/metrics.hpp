#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "discpar/config.hpp"
#include "discpar/corpus.hpp"

namespace discpar {

class Model;
class EmbeddingTable;

struct ClassScores {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  friend bool operator==(const ClassScores&, const ClassScores&) = default;
};

/// Scores over one slot population (implicit or explicit).
struct KindMetrics {
  std::vector<ClassScores> classes;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::size_t count = 0;
  std::size_t correct = 0;
  friend bool operator==(const KindMetrics&, const KindMetrics&) = default;
};

/// Paragraph-length bucket: "2", "3", "4", "5" or ">5" DUs.
struct BucketMetrics {
  std::string bucket;
  KindMetrics implicit;
  KindMetrics explicit_;
  friend bool operator==(const BucketMetrics&, const BucketMetrics&) = default;
};

inline constexpr std::array<const char*, 5> kBucketNames = {"2", "3", "4", "5", ">5"};
std::size_t bucket_of(std::size_t du_count) noexcept;

struct Metrics {
  std::size_t num_classes = kNumLabels;
  KindMetrics implicit;
  KindMetrics explicit_;
  std::vector<BucketMetrics> buckets;  // empty unless requested
  friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// Maps a slot to its gold class indices (first-listed first).
using GoldMapper = std::function<std::vector<std::size_t>(const RelationSlot&)>;

/// Counting rule: a slot is correct when its prediction is in the gold set;
/// a match is a TP of the predicted class, a miss is an FP of the predicted
/// class plus an FN of the first-listed gold class (or of every gold class
/// with FnAttribution::AllGold). `predictions[p][t]` is the class predicted
/// for slot t of paragraph p.
Metrics score_predictions(std::span<const Paragraph> paragraphs,
                          std::span<const std::vector<std::size_t>> predictions,
                          std::size_t num_classes, const GoldMapper& gold,
                          FnAttribution attribution = FnAttribution::FirstGold,
                          bool with_buckets = false);

/// Multi-way gold mapping (label indices).
GoldMapper label_gold();

/// Decodes every paragraph with `model` and scores it.
Metrics evaluate(const Model& model, std::span<const Paragraph> split, const EmbeddingTable& table,
                 bool with_buckets = false);

/// Predicted class per slot for every paragraph.
std::vector<std::vector<std::size_t>> predict_split(const Model& model,
                                                    std::span<const Paragraph> split,
                                                    const EmbeddingTable& table);

}  // namespace discpar
