#include "discpar/metrics.hpp"

#include "discpar/error.hpp"
#include "discpar/model.hpp"

namespace discpar {

namespace {

struct Tally {
  explicit Tally(std::size_t classes) : scores(classes) {}

  void add(std::size_t predicted, const std::vector<std::size_t>& gold,
           FnAttribution attribution) {
    ++count;
    bool hit = false;
    for (std::size_t g : gold) hit = hit || g == predicted;
    if (hit) {
      ++correct;
      ++scores.at(predicted).tp;
      return;
    }
    ++scores.at(predicted).fp;
    if (attribution == FnAttribution::FirstGold) {
      ++scores.at(gold.front()).fn;
    } else {
      for (std::size_t g : gold) ++scores.at(g).fn;
    }
  }

  KindMetrics finish() const {
    KindMetrics m;
    m.classes = scores;
    m.count = count;
    m.correct = correct;
    double f1_total = 0.0;
    for (ClassScores& c : m.classes) {
      const double tp = static_cast<double>(c.tp);
      c.precision = c.tp + c.fp == 0 ? 0.0 : tp / static_cast<double>(c.tp + c.fp);
      c.recall = c.tp + c.fn == 0 ? 0.0 : tp / static_cast<double>(c.tp + c.fn);
      c.f1 = c.precision + c.recall == 0.0
                 ? 0.0
                 : 2.0 * c.precision * c.recall / (c.precision + c.recall);
      f1_total += c.f1;
    }
    m.macro_f1 = m.classes.empty() ? 0.0 : f1_total / static_cast<double>(m.classes.size());
    m.accuracy = count == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(count);
    return m;
  }

  std::vector<ClassScores> scores;
  std::size_t count = 0;
  std::size_t correct = 0;
};

}  // namespace

std::size_t bucket_of(std::size_t du_count) noexcept {
  if (du_count <= 2) return 0;
  if (du_count >= 6) return 4;
  return du_count - 2;
}

GoldMapper label_gold() {
  return [](const RelationSlot& slot) {
    std::vector<std::size_t> out;
    for (Label l : slot.gold) out.push_back(label_index(l));
    return out;
  };
}

Metrics score_predictions(std::span<const Paragraph> paragraphs,
                          std::span<const std::vector<std::size_t>> predictions,
                          std::size_t num_classes, const GoldMapper& gold,
                          FnAttribution attribution, bool with_buckets) {
  if (paragraphs.size() != predictions.size()) {
    throw DataError("score_predictions: " + std::to_string(predictions.size()) +
                    " prediction rows for " + std::to_string(paragraphs.size()) + " paragraphs");
  }
  Tally implicit(num_classes);
  Tally explicit_(num_classes);
  std::vector<Tally> bucket_implicit(kBucketNames.size(), Tally(num_classes));
  std::vector<Tally> bucket_explicit(kBucketNames.size(), Tally(num_classes));
  for (std::size_t p = 0; p < paragraphs.size(); ++p) {
    const Paragraph& para = paragraphs[p];
    if (predictions[p].size() != para.slots.size()) {
      throw DataError("score_predictions: paragraph " + std::to_string(p) +
                      " has a misaligned prediction row");
    }
    const std::size_t b = bucket_of(para.du_count());
    for (std::size_t t = 0; t < para.slots.size(); ++t) {
      const RelationSlot& slot = para.slots[t];
      const auto g = gold(slot);
      const std::size_t predicted = predictions[p][t];
      if (predicted >= num_classes) throw DataError("score_predictions: class out of range");
      const bool is_implicit = slot.kind == SlotKind::Implicit;
      (is_implicit ? implicit : explicit_).add(predicted, g, attribution);
      if (with_buckets) (is_implicit ? bucket_implicit : bucket_explicit)[b].add(predicted, g, attribution);
    }
  }
  Metrics m;
  m.num_classes = num_classes;
  m.implicit = implicit.finish();
  m.explicit_ = explicit_.finish();
  if (with_buckets) {
    for (std::size_t b = 0; b < kBucketNames.size(); ++b) {
      m.buckets.push_back({kBucketNames[b], bucket_implicit[b].finish(), bucket_explicit[b].finish()});
    }
  }
  return m;
}

std::vector<std::vector<std::size_t>> predict_split(const Model& model,
                                                    std::span<const Paragraph> split,
                                                    const EmbeddingTable& table) {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(split.size());
  for (const Paragraph& p : split) {
    std::vector<std::size_t> row;
    for (const SlotPrediction& s : decode_paragraph(model, p, table)) row.push_back(s.predicted);
    out.push_back(std::move(row));
  }
  return out;
}

Metrics evaluate(const Model& model, std::span<const Paragraph> split, const EmbeddingTable& table,
                 bool with_buckets) {
  const TrainConfig& cfg = model.config();
  const auto predictions = predict_split(model, split, table);
  return score_predictions(split, predictions, model.classes(),
                           [&cfg](const RelationSlot& s) { return gold_classes(s, cfg); },
                           cfg.fn_attribution, with_buckets);
}

}  // namespace discpar
