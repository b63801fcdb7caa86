#include "discpar/ensemble.hpp"

#include <map>

#include "discpar/error.hpp"
#include "discpar/model.hpp"

namespace discpar {

std::vector<std::size_t> ensemble_vote(std::span<const RunOutputs> runs) {
  if (runs.empty()) throw DataError("ensemble_vote: no runs");
  const std::size_t slots = runs.front().predictions.size();
  for (const RunOutputs& r : runs) {
    if (r.predictions.size() != slots || r.probabilities.size() != slots) {
      throw DataError("ensemble_vote: runs are not aligned on the same slots");
    }
  }
  std::vector<std::size_t> out(slots);
  for (std::size_t s = 0; s < slots; ++s) {
    std::map<std::size_t, std::size_t> votes;
    for (const RunOutputs& r : runs) ++votes[r.predictions[s]];
    std::size_t top = 0;
    for (const auto& [label, n] : votes) top = std::max(top, n);
    bool chosen = false;
    double best_mass = 0.0;
    for (const auto& [label, n] : votes) {
      if (n != top) continue;
      double mass = 0.0;
      for (const RunOutputs& r : runs) {
        const Vector& p = r.probabilities[s];
        if (label < p.size()) mass += p[label];
      }
      if (!chosen || mass > best_mass) {
        out[s] = label;
        best_mass = mass;
        chosen = true;
      }
    }
  }
  return out;
}

RunOutputs collect_outputs(const Model& model, std::span<const Paragraph> split,
                           const EmbeddingTable& table) {
  RunOutputs out;
  for (const Paragraph& p : split) {
    for (SlotPrediction& s : decode_paragraph(model, p, table)) {
      out.predictions.push_back(s.predicted);
      out.probabilities.push_back(std::move(s.probabilities));
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> reshape_predictions(std::span<const Paragraph> split,
                                                          std::span<const std::size_t> flat) {
  std::vector<std::vector<std::size_t>> rows;
  std::size_t at = 0;
  for (const Paragraph& p : split) {
    if (at + p.slots.size() > flat.size()) throw DataError("reshape_predictions: too few predictions");
    rows.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(at),
                      flat.begin() + static_cast<std::ptrdiff_t>(at + p.slots.size()));
    at += p.slots.size();
  }
  if (at != flat.size()) throw DataError("reshape_predictions: too many predictions");
  return rows;
}

}  // namespace discpar
