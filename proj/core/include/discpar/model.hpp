#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "discpar/config.hpp"
#include "discpar/corpus.hpp"
#include "discpar/crf.hpp"
#include "discpar/embeddings.hpp"
#include "discpar/encoder.hpp"
#include "discpar/heads.hpp"

namespace discpar {

/// Encoder, prediction heads and (optionally) the CRF layer of one variant.
class Model {
 public:
  Model(const TrainConfig& config, const FeatureLayout& layout);

  /// Draws fresh weights; CRF scores start at zero.
  void init(Rng& rng);

  const TrainConfig& config() const noexcept { return config_; }
  const FeatureLayout& layout() const noexcept { return layout_; }
  std::size_t classes() const noexcept { return config_.classes(); }

  /// Every block the variant actually uses (the pair baseline has no DU level).
  ParamRefs parameters();

  EncoderStack encoder;
  HeadSet heads;
  std::optional<CrfParams> crf;
  CrfStateSpace space;

 private:
  TrainConfig config_;
  FeatureLayout layout_;
};

/// Class indices the model is trained against: the labels themselves in
/// multi-way mode; {1} when the binary target is in the gold set, else {0}.
std::vector<std::size_t> gold_classes(const RelationSlot& slot, const TrainConfig& config);

struct ParagraphLoss {
  double loss = 0.0;
  std::size_t contributing_slots = 0;
};

/// Loss of one paragraph; with `backprop`, gradients are accumulated into the
/// model's blocks. `rng` drives dropout when `training`.
ParagraphLoss paragraph_loss(Model& model, const Paragraph& paragraph, const EmbeddingTable& table,
                             Rng& rng, bool training, bool backprop);

struct SlotPrediction {
  std::size_t predicted = 0;  // class index
  Vector probabilities;       // softmax of the kind-matched head
};

/// Inference-mode decoding: Viterbi over masked emissions when the CRF is on,
/// per-slot argmax otherwise.
std::vector<SlotPrediction> decode_paragraph(const Model& model, const Paragraph& paragraph,
                                             const EmbeddingTable& table);

/// Text snapshot ("discpar-model 1" header) holding the config, tag
/// inventories, the interned vocabulary with its frozen vectors, and every
/// parameter block as hex floats (lossless).
void save_model(const std::filesystem::path& path, Model& model, const EmbeddingTable& table,
                const Inventories& inventories);

struct LoadedModel {
  Model model;
  EmbeddingTable table;
  Inventories inventories;
};

LoadedModel load_model(const std::filesystem::path& path);

}  // namespace discpar
