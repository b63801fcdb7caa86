#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "discpar/corpus.hpp"
#include "discpar/embeddings.hpp"
#include "discpar/lstm.hpp"

namespace discpar {

/// Coordinate-wise max over hs[span.start..span.end]. `argmax` (optional)
/// receives the winning position per coordinate; ties go to the first.
Vector du_maxpool(std::span<const Vector> hs, DuSpan span,
                  std::vector<std::size_t>* argmax = nullptr);

/// Routes d_out to the argmax positions of d_hs.
void du_maxpool_backward(std::span<const double> d_out, const std::vector<std::size_t>& argmax,
                         std::span<Vector> d_hs);

struct EncoderConfig {
  std::size_t input_dim = 343;
  std::size_t hidden = 300;
  double dropout = 0.5;
  /// Dropout between max-pooling and the DU-level layer.
  bool dropout_after_pool = true;
};

/// Word-level Bi-LSTM over the whole paragraph, max-pooling per DU span, and a
/// DU-level Bi-LSTM over the pooled vectors.
struct EncoderStack {
  EncoderStack() = default;
  explicit EncoderStack(const EncoderConfig& config);

  void init(Rng& rng);
  ParamRefs parameters();
  ParamRefs word_parameters() { return word.parameters(); }
  std::size_t output_dim() const noexcept { return 2 * config.hidden; }

  EncoderConfig config;
  BiLstmLayer word;  // input_dim -> 2H
  BiLstmLayer du;    // 2H -> 2H
};

/// Activations kept for the backward pass of the word level.
struct WordLevelTrace {
  std::vector<Vector> inputs;  // features after dropout
  std::vector<Vector> input_masks;
  BiLstmTrace lstm;
  std::vector<Vector> output_masks;
  std::vector<std::vector<std::size_t>> argmax;  // per DU
  std::vector<Vector> pooled_masks;
  std::size_t first_token = 0;
  std::size_t token_count = 0;
  std::size_t hidden = 0;
};

struct EncoderTrace {
  WordLevelTrace words;
  std::vector<Vector> du_inputs;
  BiLstmTrace du_lstm;
  std::vector<Vector> du_output_masks;
};

/// featurize -> dropout -> word Bi-LSTM over tokens of DUs [first_du, last_du]
/// -> dropout -> max-pool per DU -> dropout (if enabled). One vector per DU.
std::vector<Vector> pool_word_level(const BiLstmLayer& word, const EncoderConfig& config,
                                    const Paragraph& paragraph, std::size_t first_du,
                                    std::size_t last_du, const EmbeddingTable& table,
                                    const FeatureLayout& layout, Rng& rng, bool training,
                                    WordLevelTrace* trace = nullptr);

void pool_word_level_backward(BiLstmLayer& word, const WordLevelTrace& trace,
                              std::span<const Vector> d_pooled);

/// Full two-level encoding: one 2H-wide representation per DU.
std::vector<Vector> encode_paragraph(const EncoderStack& stack, const Paragraph& paragraph,
                                     const EmbeddingTable& table, const FeatureLayout& layout,
                                     Rng& rng, bool training, EncoderTrace* trace = nullptr);

void encode_paragraph_backward(EncoderStack& stack, const EncoderTrace& trace,
                               std::span<const Vector> d_du_reps);

/// Context-blind encoding of slot `slot`: the word level sees only the tokens
/// of DU slot and DU slot+1. Returns the two pooled vectors.
std::array<Vector, 2> encode_du_pair(const BiLstmLayer& word, const EncoderConfig& config,
                                     const Paragraph& paragraph, std::size_t slot,
                                     const EmbeddingTable& table, const FeatureLayout& layout,
                                     Rng& rng, bool training, WordLevelTrace* trace = nullptr);

}  // namespace discpar
