#include "discpar/encoder.hpp"

#include "discpar/error.hpp"
#include "discpar/ops.hpp"

namespace discpar {

Vector du_maxpool(std::span<const Vector> hs, DuSpan span, std::vector<std::size_t>* argmax) {
  if (span.start > span.end || span.end >= hs.size()) {
    throw DimensionError("du_maxpool: span [" + std::to_string(span.start) + ", " +
                         std::to_string(span.end) + "] outside sequence of length " +
                         std::to_string(hs.size()));
  }
  Vector out = hs[span.start];
  if (argmax != nullptr) argmax->assign(out.size(), span.start);
  for (std::size_t i = span.start + 1; i <= span.end; ++i) {
    const Vector& h = hs[i];
    if (h.size() != out.size()) throw DimensionError("du_maxpool: ragged sequence");
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (h[j] > out[j]) {
        out[j] = h[j];
        if (argmax != nullptr) (*argmax)[j] = i;
      }
    }
  }
  return out;
}

void du_maxpool_backward(std::span<const double> d_out, const std::vector<std::size_t>& argmax,
                         std::span<Vector> d_hs) {
  for (std::size_t j = 0; j < d_out.size(); ++j) d_hs[argmax[j]][j] += d_out[j];
}

EncoderStack::EncoderStack(const EncoderConfig& cfg)
    : config(cfg),
      word("encoder.word", cfg.input_dim, cfg.hidden),
      du("encoder.du", 2 * cfg.hidden, cfg.hidden) {}

void EncoderStack::init(Rng& rng) {
  word.init(rng);
  du.init(rng);
}

ParamRefs EncoderStack::parameters() {
  ParamRefs refs = word.parameters();
  for (ParamBlock* b : du.parameters()) refs.push_back(b);
  return refs;
}

std::vector<Vector> pool_word_level(const BiLstmLayer& word, const EncoderConfig& config,
                                    const Paragraph& paragraph, std::size_t first_du,
                                    std::size_t last_du, const EmbeddingTable& table,
                                    const FeatureLayout& layout, Rng& rng, bool training,
                                    WordLevelTrace* trace) {
  if (first_du > last_du || last_du >= paragraph.spans.size()) {
    throw DimensionError("pool_word_level: DU range out of bounds");
  }
  if (layout.dim() != word.input_dim()) {
    throw DimensionError("pool_word_level: feature width " + std::to_string(layout.dim()) +
                         " differs from layer input " + std::to_string(word.input_dim()));
  }
  WordLevelTrace local;
  WordLevelTrace& t = trace != nullptr ? *trace : local;
  const std::size_t first = paragraph.spans[first_du].start;
  const std::size_t last = paragraph.spans[last_du].end;
  const std::size_t n = last - first + 1;
  t.first_token = first;
  t.token_count = n;
  t.hidden = word.hidden();

  t.inputs.resize(n);
  t.input_masks.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector features = featurize(paragraph.tokens[first + i], table, layout);
    t.inputs[i] = dropout(features, config.dropout, rng, training, &t.input_masks[i]);
  }
  std::vector<Vector> hs = bilstm_run(word, t.inputs, &t.lstm);
  t.output_masks.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    hs[i] = dropout(hs[i], config.dropout, rng, training, &t.output_masks[i]);
  }

  const std::size_t dus = last_du - first_du + 1;
  std::vector<Vector> pooled(dus);
  t.argmax.resize(dus);
  t.pooled_masks.resize(dus);
  for (std::size_t d = 0; d < dus; ++d) {
    const DuSpan& s = paragraph.spans[first_du + d];
    pooled[d] = du_maxpool(hs, {s.start - first, s.end - first}, &t.argmax[d]);
    const double p = config.dropout_after_pool ? config.dropout : 0.0;
    pooled[d] = dropout(pooled[d], p, rng, training, &t.pooled_masks[d]);
  }
  return pooled;
}

void pool_word_level_backward(BiLstmLayer& word, const WordLevelTrace& trace,
                              std::span<const Vector> d_pooled) {
  std::vector<Vector> d_hs(trace.token_count, Vector(2 * trace.hidden, 0.0));
  for (std::size_t d = 0; d < d_pooled.size(); ++d) {
    Vector masked = d_pooled[d];
    for (std::size_t j = 0; j < masked.size(); ++j) masked[j] *= trace.pooled_masks[d][j];
    du_maxpool_backward(masked, trace.argmax[d], d_hs);
  }
  for (std::size_t i = 0; i < d_hs.size(); ++i) {
    for (std::size_t j = 0; j < d_hs[i].size(); ++j) d_hs[i][j] *= trace.output_masks[i][j];
  }
  // Features are frozen: no input gradient needed.
  bilstm_backward(word, trace.inputs, trace.lstm, d_hs, false);
}

std::vector<Vector> encode_paragraph(const EncoderStack& stack, const Paragraph& paragraph,
                                     const EmbeddingTable& table, const FeatureLayout& layout,
                                     Rng& rng, bool training, EncoderTrace* trace) {
  EncoderTrace local;
  EncoderTrace& t = trace != nullptr ? *trace : local;
  t.du_inputs = pool_word_level(stack.word, stack.config, paragraph, 0, paragraph.spans.size() - 1,
                                table, layout, rng, training, &t.words);
  std::vector<Vector> reps = bilstm_run(stack.du, t.du_inputs, &t.du_lstm);
  t.du_output_masks.resize(reps.size());
  for (std::size_t d = 0; d < reps.size(); ++d) {
    reps[d] = dropout(reps[d], stack.config.dropout, rng, training, &t.du_output_masks[d]);
  }
  return reps;
}

void encode_paragraph_backward(EncoderStack& stack, const EncoderTrace& trace,
                               std::span<const Vector> d_du_reps) {
  std::vector<Vector> d_out(d_du_reps.begin(), d_du_reps.end());
  for (std::size_t d = 0; d < d_out.size(); ++d) {
    for (std::size_t j = 0; j < d_out[d].size(); ++j) d_out[d][j] *= trace.du_output_masks[d][j];
  }
  std::vector<Vector> d_pooled = bilstm_backward(stack.du, trace.du_inputs, trace.du_lstm, d_out, true);
  pool_word_level_backward(stack.word, trace.words, d_pooled);
}

std::array<Vector, 2> encode_du_pair(const BiLstmLayer& word, const EncoderConfig& config,
                                     const Paragraph& paragraph, std::size_t slot,
                                     const EmbeddingTable& table, const FeatureLayout& layout,
                                     Rng& rng, bool training, WordLevelTrace* trace) {
  if (slot + 1 >= paragraph.spans.size()) throw DimensionError("encode_du_pair: slot out of range");
  auto pooled = pool_word_level(word, config, paragraph, slot, slot + 1, table, layout, rng,
                                training, trace);
  return {std::move(pooled[0]), std::move(pooled[1])};
}

}  // namespace discpar
