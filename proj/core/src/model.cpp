#include "discpar/model.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "discpar/error.hpp"
#include "discpar/ops.hpp"

namespace discpar {

namespace {

constexpr const char* kModelMagic = "discpar-model";
constexpr int kModelVersion = 1;

EncoderConfig encoder_config(const TrainConfig& c, const FeatureLayout& layout) {
  return {layout.dim(), c.hidden, c.dropout, c.dropout_after_pool};
}

HeadMode head_mode(Variant v) {
  return v == Variant::Untied || v == Variant::UntiedCrf ? HeadMode::Untied : HeadMode::Tied;
}

double slot_weight(SlotKind kind, double alpha) {
  return kind == SlotKind::Implicit ? 1.0 : alpha;
}

std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

AllowedStates crf_allowed(const Paragraph& p, const Model& model) {
  AllowedStates allowed(p.slots.size());
  const bool supervise_explicit = model.config().alpha > 0.0;
  for (std::size_t t = 0; t < p.slots.size(); ++t) {
    const RelationSlot& slot = p.slots[t];
    if (slot.kind == SlotKind::Explicit && !supervise_explicit) {
      for (Label l : kAllLabels) allowed[t].push_back(model.space.state(slot.kind, l));
    } else {
      for (Label l : slot.gold) allowed[t].push_back(model.space.state(slot.kind, l));
    }
  }
  return allowed;
}

std::vector<SlotKind> slot_kinds(const Paragraph& p) {
  std::vector<SlotKind> kinds;
  kinds.reserve(p.slots.size());
  for (const auto& s : p.slots) kinds.push_back(s.kind);
  return kinds;
}

ParagraphLoss pair_loss(Model& model, const Paragraph& p, const EmbeddingTable& table, Rng& rng,
                        bool training, bool backprop) {
  const TrainConfig& cfg = model.config();
  ParagraphLoss out;
  std::vector<SlotLoss> losses;
  for (std::size_t t = 0; t < p.slots.size(); ++t) {
    const RelationSlot& slot = p.slots[t];
    const double w = slot_weight(slot.kind, cfg.alpha);
    if (w == 0.0) continue;
    ++out.contributing_slots;
    WordLevelTrace trace;
    auto pair = encode_du_pair(model.encoder.word, model.encoder.config, p, t, table,
                               model.layout(), rng, training, &trace);
    const Vector logits = slot_logits(model.heads, pair[0], pair[1], slot.kind);
    Vector d_logits;
    const auto gold = gold_classes(slot, cfg);
    losses.push_back({slot.kind, slot_loss(logits, gold, backprop ? &d_logits : nullptr,
                                           cfg.double_label_loss)});
    if (!backprop) continue;
    for (double& d : d_logits) d *= w;
    std::vector<Vector> d_pair(2, Vector(pair[0].size(), 0.0));
    slot_logits_backward(model.heads, pair[0], pair[1], slot.kind, d_logits, d_pair[0], d_pair[1]);
    pool_word_level_backward(model.encoder.word, trace, d_pair);
  }
  out.loss = combined_loss(losses, {cfg.alpha});
  return out;
}

}  // namespace

Model::Model(const TrainConfig& config, const FeatureLayout& layout)
    : encoder(encoder_config(config, layout)),
      heads(head_mode(config.variant), config.classes(), 4 * config.hidden),
      space(config.crf.value_or(CrfMode::Typed8)),
      config_(config),
      layout_(layout) {
  config_.validate();
  if (config.embedding_dim != layout.word_dim) {
    throw ConfigError("embedding_dim " + std::to_string(config.embedding_dim) +
                      " differs from the embedding table dimension " +
                      std::to_string(layout.word_dim));
  }
  if (config.uses_crf()) crf.emplace(space.size());
}

void Model::init(Rng& rng) {
  encoder.init(rng);
  heads.init(rng);
  if (crf) {
    for (ParamBlock* b : crf->parameters()) b->value.fill(0.0);
  }
}

ParamRefs Model::parameters() {
  ParamRefs refs = config_.variant == Variant::BaselinePair ? encoder.word_parameters()
                                                            : encoder.parameters();
  for (ParamBlock* b : heads.parameters()) refs.push_back(b);
  if (crf) {
    for (ParamBlock* b : crf->parameters()) refs.push_back(b);
  }
  return refs;
}

std::vector<std::size_t> gold_classes(const RelationSlot& slot, const TrainConfig& config) {
  if (config.binary_target) return {slot.accepts(*config.binary_target) ? 1u : 0u};
  std::vector<std::size_t> out;
  for (Label l : slot.gold) out.push_back(label_index(l));
  return out;
}

ParagraphLoss paragraph_loss(Model& model, const Paragraph& p, const EmbeddingTable& table,
                             Rng& rng, bool training, bool backprop) {
  const TrainConfig& cfg = model.config();
  if (cfg.variant == Variant::BaselinePair) return pair_loss(model, p, table, rng, training, backprop);

  EncoderTrace trace;
  const std::vector<Vector> reps =
      encode_paragraph(model.encoder, p, table, model.layout(), rng, training, &trace);
  const std::size_t T = p.slots.size();
  std::vector<Vector> logits(T);
  for (std::size_t t = 0; t < T; ++t) {
    logits[t] = slot_logits(model.heads, reps[t], reps[t + 1], p.slots[t].kind);
  }

  ParagraphLoss out;
  std::vector<Vector> d_logits(T, Vector(model.classes(), 0.0));
  for (const auto& slot : p.slots) {
    if (slot_weight(slot.kind, cfg.alpha) != 0.0) ++out.contributing_slots;
  }
  if (cfg.uses_crf()) {
    const auto kinds = slot_kinds(p);
    const Matrix table_e = emissions(logits, kinds, model.space);
    Matrix d_e;
    out.loss = crf_nll(table_e, *model.crf, crf_allowed(p, model), backprop ? &d_e : nullptr,
                       backprop);
    if (backprop) emissions_backward(d_e, kinds, model.space, d_logits);
  } else {
    std::vector<SlotLoss> losses;
    for (std::size_t t = 0; t < T; ++t) {
      const RelationSlot& slot = p.slots[t];
      const double w = slot_weight(slot.kind, cfg.alpha);
      if (w == 0.0) continue;
      Vector d;
      losses.push_back({slot.kind, slot_loss(logits[t], gold_classes(slot, cfg),
                                             backprop ? &d : nullptr, cfg.double_label_loss)});
      if (backprop) {
        for (std::size_t k = 0; k < d.size(); ++k) d_logits[t][k] = w * d[k];
      }
    }
    out.loss = combined_loss(losses, {cfg.alpha});
  }
  if (!backprop) return out;

  std::vector<Vector> d_reps(reps.size(), Vector(reps[0].size(), 0.0));
  for (std::size_t t = 0; t < T; ++t) {
    const RelationSlot& slot = p.slots[t];
    if (!cfg.uses_crf() && slot_weight(slot.kind, cfg.alpha) == 0.0) continue;
    slot_logits_backward(model.heads, reps[t], reps[t + 1], slot.kind, d_logits[t], d_reps[t],
                         d_reps[t + 1]);
  }
  encode_paragraph_backward(model.encoder, trace, d_reps);
  return out;
}

std::vector<SlotPrediction> decode_paragraph(const Model& model, const Paragraph& p,
                                             const EmbeddingTable& table) {
  const TrainConfig& cfg = model.config();
  const std::size_t T = p.slots.size();
  Rng unused(0);
  std::vector<Vector> logits(T);
  if (cfg.variant == Variant::BaselinePair) {
    for (std::size_t t = 0; t < T; ++t) {
      auto pair = encode_du_pair(model.encoder.word, model.encoder.config, p, t, table,
                                 model.layout(), unused, false);
      logits[t] = slot_logits(model.heads, pair[0], pair[1], p.slots[t].kind);
    }
  } else {
    const auto reps = encode_paragraph(model.encoder, p, table, model.layout(), unused, false);
    for (std::size_t t = 0; t < T; ++t) {
      logits[t] = slot_logits(model.heads, reps[t], reps[t + 1], p.slots[t].kind);
    }
  }
  std::vector<SlotPrediction> out(T);
  for (std::size_t t = 0; t < T; ++t) {
    out[t].probabilities = softmax(logits[t]);
    out[t].predicted = argmax(logits[t]);
  }
  if (cfg.uses_crf()) {
    const auto path = viterbi(emissions(logits, slot_kinds(p), model.space), *model.crf);
    for (std::size_t t = 0; t < T; ++t) {
      out[t].predicted = label_index(model.space.label_of(path.states[t]));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Snapshot format

namespace {

void write_hex(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  out << buf;
}

double read_hex(std::istream& in, const std::string& what) {
  std::string token;
  if (!(in >> token)) throw FormatError("model file: truncated " + what);
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size()) throw FormatError("model file: bad number in " + what);
  return v;
}

void expect(std::istream& in, const std::string& keyword) {
  std::string token;
  if (!(in >> token) || token != keyword) {
    throw FormatError("model file: expected '" + keyword + "', found '" + token + "'");
  }
}

void write_inventory(std::ostream& out, const char* name, const TagInventory& inv) {
  out << name << ' ' << inv.capacity() << ' ' << inv.tags().size();
  for (const auto& t : inv.tags()) out << ' ' << t;
  out << '\n';
}

TagInventory read_inventory(std::istream& in, const char* name) {
  expect(in, name);
  std::size_t capacity = 0;
  std::size_t count = 0;
  if (!(in >> capacity >> count)) throw FormatError(std::string("model file: bad ") + name);
  std::vector<std::string> tags(count);
  for (auto& t : tags) {
    if (!(in >> t)) throw FormatError(std::string("model file: truncated ") + name);
  }
  return TagInventory(capacity, tags);
}

}  // namespace

void save_model(const std::filesystem::path& path, Model& model, const EmbeddingTable& table,
                const Inventories& inventories) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << kModelMagic << ' ' << kModelVersion << '\n';
  const std::string cfg = format_config(model.config());
  const auto n = static_cast<std::size_t>(std::count(cfg.begin(), cfg.end(), '\n'));
  out << "config " << n << '\n' << cfg;
  write_inventory(out, "pos", inventories.pos);
  write_inventory(out, "ner", inventories.ner);
  std::vector<std::int32_t> kept;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table.interned(static_cast<std::int32_t>(i))) kept.push_back(static_cast<std::int32_t>(i));
  }
  out << "lexicon " << kept.size() << ' ' << table.dim() << '\n';
  for (const std::int32_t id : kept) {
    out << table.word(id);
    for (double v : table.vector(id)) {
      out << ' ';
      write_hex(out, v);
    }
    out << '\n';
  }
  const ParamRefs blocks = model.parameters();
  out << "blocks " << blocks.size() << '\n';
  for (const ParamBlock* b : blocks) {
    out << "block " << b->name << ' ' << b->value.rows() << ' ' << b->value.cols() << '\n';
    for (std::size_t r = 0; r < b->value.rows(); ++r) {
      for (std::size_t c = 0; c < b->value.cols(); ++c) {
        if (c > 0) out << ' ';
        write_hex(out, b->value(r, c));
      }
      out << '\n';
    }
  }
  out << "end\n";
  if (!out) throw IoError("failed writing " + path.string());
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kModelMagic) {
    throw FormatError(path.string() + ": not a model snapshot");
  }
  if (version != kModelVersion) {
    throw FormatError(path.string() + ": unsupported snapshot version " + std::to_string(version));
  }
  expect(in, "config");
  std::size_t n = 0;
  if (!(in >> n)) throw FormatError("model file: bad config count");
  std::string line;
  std::getline(in, line);
  std::ostringstream cfg_text;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw FormatError("model file: truncated config");
    cfg_text << line << '\n';
  }
  std::istringstream cfg_in(cfg_text.str());
  const TrainConfig config = parse_config(cfg_in);

  Inventories inventories;
  inventories.pos = read_inventory(in, "pos");
  inventories.ner = read_inventory(in, "ner");

  expect(in, "lexicon");
  std::size_t words = 0;
  std::size_t dim = 0;
  if (!(in >> words >> dim)) {
    throw FormatError("model file: bad lexicon header");
  }
  EmbeddingTable table(dim, Rng(config.seed));
  Vector vec(dim);
  for (std::size_t i = 0; i < words; ++i) {
    std::string word;
    if (!(in >> word)) throw FormatError("model file: truncated lexicon");
    for (double& v : vec) v = read_hex(in, "lexicon");
    table.restore(word, vec);
  }

  LoadedModel loaded{Model(config, feature_layout(table, inventories)), std::move(table),
                     std::move(inventories)};
  ParamRefs blocks = loaded.model.parameters();
  expect(in, "blocks");
  if (!(in >> n) || n != blocks.size()) throw FormatError("model file: block count mismatch");
  for (ParamBlock* b : blocks) {
    expect(in, "block");
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    if (!(in >> name >> rows >> cols) || name != b->name || rows != b->value.rows() ||
        cols != b->value.cols()) {
      throw FormatError("model file: unexpected block '" + name + "', expected '" + b->name + "'");
    }
    for (double& v : b->value.values()) v = read_hex(in, b->name);
  }
  expect(in, "end");
  return loaded;
}

}  // namespace discpar
