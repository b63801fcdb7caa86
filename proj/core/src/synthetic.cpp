#include "discpar/synthetic.hpp"

#include <array>
#include <string>

#include "discpar/error.hpp"
#include "discpar/rng.hpp"

namespace discpar {

namespace {

constexpr std::array<std::array<std::string_view, 2>, kNumLabels> kConnectives = {{
    {"but", "however"},
    {"because", "so"},
    {"and", "also"},
    {"then", "after"},
}};

constexpr std::array<std::array<std::string_view, 2>, kNumLabels> kCues = {{
    {"slump", "rival"},
    {"reason", "outcome"},
    {"detail", "example"},
    {"earlier", "later"},
}};

const std::vector<std::string> kPosTags = {"CC", "DT", "IN", "JJ",  "NN",  "NNS",
                                           "NNP", "PRP", "RB", "VB", "VBD", "VBZ"};
const std::vector<std::string> kNerTags = {"O",    "PERSON",  "ORGANIZATION", "LOCATION",
                                           "DATE", "MONEY",   "PERCENT"};

std::optional<Label> lookup(const std::array<std::array<std::string_view, 2>, kNumLabels>& table,
                            std::string_view word) {
  for (std::size_t l = 0; l < kNumLabels; ++l) {
    for (std::string_view w : table[l]) {
      if (w == word) return static_cast<Label>(l);
    }
  }
  return std::nullopt;
}

Label draw_label(Rng& rng, std::span<const double> weights) {
  return static_cast<Label>(rng.categorical(weights));
}

std::size_t draw_du_count(Rng& rng) {
  const std::size_t bucket = rng.categorical(kDuCountDistribution);
  return bucket < 4 ? bucket + 2 : 6 + rng.below(3);
}

class ParagraphBuilder {
 public:
  ParagraphBuilder(const SynthConfig& config, Rng& rng, Inventories& inventories)
      : config_(config), rng_(rng), inventories_(inventories) {}

  Paragraph build() {
    const std::size_t dus = draw_du_count(rng_);
    const std::size_t n_slots = dus - 1;
    Paragraph p;
    p.slots.resize(n_slots);
    std::vector<bool> cue(n_slots, false);

    for (std::size_t t = 0; t < n_slots; ++t) {
      p.slots[t].index = t;
      p.slots[t].kind = rng_.bernoulli(config_.explicit_prob) ? SlotKind::Explicit
                                                              : SlotKind::Implicit;
    }
    std::vector<Label> labels(n_slots);
    for (std::size_t t = 0; t < n_slots; ++t) {
      if (config_.regime == SynthRegime::Markov && t > 0) {
        labels[t] = draw_label(rng_, config_.transitions[label_index(labels[t - 1])]);
      } else {
        labels[t] = draw_label(rng_, config_.label_prior);
      }
    }
    for (std::size_t t = 0; t < n_slots; ++t) {
      if (p.slots[t].kind == SlotKind::Explicit) continue;
      switch (config_.regime) {
        case SynthRegime::ConnectiveOnly:
          cue[t] = true;
          break;
        case SynthRegime::Markov:
          cue[t] = rng_.bernoulli(config_.cue_prob);
          break;
        case SynthRegime::Context: {
          const bool next_explicit = t + 1 < n_slots && p.slots[t + 1].kind == SlotKind::Explicit;
          if (next_explicit && rng_.bernoulli(config_.copy_prob)) {
            labels[t] = labels[t + 1];
            cue[t] = false;
          } else {
            cue[t] = rng_.bernoulli(config_.cue_prob);
          }
          break;
        }
      }
    }
    for (std::size_t t = 0; t < n_slots; ++t) {
      p.slots[t].gold.push_back(labels[t]);
      if (rng_.bernoulli(config_.double_label_prob)) {
        std::size_t other = rng_.below(kNumLabels - 1);
        if (other >= label_index(labels[t])) ++other;
        p.slots[t].gold.push_back(static_cast<Label>(other));
      }
    }

    for (std::size_t d = 0; d < dus; ++d) {
      const std::size_t start = p.tokens.size();
      const std::size_t span = config_.max_du_words - config_.min_du_words + 1;
      const std::size_t length = config_.min_du_words + rng_.below(span);
      for (std::size_t i = 0; i < length; ++i) filler(p);
      if (d > 0) {
        const RelationSlot& slot = p.slots[d - 1];
        if (slot.kind == SlotKind::Explicit) {
          set_word(p.tokens[start], connective_for(labels[d - 1], rng_.below(2)), "CC", "O");
        } else if (cue[d - 1]) {
          const std::size_t at = start + rng_.below(length);
          set_word(p.tokens[at], cue_for(labels[d - 1], rng_.below(2)), "NN", "O");
        }
      }
      p.spans.push_back({start, p.tokens.size() - 1});
    }
    return p;
  }

 private:
  void filler(Paragraph& p) {
    const std::string word = "w" + std::to_string(rng_.below(config_.filler_vocab));
    // Fillers never use the connective tag.
    const std::string& pos = kPosTags[1 + rng_.below(kPosTags.size() - 1)];
    const std::string& ner = rng_.bernoulli(0.85) ? kNerTags[0]
                                                  : kNerTags[1 + rng_.below(kNerTags.size() - 1)];
    Token tok;
    set_word(tok, word, pos, ner);
    p.tokens.push_back(std::move(tok));
  }

  void set_word(Token& tok, std::string_view word, std::string_view pos, std::string_view ner) {
    tok.surface = std::string(word);
    tok.pos = std::string(pos);
    tok.ner = std::string(ner);
    tok.pos_id = inventories_.pos.find(pos);
    tok.ner_id = inventories_.ner.find(ner);
    tok.word_id = kUnknownId;
  }

  const SynthConfig& config_;
  Rng& rng_;
  Inventories& inventories_;
};

}  // namespace

std::string_view regime_name(SynthRegime regime) noexcept {
  switch (regime) {
    case SynthRegime::ConnectiveOnly:
      return "connective";
    case SynthRegime::Markov:
      return "markov";
    case SynthRegime::Context:
      return "context";
  }
  return "connective";
}

std::optional<SynthRegime> parse_regime(std::string_view text) noexcept {
  if (text == "connective" || text == "connective-only") return SynthRegime::ConnectiveOnly;
  if (text == "markov") return SynthRegime::Markov;
  if (text == "context") return SynthRegime::Context;
  return std::nullopt;
}

LabelTransitions SynthConfig::sticky_transitions(double stay) {
  LabelTransitions m{};
  const double move = (1.0 - stay) / static_cast<double>(kNumLabels - 1);
  for (std::size_t a = 0; a < kNumLabels; ++a) {
    for (std::size_t b = 0; b < kNumLabels; ++b) m[a][b] = a == b ? stay : move;
  }
  return m;
}

std::string_view connective_for(Label label, std::size_t variant) noexcept {
  return kConnectives[label_index(label)][variant % 2];
}

std::optional<Label> connective_label(std::string_view word) noexcept {
  return lookup(kConnectives, word);
}

std::string_view cue_for(Label label, std::size_t variant) noexcept {
  return kCues[label_index(label)][variant % 2];
}

std::optional<Label> cue_label(std::string_view word) noexcept { return lookup(kCues, word); }

Corpus gen_synthetic(const SynthConfig& config, std::uint64_t seed) {
  if (config.min_du_words == 0 || config.max_du_words < config.min_du_words) {
    throw ConfigError("synthetic: invalid DU word-count range");
  }
  if (config.filler_vocab == 0) throw ConfigError("synthetic: filler vocabulary is empty");
  Corpus corpus;
  corpus.inventories.pos = TagInventory(kDefaultPosSlots, kPosTags);
  corpus.inventories.ner = TagInventory(kDefaultNerSlots, kNerTags);
  Rng rng(seed);
  ParagraphBuilder builder(config, rng, corpus.inventories);
  auto fill = [&](std::vector<Paragraph>& split, std::size_t n) {
    split.reserve(n);
    for (std::size_t i = 0; i < n; ++i) split.push_back(builder.build());
  };
  fill(corpus.train, config.train);
  fill(corpus.dev, config.dev);
  fill(corpus.test, config.test);
  return corpus;
}

}  // namespace discpar
