#pragma once

#include <string>
#include <utility>
#include <vector>

#include "discpar/corpus.hpp"
#include "discpar/embeddings.hpp"
#include "discpar/rng.hpp"

namespace discpar::test {

struct SlotSpec {
  SlotKind kind;
  std::vector<Label> gold;
};

// Builds a paragraph from per-DU word lists; tags cycle through small inventories.
inline Paragraph make_paragraph(const std::vector<std::vector<std::string>>& dus,
                                const std::vector<SlotSpec>& slots) {
  Paragraph p;
  for (std::size_t d = 0; d < dus.size(); ++d) {
    const std::size_t start = p.tokens.size();
    for (const std::string& w : dus[d]) {
      Token t;
      t.surface = w;
      t.pos = "NN";
      t.ner = "O";
      t.pos_id = static_cast<std::int32_t>(p.tokens.size() % 3);
      t.ner_id = 0;
      p.tokens.push_back(t);
    }
    p.spans.push_back({start, p.tokens.size() - 1});
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    p.slots.push_back({i, slots[i].kind, slots[i].gold});
  }
  return p;
}

// Tiny vocabulary with deterministic OOV draws.
inline EmbeddingTable small_table(std::size_t dim, std::uint64_t seed = 5) {
  return EmbeddingTable(dim, Rng(seed));
}

inline FeatureLayout small_layout(std::size_t dim) { return FeatureLayout{dim, 4, 2}; }

inline void bind(std::vector<Paragraph>& ps, EmbeddingTable& table) {
  bind_vocabulary(ps, table);
}

}  // namespace discpar::test
