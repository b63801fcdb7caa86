#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "discpar/corpus.hpp"
#include "discpar/matrix.hpp"
#include "discpar/rng.hpp"

namespace discpar {

inline constexpr std::size_t kDefaultWordDim = 300;
inline constexpr double kOovRange = 0.25;

/// Frozen word vectors. Words missing from the pretrained set are assigned a
/// vector drawn uniformly from [-0.25, 0.25] per dimension the first time they
/// are interned; the vector is cached so a word maps to one vector per run.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim = kDefaultWordDim, Rng oov_rng = Rng(0));

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return words_.size(); }
  std::size_t pretrained_count() const noexcept { return pretrained_; }

  /// Adds a pretrained vector. Throws FormatError on a dimension mismatch or
  /// a duplicate word.
  void add_pretrained(std::string word, std::span<const double> vec);

  std::int32_t find(std::string_view word) const;
  /// Id of `word`, drawing and caching an OOV vector on first sight.
  std::int32_t intern(std::string_view word);

  std::span<const double> vector(std::int32_t id) const;
  const std::string& word(std::int32_t id) const { return words_.at(static_cast<std::size_t>(id)); }

  /// Restores an entry verbatim (model snapshots). Returns the id.
  std::int32_t restore(std::string word, std::span<const double> vec);

  /// True once `intern` has returned this id (snapshots keep only these).
  bool interned(std::int32_t id) const { return used_.at(static_cast<std::size_t>(id)) != 0; }

 private:
  std::int32_t append(std::string word, std::span<const double> vec);

  std::size_t dim_;
  std::size_t pretrained_ = 0;
  Rng oov_rng_;
  std::vector<std::string> words_;
  std::vector<double> vectors_;
  std::vector<char> used_;
  std::unordered_map<std::string, std::int32_t> index_;
};

/// Reads the text format: header "count dim", then one line per word with the
/// surface followed by `dim` numbers. Throws FormatError on arity mismatch and
/// ConfigError when the file dimension differs from `expected_dim`.
EmbeddingTable load_embeddings(const std::filesystem::path& path, Rng rng,
                               std::size_t expected_dim = kDefaultWordDim);

/// Sets word_id on every token of every split (train, dev, test order).
void bind_vocabulary(Corpus& corpus, EmbeddingTable& table);
void bind_vocabulary(std::vector<Paragraph>& paragraphs, EmbeddingTable& table);

/// Widths of the three feature blocks.
struct FeatureLayout {
  std::size_t word_dim = kDefaultWordDim;
  std::size_t pos_slots = kDefaultPosSlots;
  std::size_t ner_slots = kDefaultNerSlots;

  std::size_t dim() const noexcept { return word_dim + pos_slots + ner_slots; }
  friend bool operator==(const FeatureLayout&, const FeatureLayout&) = default;
};

FeatureLayout feature_layout(const EmbeddingTable& table, const Inventories& inventories);

/// [word vector | POS one-hot | NER one-hot]; 343 wide with the defaults.
/// Unbound words and UNKNOWN tags contribute zero blocks.
Vector featurize(const Token& token, const EmbeddingTable& table, const FeatureLayout& layout);

}  // namespace discpar
