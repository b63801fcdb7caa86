#include "discpar/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "discpar/error.hpp"

namespace discpar {

EmbeddingTable::EmbeddingTable(std::size_t dim, Rng oov_rng) : dim_(dim), oov_rng_(oov_rng) {
  if (dim == 0) throw ConfigError("embedding dimension must be positive");
}

std::int32_t EmbeddingTable::append(std::string word, std::span<const double> vec) {
  const auto id = static_cast<std::int32_t>(words_.size());
  index_.emplace(word, id);
  words_.push_back(std::move(word));
  used_.push_back(0);
  vectors_.insert(vectors_.end(), vec.begin(), vec.end());
  return id;
}

void EmbeddingTable::add_pretrained(std::string word, std::span<const double> vec) {
  if (vec.size() != dim_) {
    throw FormatError("vector for '" + word + "' has " + std::to_string(vec.size()) +
                      " entries, expected " + std::to_string(dim_));
  }
  if (index_.contains(word)) throw FormatError("duplicate embedding for '" + word + "'");
  append(std::move(word), vec);
  ++pretrained_;
}

std::int32_t EmbeddingTable::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnknownId : it->second;
}

std::int32_t EmbeddingTable::intern(std::string_view word) {
  std::int32_t id = find(word);
  if (id == kUnknownId) {
    Vector fresh(dim_);
    for (double& v : fresh) v = oov_rng_.uniform(-kOovRange, kOovRange);
    id = append(std::string(word), fresh);
  }
  used_[static_cast<std::size_t>(id)] = 1;
  return id;
}

std::int32_t EmbeddingTable::restore(std::string word, std::span<const double> vec) {
  if (vec.size() != dim_) throw FormatError("restored vector for '" + word + "' has wrong size");
  if (index_.contains(word)) throw FormatError("duplicate embedding for '" + word + "'");
  const std::int32_t id = append(std::move(word), vec);
  used_[static_cast<std::size_t>(id)] = 1;
  return id;
}

std::span<const double> EmbeddingTable::vector(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= words_.size()) {
    throw DimensionError("embedding id " + std::to_string(id) + " out of range");
  }
  return {vectors_.data() + static_cast<std::size_t>(id) * dim_, dim_};
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, Rng rng,
                               std::size_t expected_dim) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": missing header");
  std::istringstream header(line);
  std::size_t count = 0;
  std::size_t dim = 0;
  std::string extra;
  if (!(header >> count >> dim) || (header >> extra)) {
    throw FormatError(path.string() + ": header must be 'count dim'");
  }
  if (dim != expected_dim) {
    throw ConfigError(path.string() + ": embedding dimension " + std::to_string(dim) +
                      " differs from configured " + std::to_string(expected_dim));
  }
  EmbeddingTable table(dim, rng);
  Vector values;
  values.reserve(dim);
  std::size_t rows = 0;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string_view rest(line);
    const std::size_t cut = rest.find(' ');
    if (cut == std::string_view::npos || cut == 0) {
      throw FormatError(path.string() + ":" + std::to_string(number) + ": row has no vector");
    }
    std::string word(rest.substr(0, cut));
    rest.remove_prefix(cut + 1);
    values.clear();
    while (!rest.empty()) {
      while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
      if (rest.empty()) break;
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
      if (ec != std::errc() || !std::isfinite(v)) {
        throw FormatError(path.string() + ":" + std::to_string(number) + ": bad number");
      }
      values.push_back(v);
      rest.remove_prefix(static_cast<std::size_t>(ptr - rest.data()));
    }
    if (values.size() != dim) {
      throw FormatError(path.string() + ":" + std::to_string(number) + ": row has " +
                        std::to_string(values.size()) + " numbers, expected " +
                        std::to_string(dim));
    }
    table.add_pretrained(std::move(word), values);
    ++rows;
  }
  if (rows != count) {
    throw FormatError(path.string() + ": header declares " + std::to_string(count) +
                      " rows, found " + std::to_string(rows));
  }
  return table;
}

void bind_vocabulary(std::vector<Paragraph>& paragraphs, EmbeddingTable& table) {
  for (auto& p : paragraphs) {
    for (auto& t : p.tokens) t.word_id = table.intern(t.surface);
  }
}

void bind_vocabulary(Corpus& corpus, EmbeddingTable& table) {
  bind_vocabulary(corpus.train, table);
  bind_vocabulary(corpus.dev, table);
  bind_vocabulary(corpus.test, table);
}

FeatureLayout feature_layout(const EmbeddingTable& table, const Inventories& inventories) {
  return {table.dim(), inventories.pos.capacity(), inventories.ner.capacity()};
}

Vector featurize(const Token& token, const EmbeddingTable& table, const FeatureLayout& layout) {
  Vector out(layout.dim(), 0.0);
  if (token.word_id != kUnknownId) {
    auto vec = table.vector(token.word_id);
    std::copy_n(vec.begin(), std::min(vec.size(), layout.word_dim), out.begin());
  }
  if (token.pos_id != kUnknownId && static_cast<std::size_t>(token.pos_id) < layout.pos_slots) {
    out[layout.word_dim + static_cast<std::size_t>(token.pos_id)] = 1.0;
  }
  if (token.ner_id != kUnknownId && static_cast<std::size_t>(token.ner_id) < layout.ner_slots) {
    out[layout.word_dim + layout.pos_slots + static_cast<std::size_t>(token.ner_id)] = 1.0;
  }
  return out;
}

}  // namespace discpar
