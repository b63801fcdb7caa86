#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "discpar/corpus.hpp"

namespace discpar {

struct ParsedSplit {
  std::vector<Paragraph> paragraphs;
  Inventories inventories;
};

/// Reads the paragraph format:
///
///   #POS tag1 tag2 ...            (optional header)
///   #NER tag1 ...                 (optional header)
///   surface<TAB>pos<TAB>ner<TAB>du_index
///   ...
///   REL<TAB>slot_index<TAB>IMP|EXP<TAB>Label[|Label]
///   <blank line between paragraphs>
///
/// When `fixed` is given its inventories are used (and frozen); a header in
/// the file must then agree with them. Throws ParseError with the line number.
ParsedSplit parse_corpus(std::istream& in, const Inventories* fixed = nullptr);
ParsedSplit parse_corpus_file(const std::filesystem::path& path, const Inventories* fixed = nullptr);

void write_corpus(std::ostream& out, std::span<const Paragraph> paragraphs,
                  const Inventories& inventories);
void write_corpus_file(const std::filesystem::path& path, std::span<const Paragraph> paragraphs,
                       const Inventories& inventories);

/// A corpus directory holds train.txt, dev.txt and (optionally) test.txt.
/// dev and test are read with the train inventories.
Corpus load_corpus_dir(const std::filesystem::path& dir);
void save_corpus_dir(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace discpar
