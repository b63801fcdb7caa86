#include "discpar/corpus_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "discpar/error.hpp"

namespace discpar {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t begin = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, begin);
    if (pos == std::string_view::npos) {
      parts.push_back(line.substr(begin));
      return parts;
    }
    parts.push_back(line.substr(begin, pos - begin));
    begin = pos + 1;
  }
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t') ++j;
    if (j > i) words.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return words;
}

bool parse_index(std::string_view text, std::size_t& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

class SplitParser {
 public:
  explicit SplitParser(const Inventories* fixed) : fixed_(fixed != nullptr) {
    if (fixed != nullptr) {
      result_.inventories = *fixed;
      result_.inventories.pos.freeze();
      result_.inventories.ner.freeze();
    }
  }

  void line(std::size_t number, std::string_view text) {
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (text.find_first_not_of(" \t") == std::string_view::npos) {
      finish_paragraph();
      return;
    }
    if (text.front() == '#' && text.find('\t') == std::string_view::npos) {
      header(number, text);
      return;
    }
    const auto fields = split(text, '\t');
    if (fields[0] == "REL") {
      relation(number, fields);
    } else {
      token(number, fields);
    }
  }

  ParsedSplit finish() {
    finish_paragraph();
    return std::move(result_);
  }

 private:
  void header(std::size_t number, std::string_view text) {
    const bool is_pos = text.starts_with("#POS");
    const bool is_ner = text.starts_with("#NER");
    if (!is_pos && !is_ner) return;  // comment
    if (seen_content_) throw ParseError(number, "inventory header after paragraph content");
    const auto tags = split_words(text.substr(4));
    TagInventory& target = is_pos ? result_.inventories.pos : result_.inventories.ner;
    const std::size_t default_slots = is_pos ? kDefaultPosSlots : kDefaultNerSlots;
    TagInventory parsed(std::max(default_slots, target.capacity()), tags);
    if (fixed_) {
      if (parsed.tags() != target.tags()) {
        throw ParseError(number, "inventory header disagrees with the supplied inventories");
      }
      return;
    }
    target = std::move(parsed);
  }

  void token(std::size_t number, const std::vector<std::string_view>& fields) {
    if (fields.size() != 4) {
      throw ParseError(number, "token line needs 4 tab-separated fields, found " +
                                   std::to_string(fields.size()));
    }
    if (!current_.slots.empty()) throw ParseError(number, "token line after REL lines");
    if (fields[0].empty()) throw ParseError(number, "empty token surface");
    std::size_t du = 0;
    if (!parse_index(fields[3], du)) throw ParseError(number, "bad du_index '" + std::string(fields[3]) + "'");
    seen_content_ = true;
    start_line_ = current_.tokens.empty() ? number : start_line_;
    const std::size_t position = current_.tokens.size();
    if (current_.spans.empty()) {
      if (du != 0) throw ParseError(number, "first du_index must be 0");
      current_.spans.push_back({position, position});
    } else if (du == current_.spans.size() - 1) {
      current_.spans.back().end = position;
    } else if (du == current_.spans.size()) {
      current_.spans.push_back({position, position});
    } else {
      throw ParseError(number, "du_index " + std::to_string(du) + " is not contiguous (expected " +
                                   std::to_string(current_.spans.size() - 1) + " or " +
                                   std::to_string(current_.spans.size()) + ")");
    }
    Token tok;
    tok.surface = std::string(fields[0]);
    tok.pos = std::string(fields[1]);
    tok.ner = std::string(fields[2]);
    tok.pos_id = result_.inventories.pos.resolve(tok.pos);
    tok.ner_id = result_.inventories.ner.resolve(tok.ner);
    current_.tokens.push_back(std::move(tok));
  }

  void relation(std::size_t number, const std::vector<std::string_view>& fields) {
    if (fields.size() != 4) throw ParseError(number, "REL line needs 4 tab-separated fields");
    if (current_.tokens.empty()) throw ParseError(number, "REL line before any token");
    std::size_t index = 0;
    if (!parse_index(fields[1], index)) throw ParseError(number, "bad slot index");
    if (index != current_.slots.size()) {
      throw ParseError(number, "slot index " + std::to_string(index) + " out of order");
    }
    RelationSlot slot;
    slot.index = index;
    if (fields[2] == "IMP") {
      slot.kind = SlotKind::Implicit;
    } else if (fields[2] == "EXP") {
      slot.kind = SlotKind::Explicit;
    } else {
      throw ParseError(number, "slot kind must be IMP or EXP");
    }
    for (std::string_view name : split(fields[3], '|')) {
      auto label = parse_label(name);
      if (!label) throw ParseError(number, "unknown relation label '" + std::string(name) + "'");
      if (slot.accepts(*label)) throw ParseError(number, "repeated gold label");
      slot.gold.push_back(*label);
    }
    if (slot.gold.size() > 2) throw ParseError(number, "at most two gold labels per slot");
    current_.slots.push_back(std::move(slot));
  }

  void finish_paragraph() {
    if (current_.tokens.empty()) return;
    try {
      current_.validate();
    } catch (const DataError& e) {
      throw ParseError(start_line_, std::string("paragraph: ") + e.what());
    }
    result_.paragraphs.push_back(std::move(current_));
    current_ = Paragraph{};
  }

  bool fixed_;
  bool seen_content_ = false;
  std::size_t start_line_ = 0;
  Paragraph current_;
  ParsedSplit result_;
};

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

ParsedSplit parse_corpus(std::istream& in, const Inventories* fixed) {
  SplitParser parser(fixed);
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) parser.line(++number, text);
  return parser.finish();
}

ParsedSplit parse_corpus_file(const std::filesystem::path& path, const Inventories* fixed) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return parse_corpus(in, fixed);
}

void write_corpus(std::ostream& out, std::span<const Paragraph> paragraphs,
                  const Inventories& inventories) {
  out << "#POS";
  for (const auto& tag : inventories.pos.tags()) out << ' ' << tag;
  out << "\n#NER";
  for (const auto& tag : inventories.ner.tags()) out << ' ' << tag;
  out << '\n';
  for (const Paragraph& p : paragraphs) {
    out << '\n';
    for (std::size_t d = 0; d < p.spans.size(); ++d) {
      for (std::size_t i = p.spans[d].start; i <= p.spans[d].end; ++i) {
        const Token& t = p.tokens[i];
        out << t.surface << '\t' << t.pos << '\t' << t.ner << '\t' << d << '\n';
      }
    }
    for (const RelationSlot& s : p.slots) {
      out << "REL\t" << s.index << '\t' << kind_name(s.kind) << '\t';
      for (std::size_t g = 0; g < s.gold.size(); ++g) {
        if (g > 0) out << '|';
        out << label_name(s.gold[g]);
      }
      out << '\n';
    }
  }
}

void write_corpus_file(const std::filesystem::path& path, std::span<const Paragraph> paragraphs,
                       const Inventories& inventories) {
  auto out = open_for_write(path);
  write_corpus(out, paragraphs, inventories);
  if (!out) throw IoError("failed writing " + path.string());
}

Corpus load_corpus_dir(const std::filesystem::path& dir) {
  Corpus corpus;
  ParsedSplit train = parse_corpus_file(dir / "train.txt");
  corpus.train = std::move(train.paragraphs);
  corpus.inventories = std::move(train.inventories);
  corpus.inventories.pos.freeze();
  corpus.inventories.ner.freeze();
  corpus.dev = parse_corpus_file(dir / "dev.txt", &corpus.inventories).paragraphs;
  if (std::filesystem::exists(dir / "test.txt")) {
    corpus.test = parse_corpus_file(dir / "test.txt", &corpus.inventories).paragraphs;
  }
  return corpus;
}

void save_corpus_dir(const Corpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_corpus_file(dir / "train.txt", corpus.train, corpus.inventories);
  write_corpus_file(dir / "dev.txt", corpus.dev, corpus.inventories);
  write_corpus_file(dir / "test.txt", corpus.test, corpus.inventories);
}

}  // namespace discpar
