#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "discpar/corpus_io.hpp"
#include "discpar/embeddings.hpp"
#include "discpar/error.hpp"
#include "discpar/metrics.hpp"
#include "discpar/synthetic.hpp"
#include "support.hpp"

using namespace discpar;

namespace {

ParsedSplit parse_text(const std::string& text, const Inventories* fixed = nullptr) {
  std::istringstream in(text);
  return parse_corpus(in, fixed);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse_text(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("discpar_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

const char* kTwoDu =
    "The\tDT\tO\t0\n"
    "market\tNN\tO\t0\n"
    "fell\tVBD\tO\t1\n"
    "sharply\tRB\tO\t1\n"
    "REL\t0\tIMP\tExp\n";

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("labels and kinds") {
  CHECK(kAllLabels.size() == 4);
  CHECK(label_name(Label::Comp) == "Comp");
  CHECK(parse_label("Temp") == Label::Temp);
  CHECK_FALSE(parse_label("Other").has_value());
  CHECK(label_index(Label::Exp) == 2);
  CHECK(kind_name(SlotKind::Explicit) == "EXP");
}

TEST_CASE("minimal two-DU paragraph") {
  const ParsedSplit s = parse_text(kTwoDu);
  REQUIRE(s.paragraphs.size() == 1);
  const Paragraph& p = s.paragraphs[0];
  CHECK(p.tokens.size() == 4);
  CHECK(p.du_count() == 2);
  CHECK(p.spans[0] == DuSpan{0, 1});
  CHECK(p.spans[1] == DuSpan{2, 3});
  REQUIRE(p.slots.size() == 1);
  CHECK(p.slots[0].kind == SlotKind::Implicit);
  CHECK(p.slots[0].gold == std::vector<Label>{Label::Exp});
}

TEST_CASE("double label slot") {
  const ParsedSplit s = parse_text(
      "a\tDT\tO\t0\nb\tNN\tO\t1\nREL\t0\tEXP\tComp|Exp\n");
  const RelationSlot& slot = s.paragraphs.at(0).slots.at(0);
  CHECK(slot.kind == SlotKind::Explicit);
  CHECK(slot.gold == std::vector<Label>{Label::Comp, Label::Exp});
  CHECK(slot.accepts(Label::Exp));
  CHECK_FALSE(slot.accepts(Label::Temp));
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(parse_error_line("a\tDT\tO\t0\nb\tNN\tO\t2\nREL\t0\tIMP\tExp\n") == 2);
  CHECK(parse_error_line("a\tDT\tO\t0\nb\tNN\tO\t1\nREL\t0\tIMP\tOther\n") == 3);
  CHECK(parse_error_line("a\tDT\tO\t0\nb\tNN\tO\t1\nREL\t0\tXXX\tExp\n") == 3);
  CHECK(parse_error_line("a\tDT\tO\n") == 1);
  CHECK(parse_error_line("a\tDT\tO\t0\nb\tNN\tO\t1\nREL\t0\tIMP\tExp|Exp\n") == 3);
  CHECK(parse_error_line("a\tDT\tO\t0\nb\tNN\tO\t1\nREL\t1\tIMP\tExp\n") == 3);
  CHECK(parse_error_line("a\tDT\tO\t1\nb\tNN\tO\t1\nREL\t0\tIMP\tExp\n") == 1);
  // slot-count mismatch is detected at the end of the paragraph
  CHECK(parse_error_line("a\tDT\tO\t0\nb\tNN\tO\t1\nc\tNN\tO\t2\nREL\t0\tIMP\tExp\n") > 0);
  CHECK(parse_error_line("a\tDT\tO\t0\nREL\t0\tIMP\tExp\n") > 0);
  CHECK_THROWS_AS(parse_text("a\tDT\tO\t0\nb\tNN\tO\t2\n"), DataError);
}

TEST_CASE("tag headers and unknown tags") {
  const ParsedSplit s = parse_text(
      "#POS DT NN\n#NER O\n"
      "a\tDT\tO\t0\nb\tVB\tPER\t1\nREL\t0\tIMP\tExp\n");
  CHECK(s.inventories.pos.capacity() == kDefaultPosSlots);
  CHECK(s.inventories.pos.tags() == std::vector<std::string>{"DT", "NN"});
  const Paragraph& p = s.paragraphs.at(0);
  CHECK(p.tokens[0].pos_id == 0);
  CHECK(p.tokens[1].pos_id == kUnknownId);
  CHECK(p.tokens[1].ner_id == kUnknownId);
  CHECK(p.tokens[1].pos == "VB");
}

TEST_CASE("without a header tags are admitted in encounter order") {
  const ParsedSplit s = parse_text(kTwoDu);
  CHECK(s.inventories.pos.tags() == std::vector<std::string>{"DT", "NN", "VBD", "RB"});
  CHECK(s.paragraphs[0].tokens[2].pos_id == 2);
}

TEST_CASE("inventory capacity") {
  TagInventory inv(2);
  CHECK(inv.resolve("A") == 0);
  CHECK(inv.resolve("B") == 1);
  CHECK(inv.resolve("C") == kUnknownId);
  CHECK(inv.resolve("A") == 0);
  TagInventory closed(2);
  closed.freeze();
  CHECK(closed.resolve("A") == kUnknownId);
}

TEST_CASE("parse serialize parse is a fixed point") {
  const Corpus c = gen_synthetic(SynthConfig{.train = 40, .dev = 0, .test = 0, .double_label_prob = 0.3}, 3);
  std::ostringstream first;
  write_corpus(first, c.train, c.inventories);
  const ParsedSplit again = parse_text(first.str());
  CHECK(again.paragraphs == c.train);
  CHECK(again.inventories == c.inventories);
  std::ostringstream second;
  write_corpus(second, again.paragraphs, again.inventories);
  CHECK(first.str() == second.str());
}

TEST_CASE("corpus directory round trip") {
  const Corpus c = gen_synthetic(SynthConfig{.train = 12, .dev = 4, .test = 5}, 8);
  const auto dir = scratch_dir("corpus_dir");
  save_corpus_dir(c, dir);
  const Corpus back = load_corpus_dir(dir);
  CHECK(back.train == c.train);
  CHECK(back.dev == c.dev);
  CHECK(back.test == c.test);
  CHECK(back.inventories == c.inventories);
  CHECK_THROWS_AS(load_corpus_dir(dir / "missing"), IoError);
}

TEST_CASE("embedding file loading") {
  const auto dir = scratch_dir("emb");
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream(dir / name) << body;
    return dir / name;
  };
  auto row = [](const std::string& w, std::size_t n, double v) {
    std::string s = w;
    for (std::size_t i = 0; i < n; ++i) s += " " + std::to_string(v);
    return s + "\n";
  };
  const auto good = write("good.txt", "2 300\n" + row("market", 300, 0.5) + row("fell", 300, -1));
  EmbeddingTable t = load_embeddings(good, Rng(1));
  CHECK(t.size() == 2);
  CHECK(t.pretrained_count() == 2);
  CHECK(t.vector(t.find("fell"))[299] == -1.0);

  const std::int32_t a = t.intern("zebra");
  const std::int32_t b = t.intern("zebra");
  CHECK(a == b);
  const auto v = t.vector(a);
  CHECK(v.size() == 300);
  for (double x : v) {
    CHECK(x >= -0.25);
    CHECK(x <= 0.25);
  }
  CHECK(t.interned(a));
  CHECK_FALSE(t.interned(t.find("market")));

  const auto short_row = write("short.txt", "2 300\n" + row("a", 300, 0) + row("b", 299, 0));
  CHECK_THROWS_AS(load_embeddings(short_row, Rng(1)), FormatError);
  const auto missing_row = write("missing.txt", "2 300\n" + row("a", 300, 0));
  CHECK_THROWS_AS(load_embeddings(missing_row, Rng(1)), FormatError);
  const auto wrong_dim = write("dim.txt", "1 50\n" + row("a", 50, 0));
  CHECK_THROWS_AS(load_embeddings(wrong_dim, Rng(1)), ConfigError);
  CHECK_THROWS_AS(load_embeddings(dir / "absent.txt", Rng(1)), IoError);
}

TEST_CASE("oov vectors depend only on the seed and first-sight order") {
  EmbeddingTable a(8, Rng(4)), b(8, Rng(4));
  const auto ia = a.intern("w");
  const auto ib = b.intern("w");
  CHECK(std::vector<double>(a.vector(ia).begin(), a.vector(ia).end()) ==
        std::vector<double>(b.vector(ib).begin(), b.vector(ib).end()));
}

TEST_CASE("featurize layout") {
  EmbeddingTable table(300, Rng(2));
  Token tok;
  tok.surface = "x";
  tok.word_id = table.intern("x");
  tok.pos_id = 0;
  tok.ner_id = 0;
  const FeatureLayout layout{};
  CHECK(layout.dim() == 343);
  const Vector f = featurize(tok, table, layout);
  REQUIRE(f.size() == 343);
  for (std::size_t i = 300; i < 343; ++i) CHECK(f[i] == ((i == 300 || i == 336) ? 1.0 : 0.0));

  tok.pos_id = kUnknownId;
  const Vector g = featurize(tok, table, layout);
  for (std::size_t i = 300; i < 336; ++i) CHECK(g[i] == 0.0);
  CHECK(g[336] == 1.0);
  CHECK(g == featurize(tok, table, layout));

  tok.word_id = kUnknownId;
  const Vector h = featurize(tok, table, layout);
  for (std::size_t i = 0; i < 300; ++i) CHECK(h[i] == 0.0);
}

TEST_CASE("bind vocabulary sets word ids") {
  std::vector<Paragraph> ps = {test::make_paragraph({{"a", "b"}, {"a"}}, {{SlotKind::Implicit, {Label::Exp}}})};
  EmbeddingTable table(4, Rng(0));
  bind_vocabulary(ps, table);
  CHECK(ps[0].tokens[0].word_id == ps[0].tokens[2].word_id);
  CHECK(ps[0].tokens[1].word_id != ps[0].tokens[0].word_id);
}

TEST_CASE("paragraph validation") {
  Paragraph p = test::make_paragraph({{"a"}, {"b"}}, {{SlotKind::Implicit, {Label::Exp}}});
  CHECK_NOTHROW(p.validate());
  Paragraph gap = p;
  gap.spans[1].start = 2;
  CHECK_THROWS_AS(gap.validate(), DataError);
  Paragraph nogold = p;
  nogold.slots[0].gold.clear();
  CHECK_THROWS_AS(nogold.validate(), DataError);
  Paragraph one = test::make_paragraph({{"a"}}, {});
  CHECK_THROWS_AS(one.validate(), DataError);
}

TEST_CASE("synthetic DU-count distribution") {
  const Corpus c = gen_synthetic(SynthConfig{.train = 10000, .dev = 0, .test = 0}, 17);
  std::array<double, 5> freq{};
  for (const Paragraph& p : c.train) freq[bucket_of(p.du_count())] += 1.0;
  for (std::size_t b = 0; b < 5; ++b) {
    CHECK(std::abs(freq[b] / 10000.0 - kDuCountDistribution[b]) < 0.02);
  }
}

TEST_CASE("synthetic paragraphs are valid and deterministic") {
  for (SynthRegime regime : {SynthRegime::ConnectiveOnly, SynthRegime::Markov, SynthRegime::Context}) {
    SynthConfig cfg{.train = 100, .dev = 20, .test = 20, .regime = regime, .double_label_prob = 0.1};
    const Corpus a = gen_synthetic(cfg, 5);
    const Corpus b = gen_synthetic(cfg, 5);
    for (const Paragraph& p : a.train) CHECK_NOTHROW(p.validate());
    std::ostringstream sa, sb;
    write_corpus(sa, a.train, a.inventories);
    write_corpus(sb, b.train, b.inventories);
    CHECK(sa.str() == sb.str());
    CHECK(a.test == b.test);
  }
}

TEST_CASE("explicit gold is a function of the connective") {
  const Corpus c = gen_synthetic(SynthConfig{.train = 500, .dev = 0, .test = 0}, 2);
  std::size_t seen = 0;
  for (const Paragraph& p : c.train) {
    for (const RelationSlot& s : p.slots) {
      if (s.kind != SlotKind::Explicit) continue;
      const Token& first = p.tokens[p.spans[s.index + 1].start];
      const auto l = connective_label(first.surface);
      REQUIRE(l.has_value());
      CHECK(*l == s.gold.front());
      ++seen;
    }
  }
  CHECK(seen > 100);
}

TEST_CASE("markov bigram frequency matches the chain") {
  SynthConfig cfg{.train = 6000, .dev = 0, .test = 0, .regime = SynthRegime::Markov};
  const Corpus c = gen_synthetic(cfg, 21);
  std::size_t from_temp = 0, temp_temp = 0;
  for (const Paragraph& p : c.train) {
    for (std::size_t t = 1; t < p.slots.size(); ++t) {
      if (p.slots[t - 1].gold.front() != Label::Temp) continue;
      ++from_temp;
      if (p.slots[t].gold.front() == Label::Temp) ++temp_temp;
    }
  }
  REQUIRE(from_temp > 500);
  CHECK(std::abs(static_cast<double>(temp_temp) / static_cast<double>(from_temp) - 0.8) < 0.03);
}

TEST_CASE("regime names") {
  CHECK(parse_regime("markov") == SynthRegime::Markov);
  CHECK(regime_name(SynthRegime::Context) == "context");
  CHECK_FALSE(parse_regime("bogus").has_value());
}

}
