#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "discpar/encoder.hpp"
#include "discpar/error.hpp"
#include "discpar/gradcheck.hpp"
#include "discpar/lstm.hpp"
#include "support.hpp"

using namespace discpar;

namespace {

void randomize(ParamRefs blocks, Rng& rng, double scale = 0.5) {
  for (ParamBlock* b : blocks) {
    for (double& v : b->value.values()) v = rng.uniform(-scale, scale);
  }
}

std::vector<Vector> random_sequence(std::size_t n, std::size_t dim, Rng& rng) {
  std::vector<Vector> xs(n, Vector(dim));
  for (Vector& x : xs) {
    for (double& v : x) v = rng.uniform(-1, 1);
  }
  return xs;
}

double dot_loss(const std::vector<Vector>& ys, const std::vector<Vector>& ws,
                std::vector<Vector>* dys) {
  double l = 0;
  if (dys) dys->assign(ys.size(), Vector());
  for (std::size_t t = 0; t < ys.size(); ++t) {
    for (std::size_t i = 0; i < ys[t].size(); ++i) l += ys[t][i] * ws[t][i];
    if (dys) (*dys)[t] = ws[t];
  }
  return l;
}

}  // namespace

TEST_SUITE("encoder") {

TEST_CASE("zero lstm stays at zero") {
  LstmParams p("l", 3, 2);
  const LstmState s = lstm_step(p, Vector{1, 2, 3}, Vector{0, 0}, Vector{0, 0});
  CHECK(s.h == Vector{0, 0});
  CHECK(s.c == Vector{0, 0});
}

TEST_CASE("saturated forget gate keeps the cell") {
  LstmParams p("l", 3, 2);
  for (std::size_t r = 2; r < 4; ++r) p.bias.value[r] = 50.0;
  const LstmState s = lstm_step(p, Vector{1, -1, 0.5}, Vector{0.2, 0.1}, Vector{0.7, -0.3});
  CHECK(std::abs(s.c[0] - 0.7) < 1e-9);
  CHECK(std::abs(s.c[1] + 0.3) < 1e-9);
}

TEST_CASE("lstm step matches gate formulas") {
  LstmParams p("l", 3, 2);
  const double wi[8][3] = {{0.1, -0.2, 0.3}, {0.05, 0.4, -0.1}, {-0.3, 0.2, 0.1},
                           {0.25, -0.15, 0.05}, {0.2, 0.1, -0.4}, {-0.1, -0.3, 0.2},
                           {0.3, 0.05, 0.1}, {-0.2, 0.15, 0.35}};
  const double wr[8][2] = {{0.1, -0.05}, {0.2, 0.1}, {-0.1, 0.3}, {0.05, -0.2},
                           {0.15, 0.1}, {-0.25, 0.05}, {0.1, 0.1}, {0.0, -0.1}};
  const double b[8] = {0.0, 0.1, 1.0, 1.0, -0.1, 0.2, 0.05, -0.05};
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t c = 0; c < 3; ++c) p.w_input.value(r, c) = wi[r][c];
    for (std::size_t c = 0; c < 2; ++c) p.w_recurrent.value(r, c) = wr[r][c];
    p.bias.value[r] = b[r];
  }
  const LstmState s = lstm_step(p, Vector{0.5, -1.0, 2.0}, Vector{0.3, -0.2}, Vector{0.1, 0.4});
  CHECK(std::abs(s.h[0] - -0.23917206889580866) < 1e-14);
  CHECK(std::abs(s.h[1] - 0.3135798893669712) < 1e-14);
  CHECK(std::abs(s.c[0] - -0.4308563916659876) < 1e-14);
  CHECK(std::abs(s.c[1] - 0.5758143481145926) < 1e-14);
}

TEST_CASE("lstm shape errors") {
  LstmParams p("l", 3, 2);
  CHECK_THROWS_AS(lstm_step(p, Vector{1, 2}, Vector{0, 0}, Vector{0, 0}), DimensionError);
  CHECK_THROWS_AS(lstm_step(p, Vector{1, 2, 3}, Vector{0}, Vector{0, 0}), DimensionError);
  BiLstmLayer layer("b", 3, 2);
  CHECK_THROWS_AS(bilstm_run(layer, std::vector<Vector>{}), DimensionError);
}

TEST_CASE("init shapes and forget bias") {
  Rng rng(1);
  LstmParams p("l", 5, 3);
  p.init(rng);
  CHECK(p.w_input.value.rows() == 12);
  CHECK(p.w_input.value.cols() == 5);
  CHECK(p.w_recurrent.value.cols() == 3);
  const double limit = std::sqrt(6.0 / (12 + 5));
  for (double v : p.w_input.value.values()) CHECK(std::abs(v) <= limit);
  for (std::size_t r = 0; r < 12; ++r) CHECK(p.bias.value[r] == ((r >= 3 && r < 6) ? 1.0 : 0.0));
}

TEST_CASE("length-one bilstm equals single steps") {
  Rng rng(4);
  BiLstmLayer layer("b", 3, 2);
  layer.init(rng);
  const std::vector<Vector> xs = {{0.3, -0.1, 0.8}};
  const auto out = bilstm_run(layer, xs);
  REQUIRE(out.size() == 1);
  const LstmState f = lstm_step(layer.forward, xs[0], Vector(2), Vector(2));
  const LstmState b = lstm_step(layer.backward, xs[0], Vector(2), Vector(2));
  CHECK(out[0] == Vector{f.h[0], f.h[1], b.h[0], b.h[1]});
}

TEST_CASE("bilstm output shape at paper size") {
  Rng rng(2);
  BiLstmLayer layer("b", 343, 300);
  layer.init(rng);
  const auto out = bilstm_run(layer, random_sequence(3, 343, rng));
  CHECK(out.size() == 3);
  for (const Vector& h : out) CHECK(h.size() == 600);
}

TEST_CASE("backward half is the forward half on the reversed sequence") {
  Rng rng(6);
  BiLstmLayer layer("b", 4, 3);
  layer.init(rng);
  const auto xs = random_sequence(5, 4, rng);
  const auto out = bilstm_run(layer, xs);
  BiLstmLayer swapped = layer;
  std::swap(swapped.forward, swapped.backward);
  std::vector<Vector> rev(xs.rbegin(), xs.rend());
  const auto out_rev = bilstm_run(swapped, rev);
  for (std::size_t t = 0; t < xs.size(); ++t) {
    const Vector& a = out[t];
    const Vector& b = out_rev[xs.size() - 1 - t];
    for (std::size_t i = 0; i < 3; ++i) CHECK(a[3 + i] == b[i]);
  }
}

TEST_CASE("bilstm gradients") {
  Rng rng(8);
  BiLstmLayer layer("b", 3, 4);
  layer.init(rng);
  const auto xs = random_sequence(4, 3, rng);
  const auto ws = random_sequence(4, 8, rng);
  auto loss = [&](bool with_grad) {
    BiLstmTrace trace;
    const auto ys = bilstm_run(layer, xs, &trace);
    std::vector<Vector> dys;
    const double l = dot_loss(ys, ws, &dys);
    if (with_grad) bilstm_backward(layer, xs, trace, dys, false);
    return l;
  };
  const auto blocks = layer.parameters();
  const GradCheckReport r = finite_diff_check(loss, blocks, {.max_coords_per_block = 1000});
  INFO(r.summary());
  CHECK(r.passed());
  CHECK(r.max_relative_error < 1e-5);
}

TEST_CASE("bilstm input gradients") {
  Rng rng(10);
  BiLstmLayer layer("b", 3, 2);
  layer.init(rng);
  auto xs = random_sequence(3, 3, rng);
  const auto ws = random_sequence(3, 4, rng);
  BiLstmTrace trace;
  const auto ys = bilstm_run(layer, xs, &trace);
  std::vector<Vector> dys;
  dot_loss(ys, ws, &dys);
  const auto dxs = bilstm_backward(layer, xs, trace, dys, true);
  REQUIRE(dxs.size() == 3);
  const double h = 1e-5;
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t i = 0; i < 3; ++i) {
      const double keep = xs[t][i];
      xs[t][i] = keep + h;
      const double up = dot_loss(bilstm_run(layer, xs), ws, nullptr);
      xs[t][i] = keep - h;
      const double down = dot_loss(bilstm_run(layer, xs), ws, nullptr);
      xs[t][i] = keep;
      CHECK(std::abs((up - down) / (2 * h) - dxs[t][i]) < 1e-7);
    }
  }
}

TEST_CASE("max pool basics") {
  const std::vector<Vector> hs = {{1, 5}, {3, 2}, {0, 9}};
  CHECK(du_maxpool(hs, {0, 1}) == Vector{3, 5});
  CHECK(du_maxpool(hs, {2, 2}) == hs[2]);
  const std::vector<Vector> permuted = {{3, 2}, {1, 5}, {0, 9}};
  CHECK(du_maxpool(permuted, {0, 1}) == Vector{3, 5});
  CHECK_THROWS_AS(du_maxpool(hs, {1, 3}), DimensionError);
  CHECK_THROWS_AS(du_maxpool(hs, {2, 1}), DimensionError);
}

TEST_CASE("max pool ties go to the first position") {
  const std::vector<Vector> hs = {{2, 1}, {2, 4}};
  std::vector<std::size_t> argmax;
  du_maxpool(hs, {0, 1}, &argmax);
  CHECK(argmax == std::vector<std::size_t>{0, 1});
  std::vector<Vector> d(2, Vector(2, 0.0));
  du_maxpool_backward(Vector{1.0, 1.0}, argmax, d);
  CHECK(d[0] == Vector{1, 0});
  CHECK(d[1] == Vector{0, 1});
}

TEST_CASE("max pool dominance and subgradient") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto hs = random_sequence(5, 4, rng);
    const Vector m = du_maxpool(hs, {1, 3});
    for (std::size_t j = 0; j < 4; ++j) {
      bool attained = false;
      for (std::size_t t = 1; t <= 3; ++t) {
        CHECK(m[j] >= hs[t][j]);
        attained = attained || m[j] == hs[t][j];
      }
      CHECK(attained);
    }
    std::vector<std::size_t> argmax;
    du_maxpool(hs, {1, 3}, &argmax);
    const std::size_t loser = argmax[0] == 1 ? 2 : 1;
    const double gap = m[0] - hs[loser][0];
    hs[loser][0] += gap / 2;
    CHECK(du_maxpool(hs, {1, 3}) == m);
  }
}

TEST_CASE("encode paragraph shape, determinism and context sensitivity") {
  Rng rng(12);
  EncoderStack stack(EncoderConfig{.input_dim = 14, .hidden = 5, .dropout = 0.5});
  stack.init(rng);
  EmbeddingTable table = test::small_table(8);
  std::vector<Paragraph> ps = {
      test::make_paragraph({{"a", "b"}, {"c", "d", "e"}, {"f"}},
                           {{SlotKind::Implicit, {Label::Exp}}, {SlotKind::Explicit, {Label::Comp}}}),
  };
  ps.push_back(ps[0]);
  ps[1].tokens[0].surface = "zz";
  test::bind(ps, table);
  const FeatureLayout layout = test::small_layout(8);

  Rng r1(1), r2(99);
  const auto a = encode_paragraph(stack, ps[0], table, layout, r1, false);
  const auto b = encode_paragraph(stack, ps[0], table, layout, r2, false);
  REQUIRE(a.size() == 3);
  for (const Vector& h : a) CHECK(h.size() == 10);
  CHECK(a == b);

  // Editing DU 0 changes the representation of DU 1.
  const auto edited = encode_paragraph(stack, ps[1], table, layout, r1, false);
  CHECK(edited[1] != a[1]);

  // Training mode consumes randomness.
  Rng r3(7);
  CHECK(encode_paragraph(stack, ps[0], table, layout, r3, true) != a);
}

TEST_CASE("pair encoding differs from full-paragraph pooling") {
  Rng rng(13);
  EncoderStack stack(EncoderConfig{.input_dim = 14, .hidden = 4, .dropout = 0.0});
  stack.init(rng);
  EmbeddingTable table = test::small_table(8);
  std::vector<Paragraph> ps = {test::make_paragraph(
      {{"a", "b"}, {"c"}, {"d", "e"}},
      {{SlotKind::Implicit, {Label::Exp}}, {SlotKind::Implicit, {Label::Temp}}})};
  test::bind(ps, table);
  const FeatureLayout layout = test::small_layout(8);
  Rng r(0);
  const auto pair = encode_du_pair(stack.word, stack.config, ps[0], 1, table, layout, r, false);
  const auto pooled = pool_word_level(stack.word, stack.config, ps[0], 0, 2, table, layout, r, false);
  REQUIRE(pooled.size() == 3);
  CHECK(pair[0] != pooled[1]);

  // The pair view ignores DU 0 entirely.
  Paragraph edited = ps[0];
  edited.tokens[0].word_id = table.intern("elsewhere");
  const auto pair2 = encode_du_pair(stack.word, stack.config, edited, 1, table, layout, r, false);
  CHECK(pair2[0] == pair[0]);
  CHECK(pair2[1] == pair[1]);
}

TEST_CASE("encoder gradients with pinned dropout") {
  Rng rng(14);
  EncoderStack stack(EncoderConfig{.input_dim = 11, .hidden = 3, .dropout = 0.3});
  stack.init(rng);
  EmbeddingTable table = test::small_table(5);
  std::vector<Paragraph> ps = {test::make_paragraph(
      {{"a", "b"}, {"c", "d"}, {"e"}},
      {{SlotKind::Implicit, {Label::Exp}}, {SlotKind::Implicit, {Label::Temp}}})};
  test::bind(ps, table);
  const FeatureLayout layout = test::small_layout(5);
  Rng wrng(3);
  const auto ws = random_sequence(3, 6, wrng);
  auto loss = [&](bool with_grad) {
    Rng drop(77);
    EncoderTrace trace;
    const auto reps = encode_paragraph(stack, ps[0], table, layout, drop, true, &trace);
    std::vector<Vector> d;
    const double l = dot_loss(reps, ws, &d);
    if (with_grad) encode_paragraph_backward(stack, trace, d);
    return l;
  };
  const auto blocks = stack.parameters();
  const GradCheckReport r = finite_diff_check(loss, blocks, {.max_coords_per_block = 64});
  INFO(r.summary());
  CHECK(r.passed());
}

}
