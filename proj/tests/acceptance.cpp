// Acceptance suite: one PASS/FAIL line per criterion.
//
//   discpar_acceptance            run every criterion
//   discpar_acceptance 1 4 9      run the listed criteria

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "discpar/corpus_io.hpp"
#include "discpar/ensemble.hpp"
#include "discpar/metrics.hpp"
#include "discpar/model.hpp"
#include "discpar/report.hpp"
#include "discpar/synthetic.hpp"
#include "discpar/trainer.hpp"
#include "discpar/verify.hpp"

using namespace discpar;

namespace {

// Desk-scale model used by the learning criteria (5-8): paper hyperparameters
// except for the hidden size.
constexpr std::size_t kHidden = 32;
constexpr std::size_t kEpochs = 30;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream out;
  out << std::setprecision(precision) << v;
  return out.str();
}

struct Synth {
  Corpus corpus;
  EmbeddingTable table;
};

Synth make_synth(const SynthConfig& config, std::uint64_t seed) {
  Synth s{gen_synthetic(config, seed), EmbeddingTable(kDefaultWordDim, Rng(seed).fork(7))};
  bind_vocabulary(s.corpus, s.table);
  return s;
}

TrainConfig learning_config(Variant variant, std::uint64_t seed) {
  TrainConfig c;
  c.variant = variant;
  if (variant == Variant::UntiedCrf) c.crf = CrfMode::Typed8;
  c.hidden = kHidden;
  c.max_epochs = kEpochs;
  c.seed = seed;
  return c;
}

double test_implicit_f1(const TrainConfig& config, const Synth& s) {
  const TrainResult r = train(config, s.corpus, s.table);
  return r.report.test->implicit.macro_f1;
}

Outcome crf_enumeration() {
  const CrfOracleReport r = crf_oracle_suite(200, 6, 2024);
  const bool pass = r.passed(1e-8) && r.seconds < 30.0;
  return {pass, std::to_string(r.instances) + " instances, path mismatches " +
                    std::to_string(r.path_mismatches) + ", max errors score " +
                    fmt(r.max_score_error) + " logZ " + fmt(r.max_logZ_error) + " constrained " +
                    fmt(r.max_constrained_error) + " (tol 1e-8), " + fmt(r.seconds, 3) + " s"};
}

Outcome gradient_check() {
  const auto started = std::chrono::steady_clock::now();
  // Three paragraphs with at least two slots each, so transitions are exercised.
  Corpus pool = gen_synthetic(SynthConfig{.train = 40, .dev = 0, .test = 0, .regime = SynthRegime::Markov}, 11);
  std::vector<Paragraph> picked;
  for (const Paragraph& p : pool.train) {
    if (p.slots.size() >= 2 && picked.size() < 3) picked.push_back(p);
  }
  EmbeddingTable table(kDefaultWordDim, Rng(11));
  bind_vocabulary(picked, table);
  TrainConfig c;
  c.variant = Variant::UntiedCrf;
  c.crf = CrfMode::Typed8;
  c.hidden = 8;
  c.seed = 3;
  GradCheckOptions opts;
  opts.step = 1e-4;
  opts.tolerance = 1e-3;
  opts.max_coords_per_block = 256;
  const GradCheckReport r =
      model_gradient_check(c, picked, table, feature_layout(table, pool.inventories), opts);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::size_t checked_blocks = 0;
  for (const BlockCheck& b : r.blocks) checked_blocks += b.checked > 0 ? 1 : 0;
  const bool pass = r.passed() && r.max_relative_error < 1e-3 && checked_blocks == r.blocks.size() &&
                    secs < 120.0;
  return {pass, std::to_string(r.coordinates_checked) + " coordinates in " +
                    std::to_string(checked_blocks) + " blocks, max relative error " +
                    fmt(r.max_relative_error) + " (tol 1e-3), " + fmt(secs, 3) + " s"};
}

Outcome factorization() {
  Synth s = make_synth(SynthConfig{.train = 0, .dev = 0, .test = 200, .regime = SynthRegime::Markov}, 5);
  const FeatureLayout layout = feature_layout(s.table, s.corpus.inventories);
  double max_gap = 0.0;
  bool metrics_equal = true;
  for (CrfMode mode : {CrfMode::Typed8, CrfMode::Plain4}) {
    TrainConfig plain = learning_config(Variant::Untied, 1);
    TrainConfig crf = learning_config(Variant::UntiedCrf, 1);
    crf.crf = mode;
    Model a(plain, layout), b(crf, layout);
    Rng ra(1), rb(1);
    a.init(ra);
    b.init(rb);
    for (const Paragraph& p : s.corpus.test) {
      Rng unused(0);
      const double la = paragraph_loss(a, p, s.table, unused, false, false).loss;
      const double lb = paragraph_loss(b, p, s.table, unused, false, false).loss;
      max_gap = std::max(max_gap, std::abs(la - lb));
    }
    metrics_equal = metrics_equal && evaluate(a, s.corpus.test, s.table, true) ==
                                         evaluate(b, s.corpus.test, s.table, true);
  }
  return {max_gap <= 1e-9 && metrics_equal,
          "max |crf_nll - sum slot losses| " + fmt(max_gap) + " (tol 1e-9) over 200 paragraphs x 2 "
          "state spaces; init metrics equal: " + (metrics_equal ? "yes" : "no")};
}

Outcome alpha_variant() {
  Synth s = make_synth(SynthConfig{.train = 150, .dev = 20, .test = 0}, 6);
  auto explicit_moved = [&](double alpha) {
    TrainConfig c = learning_config(Variant::Untied, 4);
    c.hidden = 8;
    c.max_epochs = 2;
    c.alpha = alpha;
    TrainResult r = train(c, s.corpus, s.table);
    Model fresh(c, feature_layout(s.table, s.corpus.inventories));
    Rng init = Rng(c.seed).fork(1);
    fresh.init(init);
    HeadParams& before = fresh.heads.explicit_head();
    HeadParams& after = r.model.heads.explicit_head();
    return !(before.weight.value == after.weight.value && before.bias.value == after.bias.value);
  };
  const bool zero_moved = explicit_moved(0.0);
  const bool one_moved = explicit_moved(1.0);
  return {!zero_moved && one_moved, std::string("alpha=0 explicit head ") +
                                        (zero_moved ? "changed" : "bitwise unchanged") +
                                        "; alpha=1 explicit head " + (one_moved ? "changed" : "unchanged")};
}

Outcome learnability() {
  const auto started = std::chrono::steady_clock::now();
  Synth s = make_synth(SynthConfig{.regime = SynthRegime::ConnectiveOnly}, 1);
  const TrainResult r = train(learning_config(Variant::Untied, 0), s.corpus, s.table);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  const Metrics& m = *r.report.test;
  const bool pass = m.explicit_.accuracy >= 0.98 && m.implicit.accuracy >= 0.90 &&
                    r.report.epochs.size() <= 30 && secs < 900.0;
  return {pass, "test explicit acc " + fmt(m.explicit_.accuracy) + " (>= 0.98), implicit acc " +
                    fmt(m.implicit.accuracy) + " (>= 0.90), selected epoch " +
                    std::to_string(r.report.selected_epoch) + "/" +
                    std::to_string(r.report.epochs.size()) + ", " + fmt(secs, 4) + " s"};
}

Outcome paired_gap(const SynthConfig& config, Variant better, Variant worse, double margin,
                   std::uint64_t corpus_seed) {
  Synth s = make_synth(config, corpus_seed);
  double sum_better = 0.0;
  double sum_worse = 0.0;
  std::string per_seed;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const double b = test_implicit_f1(learning_config(better, seed), s);
    const double w = test_implicit_f1(learning_config(worse, seed), s);
    sum_better += b;
    sum_worse += w;
    per_seed += " " + fmt(b, 3) + "/" + fmt(w, 3);
  }
  const double gap = (sum_better - sum_worse) / 5.0;
  return {gap >= margin, std::string(variant_name(better)) + " " + fmt(sum_better / 5.0) + " vs " +
                             std::string(variant_name(worse)) + " " + fmt(sum_worse / 5.0) +
                             ", gap " + fmt(gap) + " (>= " + fmt(margin) + "); per seed" + per_seed};
}

SynthConfig markov_config() {
  SynthConfig c;
  c.regime = SynthRegime::Markov;
  c.cue_prob = 0.5;
  return c;
}

Outcome context_gap() {
  SynthConfig c;
  c.regime = SynthRegime::Context;
  return paired_gap(c, Variant::Untied, Variant::BaselinePair, 0.05, 3);
}

Outcome crf_gain() { return paired_gap(markov_config(), Variant::UntiedCrf, Variant::Untied, 0.02, 2); }

Outcome ensemble_gain() {
  Synth s = make_synth(markov_config(), 4);
  std::vector<RunOutputs> runs;
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TrainResult r = train(learning_config(Variant::Untied, seed), s.corpus, s.table);
    sum += r.report.test->implicit.macro_f1;
    runs.push_back(collect_outputs(r.model, s.corpus.test, s.table));
  }
  const auto votes = ensemble_vote(runs);
  const Metrics m = score_predictions(s.corpus.test, reshape_predictions(s.corpus.test, votes),
                                      kNumLabels, label_gold());
  const double mean = sum / 10.0;
  return {m.implicit.macro_f1 >= mean, "10-seed vote macro-F1 " + fmt(m.implicit.macro_f1) +
                                           " vs mean single run " + fmt(mean)};
}

Outcome determinism_and_formats() {
  std::vector<std::string> failures;
  // Same seed, same report.
  Synth s = make_synth(SynthConfig{.train = 60, .dev = 20, .test = 20, .regime = SynthRegime::Markov}, 8);
  TrainConfig c = learning_config(Variant::UntiedCrf, 9);
  c.hidden = 8;
  c.max_epochs = 2;
  const TrainResult a = train(c, s.corpus, s.table);
  const TrainResult b = train(c, s.corpus, s.table);
  RunReport ra = a.report, rb = b.report;
  ra.wall_seconds = rb.wall_seconds = 0.0;
  if (report_to_json(ra) != report_to_json(rb)) failures.push_back("reports differ");
  const auto pa = const_cast<Model&>(a.model).parameters();
  const auto pb = const_cast<Model&>(b.model).parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (!(pa[i]->value == pb[i]->value)) failures.push_back("parameters differ: " + pa[i]->name);
  }

  // Corpus round trip.
  const Corpus corpus = gen_synthetic(SynthConfig{.train = 300, .dev = 50, .test = 50, .double_label_prob = 0.2}, 12);
  const auto dir = std::filesystem::temp_directory_path() / "discpar_acceptance_c9";
  std::filesystem::remove_all(dir);
  save_corpus_dir(corpus, dir);
  const Corpus back = load_corpus_dir(dir);
  if (!(back.train == corpus.train && back.dev == corpus.dev && back.test == corpus.test &&
        back.inventories == corpus.inventories)) {
    failures.push_back("corpus round trip");
  }

  // Metrics round trip.
  const Metrics& m = *a.report.test;
  emit_metrics(m, dir / "metrics");
  if (!(load_metrics(dir / "metrics" / "metrics.json") == m)) failures.push_back("metrics round trip");

  // DU-count distribution.
  const Corpus big = gen_synthetic(SynthConfig{.train = 10000, .dev = 0, .test = 0}, 13);
  std::array<double, 5> freq{};
  for (const Paragraph& p : big.train) freq[bucket_of(p.du_count())] += 1.0 / 10000.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < 5; ++k) worst = std::max(worst, std::abs(freq[k] - kDuCountDistribution[k]));
  if (worst > 0.02) failures.push_back("DU distribution off by " + fmt(worst));
  std::filesystem::remove_all(dir);

  std::string detail = "same-seed reports and parameters identical, corpus and metrics round trips, "
                       "DU-count max deviation " + fmt(worst, 3) + " (<= 0.02)";
  for (const std::string& f : failures) detail += "; FAILED " + f;
  return {failures.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "CRF oracle equivalence", crf_enumeration},
      {2, "gradient verification", gradient_check},
      {3, "factorization identity", factorization},
      {4, "alpha=0 variant", alpha_variant},
      {5, "synthetic learnability", learnability},
      {6, "context-dependence separation", context_gap},
      {7, "CRF pattern gain", crf_gain},
      {8, "ensemble property", ensemble_gain},
      {9, "determinism and round trips", determinism_and_formats},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  bool ok = true;
  for (const Criterion& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  C" << c.id << " " << c.name << ": " << o.detail
              << std::endl;
    ok = ok && o.pass;
  }
  return ok ? 0 : 1;
}
