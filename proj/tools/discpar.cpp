// discpar: train, evaluate and inspect paragraph-level discourse relation models.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "discpar/config.hpp"
#include "discpar/corpus_io.hpp"
#include "discpar/embeddings.hpp"
#include "discpar/ensemble.hpp"
#include "discpar/error.hpp"
#include "discpar/metrics.hpp"
#include "discpar/model.hpp"
#include "discpar/report.hpp"
#include "discpar/synthetic.hpp"
#include "discpar/trainer.hpp"
#include "discpar/verify.hpp"

namespace fs = std::filesystem;
using namespace discpar;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kTraining = 3 };

struct ModelFlags {
  std::string config_path;
  std::string corpus;
  std::string embeddings;
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  std::string variant;
  std::optional<double> alpha;
  std::string crf;
  std::string binary;
  std::vector<std::string> overrides;  // key=value
  std::string out = "out";
};

void add_model_flags(CLI::App* app, ModelFlags& f, bool with_seeds) {
  app->add_option("--config", f.config_path, "key-value config file")->check(CLI::ExistingFile);
  app->add_option("--corpus", f.corpus, "corpus directory (train.txt, dev.txt, test.txt)")
      ->required();
  app->add_option("--embeddings", f.embeddings, "word vectors ('count dim' header)");
  app->add_option("--seed", f.seed, "random seed");
  if (with_seeds) app->add_option("--seeds", f.seeds, "seed list, e.g. --seeds 0 1 2")->delimiter(',');
  app->add_option("--variant", f.variant, "BASELINE-PAIR, BASIC-TIED, UNTIED or UNTIED+CRF");
  app->add_option("--alpha", f.alpha, "explicit loss weight");
  app->add_option("--crf", f.crf, "CRF state space")->check(CLI::IsMember({"off", "plain4", "typed8"}));
  app->add_option("--binary", f.binary, "one-vs-all target label");
  app->add_option("--set", f.overrides, "extra config field as key=value (repeatable)");
  app->add_option("--out", f.out, "output directory");
}

TrainConfig build_config(const ModelFlags& f) {
  TrainConfig c;
  if (!f.config_path.empty()) c = load_config(f.config_path);
  if (!f.variant.empty()) set_config_value(c, "variant", f.variant);
  if (f.alpha) c.alpha = *f.alpha;
  if (!f.crf.empty()) apply_crf_choice(c, f.crf);
  if (!f.binary.empty()) set_config_value(c, "binary", f.binary);
  if (f.seed) c.seed = *f.seed;
  for (const std::string& kv : f.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  c.validate();
  return c;
}

struct Loaded {
  Corpus corpus;
  EmbeddingTable table;
};

// Pretrained vectors when given; otherwise every word gets a seeded OOV draw.
Loaded load_inputs(const ModelFlags& f, TrainConfig& config) {
  Corpus corpus = load_corpus_dir(f.corpus);
  Rng oov = Rng(config.seed).fork(7);
  EmbeddingTable table = f.embeddings.empty()
                             ? EmbeddingTable(config.embedding_dim, oov)
                             : load_embeddings(f.embeddings, oov, config.embedding_dim);
  bind_vocabulary(corpus, table);
  return {std::move(corpus), std::move(table)};
}

TrainResult run_training(const TrainConfig& config, const Loaded& in) {
  if (config.binary()) return binary_mode_train(config, in.corpus, in.table);
  if (config.variant == Variant::BaselinePair) return baseline_pair_mode(config, in.corpus, in.table);
  return train(config, in.corpus, in.table);
}

void print_summary(const std::string& tag, const Metrics& m) {
  std::cout << std::fixed << std::setprecision(4) << tag << "  implicit macro-F1 "
            << m.implicit.macro_f1 << " acc " << m.implicit.accuracy << "  explicit macro-F1 "
            << m.explicit_.macro_f1 << " acc " << m.explicit_.accuracy << '\n';
  if (m.num_classes == 2) std::cout << tag << "  positive-class F1 " << positive_f1(m) << '\n';
}

int cmd_train(const ModelFlags& f) {
  TrainConfig base = build_config(f);
  const std::vector<std::uint64_t> seeds = f.seeds.empty() ? std::vector{base.seed} : f.seeds;
  double sum_f1 = 0.0;
  for (std::uint64_t seed : seeds) {
    TrainConfig config = base;
    config.seed = seed;
    Loaded in = load_inputs(f, config);
    TrainResult result = run_training(config, in);
    const fs::path dir = seeds.size() == 1 ? fs::path(f.out) : fs::path(f.out) / ("seed-" + std::to_string(seed));
    emit_report(result.report, dir);
    save_model(dir / "model.txt", result.model, in.table, in.corpus.inventories);
    const Metrics& shown = result.report.test ? *result.report.test : result.report.dev;
    print_summary("seed " + std::to_string(seed) + " (epoch " +
                      std::to_string(result.report.selected_epoch) + ")",
                  shown);
    sum_f1 += shown.implicit.macro_f1;
  }
  if (seeds.size() > 1) {
    std::cout << "mean implicit macro-F1 over " << seeds.size() << " seeds "
              << sum_f1 / static_cast<double>(seeds.size()) << '\n';
  }
  return kOk;
}

const std::vector<Paragraph>& pick_split(const Corpus& c, const std::string& split) {
  if (split == "train") return c.train;
  if (split == "dev") return c.dev;
  if (split == "test") return c.test;
  throw ConfigError("split must be train, dev or test");
}

struct ModelInputs {
  std::string model;
  std::string corpus;
  std::string split = "test";
  std::string out = "out";
};

// The snapshot carries its own inventories and vocabulary; unseen words get
// fresh OOV draws.
Corpus corpus_for(LoadedModel& loaded, const std::string& dir) {
  Corpus corpus;
  auto read = [&](const char* name, std::vector<Paragraph>& split) {
    const fs::path p = fs::path(dir) / name;
    if (fs::exists(p)) split = parse_corpus_file(p, &loaded.inventories).paragraphs;
  };
  read("train.txt", corpus.train);
  read("dev.txt", corpus.dev);
  read("test.txt", corpus.test);
  corpus.inventories = loaded.inventories;
  bind_vocabulary(corpus, loaded.table);
  return corpus;
}

int cmd_eval(const ModelInputs& o) {
  LoadedModel loaded = load_model(o.model);
  const Corpus corpus = corpus_for(loaded, o.corpus);
  const auto& split = pick_split(corpus, o.split);
  if (split.empty()) throw DataError("split '" + o.split + "' is empty or missing");
  const Metrics m = evaluate(loaded.model, split, loaded.table, true);
  emit_metrics(m, o.out);
  print_summary(o.split, m);
  return kOk;
}

std::string class_name(const TrainConfig& c, std::size_t k) {
  if (c.binary()) return k == 1 ? std::string(label_name(*c.binary_target)) : "NOT-" + std::string(label_name(*c.binary_target));
  return std::string(label_name(kAllLabels.at(k)));
}

int cmd_predict(const ModelInputs& o) {
  LoadedModel loaded = load_model(o.model);
  const Corpus corpus = corpus_for(loaded, o.corpus);
  const auto& split = pick_split(corpus, o.split);
  fs::create_directories(o.out);
  const fs::path path = fs::path(o.out) / "predictions.tsv";
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "paragraph\tslot\tkind\tgold\tpredicted\tprobabilities\n";
  out << std::setprecision(6);
  for (std::size_t p = 0; p < split.size(); ++p) {
    const auto preds = decode_paragraph(loaded.model, split[p], loaded.table);
    for (std::size_t t = 0; t < preds.size(); ++t) {
      const RelationSlot& slot = split[p].slots[t];
      out << p << '\t' << t << '\t' << kind_name(slot.kind) << '\t';
      for (std::size_t g = 0; g < slot.gold.size(); ++g) out << (g ? "|" : "") << label_name(slot.gold[g]);
      out << '\t' << class_name(loaded.model.config(), preds[t].predicted) << '\t';
      for (std::size_t k = 0; k < preds[t].probabilities.size(); ++k) {
        out << (k ? "," : "") << preds[t].probabilities[k];
      }
      out << '\n';
    }
  }
  std::cout << "wrote " << path.string() << '\n';
  return kOk;
}

int cmd_ensemble(const ModelFlags& f) {
  TrainConfig base = build_config(f);
  std::vector<std::uint64_t> seeds = f.seeds;
  if (seeds.empty()) {
    for (std::uint64_t s = 0; s < 10; ++s) seeds.push_back(s);
  }
  // The vocabulary is fixed by the first seed so every run scores the same slots.
  TrainConfig first = base;
  first.seed = seeds.front();
  Loaded in = load_inputs(f, first);
  if (in.corpus.test.empty()) throw DataError("ensemble needs a test split");
  std::vector<RunOutputs> runs;
  double sum_f1 = 0.0;
  for (std::uint64_t seed : seeds) {
    TrainConfig config = base;
    config.seed = seed;
    TrainResult result = run_training(config, in);
    runs.push_back(collect_outputs(result.model, in.corpus.test, in.table));
    sum_f1 += result.report.test->implicit.macro_f1;
    print_summary("seed " + std::to_string(seed), *result.report.test);
  }
  const auto votes = ensemble_vote(runs);
  const auto rows = reshape_predictions(in.corpus.test, votes);
  const Metrics m = score_predictions(
      in.corpus.test, rows, base.classes(),
      [&base](const RelationSlot& s) { return gold_classes(s, base); }, base.fn_attribution, true);
  emit_metrics(m, f.out);
  print_summary("ensemble", m);
  std::cout << "mean single-run implicit macro-F1 " << sum_f1 / static_cast<double>(seeds.size())
            << '\n';
  return kOk;
}

struct SynthFlags {
  SynthConfig config;
  std::uint64_t seed = 0;
  std::string regime = "connective";
  double stay = 0.8;
  std::string out = "synthetic";
};

int cmd_gen_synth(SynthFlags& s) {
  const auto regime = parse_regime(s.regime);
  if (!regime) throw ConfigError("regime must be connective, markov or context");
  s.config.regime = *regime;
  s.config.transitions = SynthConfig::sticky_transitions(s.stay);
  const Corpus corpus = gen_synthetic(s.config, s.seed);
  save_corpus_dir(corpus, s.out);
  std::cout << "wrote " << corpus.train.size() << '/' << corpus.dev.size() << '/'
            << corpus.test.size() << " paragraphs to " << s.out << '\n';
  return kOk;
}

int cmd_check(std::size_t instances, std::uint64_t seed) {
  const CrfOracleReport crf = crf_oracle_suite(instances, 6, seed);
  const bool crf_ok = crf.passed(1e-8);
  std::cout << (crf_ok ? "PASS" : "FAIL") << "  crf enumeration: " << crf.instances
            << " instances, path mismatches " << crf.path_mismatches << ", max |dlogZ| "
            << crf.max_logZ_error << '\n';

  SynthConfig sc{.train = 3, .dev = 0, .test = 0, .regime = SynthRegime::Markov};
  Corpus corpus = gen_synthetic(sc, seed);
  EmbeddingTable table(16, Rng(seed));
  bind_vocabulary(corpus, table);
  const FeatureLayout layout = feature_layout(table, corpus.inventories);
  bool grads_ok = true;
  for (Variant v : {Variant::BaselinePair, Variant::BasicTied, Variant::Untied, Variant::UntiedCrf}) {
    TrainConfig c;
    c.variant = v;
    if (v == Variant::UntiedCrf) c.crf = CrfMode::Typed8;
    c.hidden = 8;
    c.embedding_dim = 16;
    c.seed = seed;
    const GradCheckReport r = model_gradient_check(c, corpus.train, table, layout);
    grads_ok = grads_ok && r.passed();
    std::cout << (r.passed() ? "PASS" : "FAIL") << "  gradients " << variant_name(v) << ": "
              << r.summary() << '\n';
  }
  if (!crf_ok || !grads_ok) throw VerificationError("verification suite failed");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Paragraph-level discourse relation sequence labeling"};
  app.require_subcommand(1);

  ModelFlags train_flags;
  auto* train_cmd = app.add_subcommand("train", "train one model per seed");
  add_model_flags(train_cmd, train_flags, true);

  ModelFlags ens_flags;
  auto* ens_cmd = app.add_subcommand("ensemble", "train several seeds and majority-vote on test");
  add_model_flags(ens_cmd, ens_flags, true);

  ModelInputs eval_in;
  auto* eval_cmd = app.add_subcommand("eval", "score a saved model on a split");
  ModelInputs pred_in;
  auto* pred_cmd = app.add_subcommand("predict", "write per-slot predictions of a saved model");
  for (auto [cmd, in] : {std::pair{eval_cmd, &eval_in}, std::pair{pred_cmd, &pred_in}}) {
    cmd->add_option("--model", in->model, "model snapshot")->required()->check(CLI::ExistingFile);
    cmd->add_option("--corpus", in->corpus, "corpus directory")->required();
    cmd->add_option("--split", in->split, "train, dev or test");
    cmd->add_option("--out", in->out, "output directory");
  }

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("gen-synth", "write a planted-pattern synthetic corpus");
  synth_cmd->add_option("--regime", synth.regime, "connective, markov or context");
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--train", synth.config.train);
  synth_cmd->add_option("--dev", synth.config.dev);
  synth_cmd->add_option("--test", synth.config.test);
  synth_cmd->add_option("--vocab", synth.config.filler_vocab, "filler vocabulary size");
  synth_cmd->add_option("--explicit-prob", synth.config.explicit_prob);
  synth_cmd->add_option("--cue-prob", synth.config.cue_prob);
  synth_cmd->add_option("--copy-prob", synth.config.copy_prob);
  synth_cmd->add_option("--double-label-prob", synth.config.double_label_prob);
  synth_cmd->add_option("--stay", synth.stay, "Markov self-transition probability");
  synth_cmd->add_option("--out", synth.out, "output corpus directory");

  std::size_t check_instances = 200;
  std::uint64_t check_seed = 0;
  auto* check_cmd = app.add_subcommand("check", "run the CRF oracle and gradient suites");
  check_cmd->add_option("--instances", check_instances);
  check_cmd->add_option("--seed", check_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train_flags);
    if (*ens_cmd) return cmd_ensemble(ens_flags);
    if (*eval_cmd) return cmd_eval(eval_in);
    if (*pred_cmd) return cmd_predict(pred_in);
    if (*synth_cmd) return cmd_gen_synth(synth);
    if (*check_cmd) return cmd_check(check_instances, check_seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kData;
  } catch (const TrainingError& e) {
    std::cerr << "training error: " << e.what() << '\n';
    return kTraining;
  } catch (const VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return kTraining;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
