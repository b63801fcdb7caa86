#include "discpar/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "discpar/error.hpp"
#include "discpar/optim.hpp"

namespace discpar {

namespace {

enum Stream : std::uint64_t { kInitStream = 1, kShuffleStream = 2, kDropoutStream = 3 };

struct Window {
  std::size_t slots = 0;
  std::size_t contributing = 0;
};

void flush(Model& model, Window& window, const AdamOptions& adam, double clip) {
  const ParamRefs blocks = model.parameters();
  if (window.contributing == 0) {
    zero_gradients(blocks);
  } else {
    scale_gradients(blocks, 1.0 / static_cast<double>(window.contributing));
    clip_global_norm(blocks, clip);
    adam_step(blocks, adam);
  }
  window = {};
}

}  // namespace

TrainResult train(const TrainConfig& config, const Corpus& corpus, const EmbeddingTable& table) {
  config.validate();
  if (corpus.train.empty()) throw DataError("train: empty training split");
  const auto started = std::chrono::steady_clock::now();

  const Rng base(config.seed);
  Rng init_rng = base.fork(kInitStream);
  Rng shuffle_rng = base.fork(kShuffleStream);
  Rng dropout_rng = base.fork(kDropoutStream);

  Model model(config, feature_layout(table, corpus.inventories));
  model.init(init_rng);
  zero_gradients(model.parameters());

  const AdamOptions adam{config.learning_rate, config.adam_beta1, config.adam_beta2,
                         config.adam_epsilon};

  RunReport report;
  report.config = config;
  report.seed = config.seed;
  Model best = model;
  bool have_best = false;
  double best_f1 = 0.0;
  std::size_t since_best = 0;

  std::vector<std::size_t> order(corpus.train.size());
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle_rng.shuffle(std::span<std::size_t>(order));

    Window window;
    double epoch_loss = 0.0;
    std::size_t steps = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const Paragraph& p = corpus.train[order[i]];
      const ParagraphLoss pl = paragraph_loss(model, p, table, dropout_rng, true, true);
      if (!std::isfinite(pl.loss)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                            std::to_string(steps + 1));
      }
      epoch_loss += pl.loss;
      window.slots += p.slots.size();
      window.contributing += pl.contributing_slots;
      if (window.slots >= config.window || i + 1 == order.size()) {
        try {
          flush(model, window, adam, config.clip);
        } catch (const TrainingError& e) {
          throw TrainingError(std::string(e.what()) + " at epoch " + std::to_string(epoch) +
                              ", step " + std::to_string(steps + 1));
        }
        ++steps;
      }
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = epoch_loss;
    record.steps = steps;
    record.dev = evaluate(model, corpus.dev, table);
    const double f1 = record.dev.implicit.macro_f1;
    report.epochs.push_back(record);
    if (!have_best || f1 > best_f1) {
      best = model;
      best_f1 = f1;
      have_best = true;
      report.selected_epoch = epoch;
      report.dev = record.dev;
      since_best = 0;
    } else if (config.patience > 0 && ++since_best >= config.patience) {
      break;
    }
  }

  if (have_best) model = best;
  if (!have_best) report.dev = evaluate(model, corpus.dev, table);
  if (!corpus.test.empty()) report.test = evaluate(model, corpus.test, table, true);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return {std::move(model), std::move(report)};
}

TrainResult binary_mode_train(const TrainConfig& config, const Corpus& corpus,
                              const EmbeddingTable& table) {
  if (!config.binary_target) throw ConfigError("binary mode needs a target label");
  if (config.uses_crf()) throw ConfigError("binary mode does not support the CRF layer");
  return train(config, corpus, table);
}

TrainResult baseline_pair_mode(const TrainConfig& config, const Corpus& corpus,
                               const EmbeddingTable& table) {
  if (config.variant != Variant::BaselinePair) {
    throw ConfigError("baseline mode needs variant BASELINE-PAIR, got " +
                      std::string(variant_name(config.variant)));
  }
  return train(config, corpus, table);
}

double positive_f1(const Metrics& metrics) {
  if (metrics.num_classes != 2 || metrics.implicit.classes.size() != 2) {
    throw DataError("positive_f1: metrics are not binary");
  }
  return metrics.implicit.classes[1].f1;
}

}  // namespace discpar
