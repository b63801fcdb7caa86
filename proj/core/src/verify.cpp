#include "discpar/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "discpar/model.hpp"

namespace discpar {

namespace {

double enum_score(const Matrix& e, const CrfParams& p, const std::vector<std::size_t>& path) {
  double s = p.start.value[path.front()] + p.end.value[path.back()];
  for (std::size_t t = 0; t < path.size(); ++t) {
    s += e(t, path[t]);
    if (t > 0) s += p.transitions.value(path[t - 1], path[t]);
  }
  return s;
}

// Odometer step; false once every sequence has been visited.
bool advance(std::vector<std::size_t>& path, std::size_t states) {
  for (std::size_t t = path.size(); t > 0; --t) {
    if (++path[t - 1] < states) return true;
    path[t - 1] = 0;
  }
  return false;
}

double naive_lse(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

}  // namespace

CrfEnumeration enumerate_crf(const Matrix& emissions, const CrfParams& params,
                             const AllowedStates& allowed) {
  const std::size_t slots = emissions.rows();
  CrfEnumeration out;
  std::vector<double> all;
  std::vector<double> kept;
  std::vector<std::size_t> path(slots, 0);
  do {
    const double s = enum_score(emissions, params, path);
    all.push_back(s);
    if (s > out.best_score) {
      out.best_score = s;
      out.best_path = path;
    }
    bool ok = true;
    for (std::size_t t = 0; t < slots && ok; ++t) {
      ok = std::find(allowed[t].begin(), allowed[t].end(), path[t]) != allowed[t].end();
    }
    if (ok) kept.push_back(s);
  } while (advance(path, emissions.cols()));
  out.logZ = naive_lse(all);
  out.constrained_logZ = naive_lse(kept);
  return out;
}

CrfInstance random_crf_instance(Rng& rng, std::size_t slots, std::size_t states, double scale) {
  CrfInstance inst{Matrix(slots, states), CrfParams(states), AllowedStates(slots)};
  for (double& v : inst.emissions.values()) v = rng.uniform(-scale, scale);
  for (ParamBlock* b : inst.params.parameters()) {
    for (double& v : b->value.values()) v = rng.uniform(-scale, scale);
  }
  for (auto& set : inst.allowed) {
    const std::size_t first = rng.below(states);
    set.push_back(first);
    if (states > 1 && rng.bernoulli(0.5)) set.push_back((first + 1 + rng.below(states - 1)) % states);
  }
  return inst;
}

CrfOracleReport crf_oracle_suite(std::size_t instances, std::size_t max_slots, std::uint64_t seed) {
  const auto started = std::chrono::steady_clock::now();
  Rng rng(seed);
  CrfOracleReport report;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t slots = 1 + rng.below(max_slots);
    const std::size_t states = i % 2 == 0 ? 4 : 8;
    CrfInstance inst = random_crf_instance(rng, slots, states, 3.0);
    const CrfEnumeration oracle = enumerate_crf(inst.emissions, inst.params, inst.allowed);
    const ViterbiResult v = viterbi(inst.emissions, inst.params);
    if (v.states != oracle.best_path) ++report.path_mismatches;
    report.max_score_error = std::max(report.max_score_error, std::abs(v.score - oracle.best_score));
    report.max_logZ_error = std::max(
        report.max_logZ_error, std::abs(forward_logZ(inst.emissions, inst.params) - oracle.logZ));
    report.max_constrained_error =
        std::max(report.max_constrained_error,
                 std::abs(constrained_logZ(inst.emissions, inst.params, inst.allowed) -
                          oracle.constrained_logZ));
    ++report.instances;
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

GradCheckReport model_gradient_check(const TrainConfig& config,
                                     std::span<const Paragraph> paragraphs,
                                     const EmbeddingTable& table, const FeatureLayout& layout,
                                     const GradCheckOptions& options) {
  Model model(config, layout);
  Rng init = Rng(config.seed).fork(1);
  model.init(init);
  if (model.crf) {
    for (ParamBlock* b : model.crf->parameters()) {
      for (double& v : b->value.values()) v = init.uniform(-0.5, 0.5);
    }
  }
  auto loss = [&](bool with_grad) {
    double total = 0.0;
    for (std::size_t i = 0; i < paragraphs.size(); ++i) {
      Rng dropout_rng = Rng(config.seed).fork(100 + i);
      total += paragraph_loss(model, paragraphs[i], table, dropout_rng, true, with_grad).loss;
    }
    return total;
  };
  const ParamRefs blocks = model.parameters();
  return finite_diff_check(loss, blocks, options);
}

}  // namespace discpar
