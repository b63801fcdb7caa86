#include "discpar/crf.hpp"

#include <cmath>
#include <limits>

#include "discpar/error.hpp"
#include "discpar/ops.hpp"

namespace discpar {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_shapes(const Matrix& e, const CrfParams& params) {
  const std::size_t s = params.states();
  if (e.rows() == 0) throw DimensionError("crf: emission table has no slots");
  if (e.cols() != s || params.transitions.value.cols() != s || params.start.value.rows() != s ||
      params.end.value.rows() != s) {
    throw DimensionError("crf: emission table has " + std::to_string(e.cols()) +
                         " states, parameters have " + std::to_string(s));
  }
}

/// Forward and backward log-messages, optionally restricted to allowed states.
struct Lattice {
  Matrix alpha;
  Matrix beta;
  double log_z = 0.0;
};

Lattice run_lattice(const Matrix& e, const CrfParams& params, const AllowedStates* allowed,
                    bool with_beta) {
  const std::size_t T = e.rows();
  const std::size_t S = e.cols();
  const Matrix& trans = params.transitions.value;
  std::vector<char> ok(T * S, 1);
  if (allowed != nullptr) {
    if (allowed->size() != T) throw DataError("crf: allowed sets do not match the slot count");
    std::fill(ok.begin(), ok.end(), 0);
    for (std::size_t t = 0; t < T; ++t) {
      if ((*allowed)[t].empty()) {
        throw DataError("crf: empty allowed state set at slot " + std::to_string(t));
      }
      for (std::size_t s : (*allowed)[t]) {
        if (s >= S) throw DataError("crf: allowed state out of range");
        ok[t * S + s] = 1;
      }
    }
  }
  Lattice lat{Matrix(T, S, kNegInf), Matrix(), 0.0};
  Vector terms(S);
  for (std::size_t s = 0; s < S; ++s) {
    if (ok[s]) lat.alpha(0, s) = params.start.value[s] + e(0, s);
  }
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      if (!ok[t * S + s]) continue;
      for (std::size_t p = 0; p < S; ++p) terms[p] = lat.alpha(t - 1, p) + trans(p, s);
      lat.alpha(t, s) = e(t, s) + logsumexp(terms);
    }
  }
  for (std::size_t s = 0; s < S; ++s) terms[s] = lat.alpha(T - 1, s) + params.end.value[s];
  lat.log_z = logsumexp(terms);

  if (with_beta) {
    lat.beta = Matrix(T, S, kNegInf);
    for (std::size_t s = 0; s < S; ++s) {
      if (ok[(T - 1) * S + s]) lat.beta(T - 1, s) = params.end.value[s];
    }
    for (std::size_t t = T - 1; t-- > 0;) {
      for (std::size_t s = 0; s < S; ++s) {
        if (!ok[t * S + s]) continue;
        for (std::size_t n = 0; n < S; ++n) {
          terms[n] = trans(s, n) + e(t + 1, n) + lat.beta(t + 1, n);
        }
        lat.beta(t, s) = logsumexp(terms);
      }
    }
  }
  return lat;
}

/// Adds sign · (expected sufficient statistics) of the lattice.
void add_expectations(const Matrix& e, const CrfParams& params, const Lattice& lat, double sign,
                      Matrix* d_e, CrfParams* grads) {
  const std::size_t T = e.rows();
  const std::size_t S = e.cols();
  const Matrix& trans = params.transitions.value;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      const double a = lat.alpha(t, s);
      if (a == kNegInf) continue;
      const double marginal = std::exp(a + lat.beta(t, s) - lat.log_z);
      if (d_e != nullptr) (*d_e)(t, s) += sign * marginal;
      if (grads != nullptr) {
        if (t == 0) grads->start.grad[s] += sign * marginal;
        if (t == T - 1) grads->end.grad[s] += sign * marginal;
      }
    }
  }
  if (grads == nullptr) return;
  for (std::size_t t = 0; t + 1 < T; ++t) {
    for (std::size_t p = 0; p < S; ++p) {
      const double a = lat.alpha(t, p);
      if (a == kNegInf) continue;
      for (std::size_t n = 0; n < S; ++n) {
        const double b = lat.beta(t + 1, n);
        if (b == kNegInf) continue;
        grads->transitions.grad(p, n) +=
            sign * std::exp(a + trans(p, n) + e(t + 1, n) + b - lat.log_z);
      }
    }
  }
}

}  // namespace

std::size_t CrfStateSpace::state(SlotKind kind, Label label) const noexcept {
  const std::size_t l = label_index(label);
  return mode_ == CrfMode::Typed8 ? static_cast<std::size_t>(kind) * kNumLabels + l : l;
}

Label CrfStateSpace::label_of(std::size_t state) const noexcept {
  return static_cast<Label>(state % kNumLabels);
}

SlotKind CrfStateSpace::kind_of(std::size_t state) const noexcept {
  if (mode_ == CrfMode::Plain4) return SlotKind::Implicit;
  return state < kNumLabels ? SlotKind::Implicit : SlotKind::Explicit;
}

Matrix emissions(std::span<const Vector> logits, std::span<const SlotKind> kinds,
                 const CrfStateSpace& space) {
  if (logits.size() != kinds.size()) {
    throw ConfigError("emissions: " + std::to_string(logits.size()) + " logit rows for " +
                      std::to_string(kinds.size()) + " slot kinds");
  }
  const std::size_t S = space.size();
  Matrix table(logits.size(), S, space.mode() == CrfMode::Typed8 ? kMaskScore : 0.0);
  for (std::size_t t = 0; t < logits.size(); ++t) {
    if (logits[t].size() != kNumLabels) {
      throw ConfigError("emissions: CRF needs " + std::to_string(kNumLabels) +
                        " logits per slot, got " + std::to_string(logits[t].size()));
    }
    for (Label l : kAllLabels) table(t, space.state(kinds[t], l)) = logits[t][label_index(l)];
  }
  return table;
}

void emissions_backward(const Matrix& d_emissions, std::span<const SlotKind> kinds,
                        const CrfStateSpace& space, std::span<Vector> d_logits) {
  for (std::size_t t = 0; t < kinds.size(); ++t) {
    for (Label l : kAllLabels) {
      d_logits[t][label_index(l)] += d_emissions(t, space.state(kinds[t], l));
    }
  }
}

ViterbiResult viterbi(const Matrix& e, const CrfParams& params) {
  check_shapes(e, params);
  const std::size_t T = e.rows();
  const std::size_t S = e.cols();
  const Matrix& trans = params.transitions.value;
  Matrix score(T, S);
  std::vector<std::size_t> back(T * S, 0);
  for (std::size_t s = 0; s < S; ++s) score(0, s) = params.start.value[s] + e(0, s);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      std::size_t best = 0;
      double best_score = score(t - 1, 0) + trans(0, s);
      for (std::size_t p = 1; p < S; ++p) {
        const double cand = score(t - 1, p) + trans(p, s);
        if (cand > best_score) {
          best_score = cand;
          best = p;
        }
      }
      score(t, s) = best_score + e(t, s);
      back[t * S + s] = best;
    }
  }
  ViterbiResult result;
  std::size_t last = 0;
  result.score = score(T - 1, 0) + params.end.value[0];
  for (std::size_t s = 1; s < S; ++s) {
    const double cand = score(T - 1, s) + params.end.value[s];
    if (cand > result.score) {
      result.score = cand;
      last = s;
    }
  }
  result.states.assign(T, 0);
  result.states[T - 1] = last;
  for (std::size_t t = T - 1; t > 0; --t) result.states[t - 1] = back[t * S + result.states[t]];
  return result;
}

double path_score(const Matrix& e, const CrfParams& params, std::span<const std::size_t> states) {
  check_shapes(e, params);
  if (states.size() != e.rows()) throw DimensionError("path_score: path length differs from T");
  double total = params.start.value[states[0]] + params.end.value[states.back()];
  for (std::size_t t = 0; t < states.size(); ++t) {
    total += e(t, states[t]);
    if (t > 0) total += params.transitions.value(states[t - 1], states[t]);
  }
  return total;
}

double forward_logZ(const Matrix& e, const CrfParams& params) {
  check_shapes(e, params);
  return run_lattice(e, params, nullptr, false).log_z;
}

double constrained_logZ(const Matrix& e, const CrfParams& params, const AllowedStates& allowed) {
  check_shapes(e, params);
  return run_lattice(e, params, &allowed, false).log_z;
}

double crf_nll(const Matrix& e, CrfParams& params, const AllowedStates& gold, Matrix* d_emissions,
               bool accumulate_params) {
  check_shapes(e, params);
  const bool want_grad = d_emissions != nullptr || accumulate_params;
  const Lattice all = run_lattice(e, params, nullptr, want_grad);
  const Lattice constrained = run_lattice(e, params, &gold, want_grad);
  if (d_emissions != nullptr) *d_emissions = Matrix(e.rows(), e.cols());
  if (want_grad) {
    CrfParams* grads = accumulate_params ? &params : nullptr;
    add_expectations(e, params, all, 1.0, d_emissions, grads);
    add_expectations(e, params, constrained, -1.0, d_emissions, grads);
  }
  return all.log_z - constrained.log_z;
}

}  // namespace discpar
