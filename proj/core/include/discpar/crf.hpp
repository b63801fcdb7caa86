#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "discpar/corpus.hpp"
#include "discpar/matrix.hpp"
#include "discpar/param.hpp"

namespace discpar {

enum class CrfMode {
  Typed8,  // (kind, label) states; off-kind states are masked per slot
  Plain4,  // label states only
};

/// Score given to states whose kind disagrees with the slot's kind.
inline constexpr double kMaskScore = -1e4;

class CrfStateSpace {
 public:
  explicit CrfStateSpace(CrfMode mode = CrfMode::Typed8) : mode_(mode) {}

  CrfMode mode() const noexcept { return mode_; }
  std::size_t size() const noexcept { return mode_ == CrfMode::Typed8 ? 2 * kNumLabels : kNumLabels; }
  /// State for (kind, label); kind is ignored in PLAIN-4.
  std::size_t state(SlotKind kind, Label label) const noexcept;
  Label label_of(std::size_t state) const noexcept;
  SlotKind kind_of(std::size_t state) const noexcept;  // Implicit in PLAIN-4

 private:
  CrfMode mode_;
};

/// transitions(a, b) scores state a followed by state b.
struct CrfParams {
  CrfParams() = default;
  explicit CrfParams(std::size_t states)
      : transitions("crf.transitions", states, states),
        start("crf.start", states, 1),
        end("crf.end", states, 1) {}

  std::size_t states() const noexcept { return transitions.value.rows(); }
  ParamRefs parameters() { return {&transitions, &start, &end}; }

  ParamBlock transitions;
  ParamBlock start;
  ParamBlock end;
};

/// T x S emission table from per-slot logits of the kind-matched head.
/// TYPED-8: state (k, l) gets logit l when k is the slot's kind, else the mask.
Matrix emissions(std::span<const Vector> logits, std::span<const SlotKind> kinds,
                 const CrfStateSpace& space);

/// Adds dE back onto per-slot logit gradients (inverse of `emissions`).
void emissions_backward(const Matrix& d_emissions, std::span<const SlotKind> kinds,
                        const CrfStateSpace& space, std::span<Vector> d_logits);

struct ViterbiResult {
  std::vector<std::size_t> states;
  double score = 0.0;
};

/// Highest-scoring state sequence; ties go to the lowest state index.
ViterbiResult viterbi(const Matrix& emission_table, const CrfParams& params);

/// Score of one state sequence.
double path_score(const Matrix& emission_table, const CrfParams& params,
                  std::span<const std::size_t> states);

/// log Σ over all sequences of exp(path score).
double forward_logZ(const Matrix& emission_table, const CrfParams& params);

using AllowedStates = std::vector<std::vector<std::size_t>>;

/// forward_logZ restricted to `allowed[t]` at each slot. Throws DataError on
/// an empty set.
double constrained_logZ(const Matrix& emission_table, const CrfParams& params,
                        const AllowedStates& allowed);

/// forward_logZ - constrained_logZ. When `d_emissions` is given it receives
/// dNLL/dE (T x S); when `accumulate_params` is set, dNLL w.r.t. transitions,
/// start and end is added to the params' gradients.
double crf_nll(const Matrix& emission_table, CrfParams& params, const AllowedStates& gold,
               Matrix* d_emissions = nullptr, bool accumulate_params = false);

}  // namespace discpar
