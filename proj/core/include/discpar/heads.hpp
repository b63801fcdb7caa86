#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "discpar/corpus.hpp"
#include "discpar/param.hpp"
#include "discpar/rng.hpp"

namespace discpar {

/// Affine classifier over [hDU_prev, hDU_cur].
struct HeadParams {
  HeadParams() = default;
  HeadParams(const std::string& name, std::size_t classes, std::size_t input_dim)
      : weight(name + ".weight", classes, input_dim), bias(name + ".bias", classes, 1) {}

  std::size_t classes() const noexcept { return weight.value.rows(); }
  std::size_t input_dim() const noexcept { return weight.value.cols(); }

  ParamBlock weight;
  ParamBlock bias;
};

enum class HeadMode { Tied, Untied };

/// One shared head (TIED) or separate implicit and explicit heads (UNTIED).
class HeadSet {
 public:
  HeadSet() = default;
  HeadSet(HeadMode mode, std::size_t classes, std::size_t input_dim);

  void init(Rng& rng);
  HeadMode mode() const noexcept { return mode_; }
  std::size_t classes() const noexcept { return heads_.front().classes(); }

  HeadParams& head_for(SlotKind kind);
  const HeadParams& head_for(SlotKind kind) const;
  HeadParams& tied() { return heads_.at(0); }
  HeadParams& implicit_head() { return heads_.at(0); }
  HeadParams& explicit_head();

  ParamRefs parameters();

 private:
  HeadMode mode_ = HeadMode::Tied;
  std::vector<HeadParams> heads_;
};

/// Logits of the head serving `kind` applied to [prev, cur].
Vector slot_logits(const HeadSet& heads, std::span<const double> prev, std::span<const double> cur,
                   SlotKind kind);

/// Accumulates head gradients and adds d(prev), d(cur) into the given spans.
void slot_logits_backward(HeadSet& heads, std::span<const double> prev,
                          std::span<const double> cur, SlotKind kind,
                          std::span<const double> d_logits, std::span<double> d_prev,
                          std::span<double> d_cur);

enum class DoubleLabelLoss {
  Marginal,  // -log Σ_{g∈gold} p_g
  SumCe,     // Σ_{g∈gold} -log p_g
};

/// Loss of one slot against gold class indices (1 or 2 distinct). When
/// `d_logits` is given it receives the gradient w.r.t. the logits.
double slot_loss(std::span<const double> logits, std::span<const std::size_t> gold,
                 Vector* d_logits = nullptr, DoubleLabelLoss rule = DoubleLabelLoss::Marginal);

struct LossWeights {
  double alpha = 1.0;
};

struct SlotLoss {
  SlotKind kind = SlotKind::Implicit;
  double value = 0.0;
};

/// Σ implicit losses + α · Σ explicit losses.
double combined_loss(std::span<const SlotLoss> losses, const LossWeights& weights);

}  // namespace discpar
