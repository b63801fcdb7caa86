#include "discpar/heads.hpp"

#include <algorithm>
#include <cmath>

#include "discpar/error.hpp"
#include "discpar/ops.hpp"

namespace discpar {

HeadSet::HeadSet(HeadMode mode, std::size_t classes, std::size_t input_dim) : mode_(mode) {
  if (mode == HeadMode::Tied) {
    heads_.emplace_back("head.tied", classes, input_dim);
  } else {
    heads_.emplace_back("head.implicit", classes, input_dim);
    heads_.emplace_back("head.explicit", classes, input_dim);
  }
}

void HeadSet::init(Rng& rng) {
  for (HeadParams& h : heads_) {
    Matrix& w = h.weight.value;
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (double& v : w.values()) v = rng.uniform(-limit, limit);
    h.bias.value.fill(0.0);
  }
}

HeadParams& HeadSet::head_for(SlotKind kind) {
  return mode_ == HeadMode::Untied && kind == SlotKind::Explicit ? heads_[1] : heads_[0];
}

const HeadParams& HeadSet::head_for(SlotKind kind) const {
  return mode_ == HeadMode::Untied && kind == SlotKind::Explicit ? heads_[1] : heads_[0];
}

HeadParams& HeadSet::explicit_head() {
  if (mode_ != HeadMode::Untied) throw ConfigError("explicit head exists only in UNTIED mode");
  return heads_[1];
}

ParamRefs HeadSet::parameters() {
  ParamRefs refs;
  for (HeadParams& h : heads_) {
    refs.push_back(&h.weight);
    refs.push_back(&h.bias);
  }
  return refs;
}

namespace {

Vector concat(std::span<const double> a, std::span<const double> b) {
  Vector x(a.size() + b.size());
  std::copy(a.begin(), a.end(), x.begin());
  std::copy(b.begin(), b.end(), x.begin() + static_cast<std::ptrdiff_t>(a.size()));
  return x;
}

}  // namespace

Vector slot_logits(const HeadSet& heads, std::span<const double> prev, std::span<const double> cur,
                   SlotKind kind) {
  const HeadParams& h = heads.head_for(kind);
  if (prev.size() + cur.size() != h.input_dim()) {
    throw DimensionError("slot_logits: representations of sizes " + std::to_string(prev.size()) +
                         " + " + std::to_string(cur.size()) + " do not match head input " +
                         std::to_string(h.input_dim()));
  }
  return affine(h.weight.value, concat(prev, cur), h.bias.value.values());
}

void slot_logits_backward(HeadSet& heads, std::span<const double> prev,
                          std::span<const double> cur, SlotKind kind,
                          std::span<const double> d_logits, std::span<double> d_prev,
                          std::span<double> d_cur) {
  HeadParams& h = heads.head_for(kind);
  const Vector x = concat(prev, cur);
  Vector dx(x.size(), 0.0);
  affine_backward(h.weight.value, x, d_logits, &h.weight.grad, dx, h.bias.grad.values());
  for (std::size_t i = 0; i < prev.size(); ++i) d_prev[i] += dx[i];
  for (std::size_t i = 0; i < cur.size(); ++i) d_cur[i] += dx[prev.size() + i];
}

double slot_loss(std::span<const double> logits, std::span<const std::size_t> gold,
                 Vector* d_logits, DoubleLabelLoss rule) {
  if (gold.empty()) throw DataError("slot_loss: empty gold set");
  for (std::size_t g : gold) {
    if (g >= logits.size()) throw DataError("slot_loss: gold class out of range");
  }
  const Vector p = softmax(logits);
  double loss = 0.0;
  if (rule == DoubleLabelLoss::Marginal || gold.size() == 1) {
    Vector gold_logits;
    for (std::size_t g : gold) gold_logits.push_back(logits[g]);
    loss = logsumexp(logits) - logsumexp(gold_logits);
    if (d_logits != nullptr) {
      // d/dz [lse(z) - lse(z_G)] = softmax(z) - softmax restricted to G.
      const Vector q = softmax(gold_logits);
      *d_logits = p;
      for (std::size_t k = 0; k < gold.size(); ++k) (*d_logits)[gold[k]] -= q[k];
    }
  } else {
    const double lse = logsumexp(logits);
    for (std::size_t g : gold) loss += lse - logits[g];
    if (d_logits != nullptr) {
      d_logits->assign(p.size(), 0.0);
      for (std::size_t k = 0; k < p.size(); ++k) (*d_logits)[k] = static_cast<double>(gold.size()) * p[k];
      for (std::size_t g : gold) (*d_logits)[g] -= 1.0;
    }
  }
  return loss;
}

double combined_loss(std::span<const SlotLoss> losses, const LossWeights& weights) {
  double implicit = 0.0;
  double explicit_sum = 0.0;
  for (const SlotLoss& l : losses) {
    (l.kind == SlotKind::Implicit ? implicit : explicit_sum) += l.value;
  }
  // α = 0 drops the explicit term entirely, even if it were non-finite.
  return weights.alpha == 0.0 ? implicit : implicit + weights.alpha * explicit_sum;
}

}  // namespace discpar
