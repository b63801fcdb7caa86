#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "discpar/corpus.hpp"

namespace discpar {

/// Which signal the generator plants for implicit relations.
enum class SynthRegime {
  /// Implicit labels are i.i.d.; every implicit slot carries a label cue word.
  ConnectiveOnly,
  /// Labels follow a first-order Markov chain across slots; implicit cues are
  /// present only with probability `cue_prob`.
  Markov,
  /// An implicit slot followed by an explicit slot copies that slot's label
  /// (probability `copy_prob`) and carries no cue of its own, so the evidence
  /// sits in a DU outside the slot's pair.
  Context,
};

std::string_view regime_name(SynthRegime regime) noexcept;
std::optional<SynthRegime> parse_regime(std::string_view text) noexcept;

using LabelTransitions = std::array<std::array<double, kNumLabels>, kNumLabels>;

struct SynthConfig {
  std::size_t train = 2000;
  std::size_t dev = 200;
  std::size_t test = 400;
  SynthRegime regime = SynthRegime::ConnectiveOnly;
  std::size_t filler_vocab = 200;
  std::size_t min_du_words = 3;
  std::size_t max_du_words = 8;
  double explicit_prob = 0.5;
  double cue_prob = 1.0;
  double copy_prob = 0.9;
  double double_label_prob = 0.0;
  std::array<double, kNumLabels> label_prior = {0.25, 0.25, 0.25, 0.25};
  /// transitions[prev][next]; used by the Markov regime.
  LabelTransitions transitions = sticky_transitions(0.8);

  static LabelTransitions sticky_transitions(double stay);
};

/// Probability of each DU count 2, 3, 4, 5 and "more than 5" (drawn
/// uniformly from 6..8).
inline constexpr std::array<double, 5> kDuCountDistribution = {0.44, 0.25, 0.15, 0.073, 0.087};

/// Connective words; each maps to exactly one label.
std::string_view connective_for(Label label, std::size_t variant) noexcept;
std::optional<Label> connective_label(std::string_view word) noexcept;
/// Implicit cue words; each maps to exactly one label.
std::string_view cue_for(Label label, std::size_t variant) noexcept;
std::optional<Label> cue_label(std::string_view word) noexcept;

/// Generates a corpus with train/dev/test splits. Byte-identical for equal
/// (config, seed).
Corpus gen_synthetic(const SynthConfig& config, std::uint64_t seed);

}  // namespace discpar
