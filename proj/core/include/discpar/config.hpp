#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "discpar/corpus.hpp"
#include "discpar/crf.hpp"
#include "discpar/heads.hpp"

namespace discpar {

enum class Variant { BaselinePair, BasicTied, Untied, UntiedCrf };

std::string_view variant_name(Variant v) noexcept;  // "BASELINE-PAIR", ...
std::optional<Variant> parse_variant(std::string_view text) noexcept;

/// How an unmatched double-gold slot is charged in per-class counts.
enum class FnAttribution {
  FirstGold,  // FN to the first-listed gold label only
  AllGold,    // FN to every gold label
};

struct TrainConfig {
  Variant variant = Variant::Untied;
  double alpha = 1.0;
  double learning_rate = 5e-4;
  std::size_t window = 128;  // relation slots per optimizer step
  std::size_t max_epochs = 40;
  double dropout = 0.5;
  double clip = 5.0;
  std::size_t hidden = 300;
  std::uint64_t seed = 0;
  std::optional<CrfMode> crf;  // set iff variant is UNTIED+CRF
  std::optional<Label> binary_target;
  DoubleLabelLoss double_label_loss = DoubleLabelLoss::Marginal;
  FnAttribution fn_attribution = FnAttribution::FirstGold;
  bool dropout_after_pool = true;
  std::size_t embedding_dim = 300;
  /// Stop after this many epochs without a dev improvement; 0 disables.
  std::size_t patience = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  bool uses_crf() const noexcept { return variant == Variant::UntiedCrf; }
  bool binary() const noexcept { return binary_target.has_value(); }
  std::size_t classes() const noexcept { return binary() ? 2 : kNumLabels; }

  /// Throws ConfigError on any invalid value or combination.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Applies a `--crf {off,plain4,typed8}` choice: a CRF upgrades UNTIED to
/// UNTIED+CRF and is rejected for other variants; "off" downgrades.
void apply_crf_choice(TrainConfig& config, std::string_view choice);

/// Sets one field from its textual value. Throws ConfigError on an unknown
/// key or unparsable value.
void set_config_value(TrainConfig& config, std::string_view key, std::string_view value);

/// Key-value text: one `key = value` (or `key value`) per line, '#' comments.
/// Keys mirror the TrainConfig field names.
TrainConfig parse_config(std::istream& in, TrainConfig base = {});
TrainConfig load_config(const std::filesystem::path& path, TrainConfig base = {});
std::string format_config(const TrainConfig& config);

}  // namespace discpar
