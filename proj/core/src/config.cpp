#include "discpar/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "discpar/error.hpp"

namespace discpar {

namespace {

std::string upper(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
    throw ConfigError("config: '" + std::string(key) + "' expects a number, got '" +
                      std::string(value) + "'");
  }
  return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config: '" + std::string(key) + "' expects a non-negative integer, got '" +
                      std::string(value) + "'");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("config: '" + std::string(key) + "' expects a boolean");
}

std::string_view crf_choice(const TrainConfig& c) {
  if (!c.crf) return "off";
  return *c.crf == CrfMode::Typed8 ? "typed8" : "plain4";
}

}  // namespace

std::string_view variant_name(Variant v) noexcept {
  switch (v) {
    case Variant::BaselinePair:
      return "BASELINE-PAIR";
    case Variant::BasicTied:
      return "BASIC-TIED";
    case Variant::Untied:
      return "UNTIED";
    case Variant::UntiedCrf:
      return "UNTIED+CRF";
  }
  return "UNTIED";
}

std::optional<Variant> parse_variant(std::string_view text) noexcept {
  const std::string u = upper(text);
  if (u == "BASELINE-PAIR") return Variant::BaselinePair;
  if (u == "BASIC-TIED") return Variant::BasicTied;
  if (u == "UNTIED") return Variant::Untied;
  if (u == "UNTIED+CRF") return Variant::UntiedCrf;
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (!std::isfinite(alpha) || alpha < 0.0) throw ConfigError("alpha must be finite and >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (window == 0) throw ConfigError("window must be positive");
  if (max_epochs == 0) throw ConfigError("max_epochs must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
  if (!(clip > 0.0)) throw ConfigError("clip must be positive");
  if (hidden == 0) throw ConfigError("hidden must be positive");
  if (embedding_dim == 0) throw ConfigError("embedding_dim must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0) ||
      !(adam_epsilon > 0.0)) {
    throw ConfigError("invalid Adam hyperparameters");
  }
  if (uses_crf() != crf.has_value()) {
    throw ConfigError(uses_crf() ? "UNTIED+CRF needs a CRF state space"
                                 : "a CRF layer requires the UNTIED variant");
  }
  if (binary() && uses_crf()) {
    throw ConfigError("binary one-vs-all mode cannot use the CRF layer");
  }
}

void apply_crf_choice(TrainConfig& config, std::string_view choice) {
  if (choice == "off") {
    if (config.variant == Variant::UntiedCrf) config.variant = Variant::Untied;
    config.crf.reset();
    return;
  }
  CrfMode mode;
  if (choice == "typed8") {
    mode = CrfMode::Typed8;
  } else if (choice == "plain4") {
    mode = CrfMode::Plain4;
  } else {
    throw ConfigError("crf must be one of off, plain4, typed8");
  }
  if (config.variant != Variant::Untied && config.variant != Variant::UntiedCrf) {
    throw ConfigError("a CRF layer requires the UNTIED variant");
  }
  config.variant = Variant::UntiedCrf;
  config.crf = mode;
}

void set_config_value(TrainConfig& c, std::string_view key, std::string_view value) {
  if (key == "variant") {
    auto v = parse_variant(value);
    if (!v) throw ConfigError("unknown variant '" + std::string(value) + "'");
    c.variant = *v;
    if (*v == Variant::UntiedCrf && !c.crf) c.crf = CrfMode::Typed8;
    if (*v != Variant::UntiedCrf) c.crf.reset();
  } else if (key == "alpha") {
    c.alpha = to_double(key, value);
  } else if (key == "learning_rate") {
    c.learning_rate = to_double(key, value);
  } else if (key == "window") {
    c.window = to_uint(key, value);
  } else if (key == "max_epochs") {
    c.max_epochs = to_uint(key, value);
  } else if (key == "dropout") {
    c.dropout = to_double(key, value);
  } else if (key == "clip") {
    c.clip = to_double(key, value);
  } else if (key == "hidden") {
    c.hidden = to_uint(key, value);
  } else if (key == "seed") {
    c.seed = to_uint(key, value);
  } else if (key == "crf") {
    apply_crf_choice(c, value);
  } else if (key == "binary") {
    if (value == "none") {
      c.binary_target.reset();
    } else {
      auto l = parse_label(value);
      if (!l) throw ConfigError("binary target must be a label or 'none'");
      c.binary_target = *l;
    }
  } else if (key == "double_label_loss") {
    if (value == "marginal") {
      c.double_label_loss = DoubleLabelLoss::Marginal;
    } else if (value == "sum") {
      c.double_label_loss = DoubleLabelLoss::SumCe;
    } else {
      throw ConfigError("double_label_loss must be marginal or sum");
    }
  } else if (key == "fn_attribution") {
    if (value == "first") {
      c.fn_attribution = FnAttribution::FirstGold;
    } else if (value == "all") {
      c.fn_attribution = FnAttribution::AllGold;
    } else {
      throw ConfigError("fn_attribution must be first or all");
    }
  } else if (key == "dropout_after_pool") {
    c.dropout_after_pool = to_bool(key, value);
  } else if (key == "embedding_dim") {
    c.embedding_dim = to_uint(key, value);
  } else if (key == "patience") {
    c.patience = to_uint(key, value);
  } else if (key == "adam_beta1") {
    c.adam_beta1 = to_double(key, value);
  } else if (key == "adam_beta2") {
    c.adam_beta2 = to_double(key, value);
  } else if (key == "adam_epsilon") {
    c.adam_epsilon = to_double(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

TrainConfig parse_config(std::istream& in, TrainConfig base) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    std::size_t cut = text.find('=');
    if (cut == std::string_view::npos) cut = text.find_first_of(" \t");
    if (cut == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected 'key = value'");
    }
    set_config_value(base, trim(text.substr(0, cut)), trim(text.substr(cut + 1)));
  }
  base.validate();
  return base;
}

TrainConfig load_config(const std::filesystem::path& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  return parse_config(in, std::move(base));
}

std::string format_config(const TrainConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "variant = " << variant_name(c.variant) << '\n'
      << "alpha = " << c.alpha << '\n'
      << "learning_rate = " << c.learning_rate << '\n'
      << "window = " << c.window << '\n'
      << "max_epochs = " << c.max_epochs << '\n'
      << "dropout = " << c.dropout << '\n'
      << "clip = " << c.clip << '\n'
      << "hidden = " << c.hidden << '\n'
      << "seed = " << c.seed << '\n'
      << "crf = " << crf_choice(c) << '\n'
      << "binary = " << (c.binary_target ? label_name(*c.binary_target) : "none") << '\n'
      << "double_label_loss = "
      << (c.double_label_loss == DoubleLabelLoss::Marginal ? "marginal" : "sum") << '\n'
      << "fn_attribution = " << (c.fn_attribution == FnAttribution::FirstGold ? "first" : "all")
      << '\n'
      << "dropout_after_pool = " << (c.dropout_after_pool ? "true" : "false") << '\n'
      << "embedding_dim = " << c.embedding_dim << '\n'
      << "patience = " << c.patience << '\n'
      << "adam_beta1 = " << c.adam_beta1 << '\n'
      << "adam_beta2 = " << c.adam_beta2 << '\n'
      << "adam_epsilon = " << c.adam_epsilon << '\n';
  return out.str();
}

}  // namespace discpar
