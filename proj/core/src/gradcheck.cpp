#include "discpar/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "discpar/error.hpp"
#include "discpar/rng.hpp"

namespace discpar {

std::string GradCheckReport::summary() const {
  std::ostringstream out;
  out << "checked " << coordinates_checked << " coordinates, max relative error "
      << max_relative_error;
  if (!offending.empty()) {
    out << "; " << offending.size() << " over tolerance:";
    const std::size_t shown = std::min<std::size_t>(offending.size(), 10);
    for (std::size_t i = 0; i < shown; ++i) {
      const auto& c = offending[i];
      out << "\n  " << c.block << "[" << c.index << "] analytic=" << c.analytic
          << " numeric=" << c.numeric << " rel=" << c.relative_error;
    }
  }
  return out.str();
}

GradCheckReport finite_diff_check(const LossFn& loss, std::span<ParamBlock* const> blocks,
                                  const GradCheckOptions& options) {
  for (ParamBlock* block : blocks) block->zero_grad();
  loss(true);
  std::vector<Matrix> analytic;
  analytic.reserve(blocks.size());
  for (const ParamBlock* block : blocks) analytic.push_back(block->grad);
  for (ParamBlock* block : blocks) block->zero_grad();

  GradCheckReport report;
  Rng rng(options.seed);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    ParamBlock& block = *blocks[b];
    BlockCheck summary{block.name, 0, 0.0, !block.trainable};
    if (!block.trainable) {
      report.blocks.push_back(summary);
      continue;
    }
    const std::size_t n = block.value.size();
    std::vector<std::size_t> coords(n);
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (n > options.max_coords_per_block) {
      rng.shuffle(std::span<std::size_t>(coords));
      coords.resize(options.max_coords_per_block);
      std::sort(coords.begin(), coords.end());
    }
    for (std::size_t idx : coords) {
      double& w = block.value[idx];
      const double saved = w;
      w = saved + options.step;
      const double up = loss(false);
      w = saved - options.step;
      const double down = loss(false);
      w = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double a = analytic[b][idx];
      const double denom =
          std::max({std::abs(a), std::abs(numeric), options.denominator_floor});
      const double rel = std::abs(a - numeric) / denom;
      summary.max_relative_error = std::max(summary.max_relative_error, rel);
      ++summary.checked;
      if (!(rel <= options.tolerance)) {
        report.offending.push_back({block.name, idx, a, numeric, rel});
      }
    }
    report.coordinates_checked += summary.checked;
    report.max_relative_error = std::max(report.max_relative_error, summary.max_relative_error);
    report.blocks.push_back(summary);
  }
  return report;
}

GradCheckReport verify_gradients(const LossFn& loss, std::span<ParamBlock* const> blocks,
                                 const GradCheckOptions& options) {
  GradCheckReport report = finite_diff_check(loss, blocks, options);
  if (!report.passed()) throw VerificationError("gradient check failed: " + report.summary());
  return report;
}

}  // namespace discpar
