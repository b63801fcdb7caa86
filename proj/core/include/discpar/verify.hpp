#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "discpar/config.hpp"
#include "discpar/crf.hpp"
#include "discpar/embeddings.hpp"
#include "discpar/gradcheck.hpp"
#include "discpar/rng.hpp"

namespace discpar {

/// Exhaustive enumeration over all S^T state sequences. Independent of the
/// dynamic programs in crf.hpp; exponential, so only for small T.
struct CrfEnumeration {
  std::vector<std::size_t> best_path;  // lexicographically first on ties
  double best_score = -std::numeric_limits<double>::infinity();
  double logZ = 0.0;
  double constrained_logZ = 0.0;
};

CrfEnumeration enumerate_crf(const Matrix& emissions, const CrfParams& params,
                             const AllowedStates& allowed);

struct CrfInstance {
  Matrix emissions;
  CrfParams params;
  AllowedStates allowed;  // one or two states per slot
};

/// Scores uniform in [-scale, scale].
CrfInstance random_crf_instance(Rng& rng, std::size_t slots, std::size_t states, double scale);

struct CrfOracleReport {
  std::size_t instances = 0;
  std::size_t path_mismatches = 0;
  double max_score_error = 0.0;
  double max_logZ_error = 0.0;
  double max_constrained_error = 0.0;
  double seconds = 0.0;
  bool passed(double tolerance) const noexcept {
    return path_mismatches == 0 && max_score_error <= tolerance && max_logZ_error <= tolerance &&
           max_constrained_error <= tolerance;
  }
};

/// Random instances with T in [1, max_slots] and S alternating over {4, 8}.
CrfOracleReport crf_oracle_suite(std::size_t instances, std::size_t max_slots, std::uint64_t seed);

/// Finite-difference check of the full model loss summed over `paragraphs`,
/// with dropout masks pinned per paragraph. CRF scores are drawn at random so
/// their gradients are exercised away from the zero initialization.
GradCheckReport model_gradient_check(const TrainConfig& config,
                                     std::span<const Paragraph> paragraphs,
                                     const EmbeddingTable& table, const FeatureLayout& layout,
                                     const GradCheckOptions& options = {});

}  // namespace discpar
