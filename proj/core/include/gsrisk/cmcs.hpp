#pragma once

#include <cstdint>

#include "gsrisk/estimate.hpp"
#include "gsrisk/model.hpp"
#include "gsrisk/random.hpp"

namespace gsrisk {

struct CmcsConfig {
  double target_relative_error = 0.10;
  std::uint64_t max_evaluations = 5'000'000;
  /// The stopping rule is checked after each batch.
  std::uint64_t batch_size = 1'000;

  /// Throws ValidationError.
  void validate() const;
};

/// sqrt((1 - r) / (r n)), with the running estimate in place of the true
/// risk. NaN when r == 0 (no successes yet), 0 when r == 1.
double cmcs_relative_error(double risk_estimate, std::uint64_t samples);

/// Crude Monte Carlo: IID states, Bernoulli indicator mean, stopped at the
/// first batch boundary where the running RE reaches the target or at
/// max_evaluations. A zero-success run returns risk 0 and NaN RE.
EstimateResult estimate_cmcs(const SystemModel& model, double load_mw, const CmcsConfig& config,
                             Rng& rng);

/// Same, on stream 0 of `master_seed`; the seed is recorded in the result.
EstimateResult estimate_cmcs(const SystemModel& model, double load_mw, const CmcsConfig& config,
                             std::uint64_t master_seed);

}  // namespace gsrisk
