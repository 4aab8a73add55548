#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace gsrisk {

/// Per-level diagnostics of a splitting run, averaged over replications.
struct StageRecord {
  double level = 0.0;
  double mean_entrants = 0.0;          // mean N_t
  double conditional_probability = 0.0;  // mean N_t / N
};

/// Output of every stochastic estimator.
struct EstimateResult {
  std::string method;
  double risk_estimate = 0.0;
  /// NaN when undefined (no successes, or fewer than two replications).
  double relative_error = std::numeric_limits<double>::quiet_NaN();
  double standard_error = std::numeric_limits<double>::quiet_NaN();
  /// Indicator evaluations, including the level pilot when it was run fused
  /// and `pilot_included` is set.
  std::uint64_t evaluations = 0;
  std::uint64_t pilot_evaluations = 0;
  bool pilot_included = false;
  std::uint64_t seed = 0;
  std::size_t replications = 1;
  std::vector<double> levels;
  std::vector<StageRecord> stages;
  /// Replication estimates, in replication order.
  std::vector<double> replication_estimates;

  bool relative_error_defined() const noexcept { return relative_error == relative_error; }
  std::vector<double> per_level_probabilities() const {
    std::vector<double> p;
    for (const auto& s : stages) p.push_back(s.conditional_probability);
    return p;
  }
};

}  // namespace gsrisk
