#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gsrisk/estimate.hpp"
#include "gsrisk/mcmc.hpp"
#include "gsrisk/model.hpp"
#include "gsrisk/random.hpp"

namespace gsrisk {

/// Thresholds L_1 > ... > L_T on the importance function. L_0 is implicit:
/// the model's initial level (installed capacity, or +inf with Gaussian
/// components). L_T is the risk threshold.
struct LevelSchedule {
  std::vector<double> levels;

  double final_level() const { return levels.back(); }
  std::size_t size() const noexcept { return levels.size(); }

  /// Non-empty, strictly decreasing, and below `initial_level`. A single
  /// level may equal the initial level (the certain event).
  void validate(double initial_level) const;
};

struct AdamConfig {
  std::size_t pilot_size = 10'000;
  /// Fixed conditional probability rho targeted at every level.
  double quantile = 0.1;
  /// Bound on level-placement attempts before giving up.
  std::size_t max_levels = 60;
  ChainOptions chain;

  void validate() const;
};

struct AdamResult {
  LevelSchedule schedule;
  std::uint64_t evaluations = 0;
};

/// Adaptive level placement from a pilot population. Each level is the
/// rho-quantile of the current population's importance values; the
/// population is then refreshed at that level by MCMC. A quantile that does
/// not fall below the previous level is replaced by the largest observed
/// value strictly below it. Stops once the quantile reaches `target`, which
/// becomes the final level. Throws ConvergenceError after max_levels
/// attempts.
AdamResult adam_levels(const SystemModel& model, double target, const AdamConfig& config, Rng& rng);

/// Chain lengths for one fixed-effort stage.
struct SplittingPlan {
  std::vector<std::size_t> chain_lengths;
};

/// floor(N/N_t) steps per entrance state, plus one extra step for exactly
/// N mod N_t of them chosen uniformly without replacement. Throws
/// ContractError unless 1 <= entrants <= total_effort.
SplittingPlan splitting_plan(std::size_t total_effort, std::size_t entrants, Rng& rng);

struct FegsConfig {
  /// N, the fixed effort per stage.
  std::size_t sample_size = 50'000;
  std::size_t replications = 10;
  ChainOptions chain;
  /// Worker threads for replications; 0 = hardware concurrency.
  unsigned threads = 0;

  void validate() const;
};

/// One fixed-effort generalized splitting run.
struct ReplicationResult {
  /// N_1..N_T; zeros after the first empty stage.
  std::vector<std::size_t> entrants;
  double estimate = 0.0;
  std::uint64_t evaluations = 0;
};

ReplicationResult fegs_replication(const SystemModel& model, const LevelSchedule& schedule,
                                   std::size_t sample_size, Rng& rng, ChainOptions chain = {});

/// Independent replications on streams 0..R-1 of `master_seed`. Reports the
/// mean estimate and the replication-based standard and relative error.
EstimateResult estimate_fegs(const SystemModel& model, const LevelSchedule& schedule,
                             const FegsConfig& config, std::uint64_t master_seed);

/// Level pilot (stream streams::kAdamPilot) followed by estimate_fegs.
/// The pilot cost is always reported in pilot_evaluations and is added to
/// evaluations when `include_pilot` is set.
EstimateResult estimate_fegs_adaptive(const SystemModel& model, double load_mw,
                                      const AdamConfig& adam, const FegsConfig& config,
                                      std::uint64_t master_seed, bool include_pilot = true);

}  // namespace gsrisk
