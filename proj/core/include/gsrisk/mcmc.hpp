#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gsrisk/model.hpp"
#include "gsrisk/random.hpp"

namespace gsrisk {

enum class ScanOrder { fixed, random };

struct ChainOptions {
  /// Order in which station components are proposed within a step.
  ScanOrder scan = ScanOrder::fixed;
};

/// min{f_g(candidate) / f_g(current), 1} for station g.
double component_acceptance(const SystemModel& model, std::size_t g, int current, int candidate);

/// Component-wise discrete Metropolis-Hastings kernel targeting
/// f(x) I{S(x) <= level} / P(S(X) <= level).
///
/// Each station proposes a uniform candidate on {0..N^g} and accepts it
/// with the binomial pmf ratio. Load and wind, when modelled, are proposed
/// from their own Gaussian marginals (independence proposal, ratio 1).
/// The assembled proposal is then accepted iff it stays at or below the
/// level; if it equals the current state the indicator is not evaluated.
class MhKernel {
 public:
  MhKernel(const SystemModel& model, double level, ChainOptions options = {});

  const SystemModel& model() const noexcept { return model_; }
  double level() const noexcept { return level_; }

  /// Advances `current` in place. `current_importance` must hold
  /// importance(current) and is kept in sync. Returns whether the
  /// indicator was evaluated.
  bool advance(SystemState& current, double& current_importance, Rng& rng);

 private:
  double ratio(std::size_t g, int current, int candidate) const {
    return acceptance_[g][static_cast<std::size_t>(current) * width_[g] + static_cast<std::size_t>(candidate)];
  }

  const SystemModel& model_;
  double level_;
  ChainOptions options_;
  std::vector<std::vector<double>> acceptance_;
  std::vector<std::size_t> width_;
  std::vector<std::size_t> order_;
  SystemState proposal_;
};

/// One kernel step from `current`. Throws ContractError when `current`
/// lies above the level.
SystemState mh_step(const SystemState& current, double level, const SystemModel& model, Rng& rng,
                    ChainOptions options = {});

struct ChainRequest {
  const SystemModel& model;
  SystemState seed_state;
  double level = 0.0;
  std::size_t length = 0;
};

struct ChainResult {
  std::vector<SystemState> states;
  /// Indicator evaluations spent; steps whose proposal equals the current
  /// state cost nothing.
  std::uint64_t evaluations = 0;
};

/// Runs `length` kernel steps from the seed and returns every visited
/// state (the seed itself is not included).
ChainResult run_chain(const ChainRequest& request, Rng& rng, ChainOptions options = {});

}  // namespace gsrisk
