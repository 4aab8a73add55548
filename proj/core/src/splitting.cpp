#include "gsrisk/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gsrisk/errors.hpp"
#include "gsrisk/parallel.hpp"

namespace gsrisk {
namespace {

struct Particle {
  SystemState state;
  double importance = 0.0;
};

std::uint64_t draw_population(const SystemModel& model, std::size_t n, Rng& rng,
                              std::vector<Particle>& out) {
  out.clear();
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Particle p{sample_state(model, rng), 0.0};
    p.importance = importance(p.state, model);
    out.push_back(std::move(p));
  }
  return n;
}

// Runs one chain per seed with the planned lengths and pools every visited
// state into `out`. Returns the indicator evaluations spent.
std::uint64_t run_stage(const SystemModel& model, double level, std::vector<Particle>& seeds,
                        const SplittingPlan& plan, const ChainOptions& chain, Rng& rng,
                        std::vector<Particle>& out) {
  MhKernel kernel(model, level, chain);
  std::uint64_t evaluations = 0;
  out.clear();
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    Particle current = std::move(seeds[i]);
    for (std::size_t step = 0; step < plan.chain_lengths[i]; ++step) {
      if (kernel.advance(current.state, current.importance, rng)) ++evaluations;
      out.push_back(current);
    }
  }
  return evaluations;
}

std::vector<Particle> select_below(std::vector<Particle>& population, double level) {
  std::vector<Particle> selected;
  for (Particle& p : population)
    if (p.importance <= level) selected.push_back(std::move(p));
  return selected;
}

}  // namespace

void LevelSchedule::validate(double initial_level) const {
  if (levels.empty()) throw ContractError("level schedule is empty");
  for (std::size_t t = 1; t < levels.size(); ++t)
    if (!(levels[t] < levels[t - 1]))
      throw ContractError("levels must be strictly decreasing (level " + std::to_string(t + 1) + ")");
  const bool certain_event = levels.size() == 1 && levels.front() >= initial_level;
  if (!certain_event && !(levels.front() < initial_level))
    throw ContractError("first level must lie below the model's initial level");
}

void AdamConfig::validate() const {
  if (!(quantile > 0.0 && quantile < 1.0)) throw ValidationError("rho must lie in (0, 1)");
  if (pilot_size < 100) throw ValidationError("pilot size must be >= 100");
  if (max_levels < 1) throw ValidationError("max levels must be >= 1");
}

void FegsConfig::validate() const {
  if (sample_size < 100) throw ValidationError("sample size must be >= 100");
  if (replications < 1) throw ValidationError("replications must be >= 1");
}

AdamResult adam_levels(const SystemModel& model, double target, const AdamConfig& config, Rng& rng) {
  config.validate();
  const std::size_t n = config.pilot_size;
  const auto rank = static_cast<std::size_t>(std::ceil(config.quantile * static_cast<double>(n))) - 1;

  AdamResult result;
  std::vector<Particle> population;
  std::vector<Particle> next;
  result.evaluations += draw_population(model, n, rng, population);

  double previous = initial_level(model);
  std::vector<double> values(n);
  for (std::size_t attempt = 0;; ++attempt) {
    if (attempt >= config.max_levels)
      throw ConvergenceError("level selection did not reach target " + std::to_string(target) +
                             " within " + std::to_string(config.max_levels) + " attempts");

    std::transform(population.begin(), population.end(), values.begin(),
                   [](const Particle& p) { return p.importance; });
    std::sort(values.begin(), values.end());
    double level = values[rank];

    if (level > target && level >= previous) {
      // Tie with the previous level on an atom: step to the next value below.
      const auto below = std::lower_bound(values.begin(), values.end(), previous);
      if (below == values.begin()) {
        SplittingPlan plan = splitting_plan(n, population.size(), rng);
        result.evaluations += run_stage(model, previous, population, plan, config.chain, rng, next);
        population.swap(next);
        continue;
      }
      level = *(below - 1);
    }

    if (level <= target) {
      result.schedule.levels.push_back(target);
      break;
    }
    result.schedule.levels.push_back(level);
    previous = level;

    std::vector<Particle> elite = select_below(population, level);
    SplittingPlan plan = splitting_plan(n, elite.size(), rng);
    result.evaluations += run_stage(model, level, elite, plan, config.chain, rng, population);
  }
  return result;
}

SplittingPlan splitting_plan(std::size_t total_effort, std::size_t entrants, Rng& rng) {
  if (entrants == 0 || entrants > total_effort)
    throw ContractError("splitting plan needs 1 <= entrants <= effort (got " +
                        std::to_string(entrants) + " of " + std::to_string(total_effort) + ")");
  SplittingPlan plan;
  plan.chain_lengths.assign(entrants, total_effort / entrants);
  const std::size_t extra = total_effort % entrants;
  if (extra == 0) return plan;

  std::vector<std::size_t> index(entrants);
  std::iota(index.begin(), index.end(), 0);
  std::vector<std::size_t> chosen;
  chosen.reserve(extra);
  std::sample(index.begin(), index.end(), std::back_inserter(chosen), extra, rng);
  for (std::size_t i : chosen) ++plan.chain_lengths[i];
  return plan;
}

ReplicationResult fegs_replication(const SystemModel& model, const LevelSchedule& schedule,
                                   std::size_t sample_size, Rng& rng, ChainOptions chain) {
  schedule.validate(initial_level(model));
  const std::size_t n = sample_size;

  ReplicationResult result;
  std::vector<Particle> population;
  std::vector<Particle> next;
  result.evaluations += draw_population(model, n, rng, population);

  result.estimate = 1.0;
  for (std::size_t t = 0; t < schedule.size(); ++t) {
    std::vector<Particle> entrance = select_below(population, schedule.levels[t]);
    result.entrants.push_back(entrance.size());
    result.estimate *= static_cast<double>(entrance.size()) / static_cast<double>(n);

    if (entrance.empty()) {
      result.entrants.resize(schedule.size(), 0);
      result.estimate = 0.0;
      break;
    }
    if (t + 1 == schedule.size()) break;

    SplittingPlan plan = splitting_plan(n, entrance.size(), rng);
    result.evaluations += run_stage(model, schedule.levels[t], entrance, plan, chain, rng, next);
    population.swap(next);
  }
  return result;
}

EstimateResult estimate_fegs(const SystemModel& model, const LevelSchedule& schedule,
                             const FegsConfig& config, std::uint64_t master_seed) {
  config.validate();
  schedule.validate(initial_level(model));

  const std::size_t reps = config.replications;
  std::vector<ReplicationResult> runs(reps);
  parallel_for(reps, config.threads, [&](std::size_t r) {
    Rng rng = make_stream(master_seed, r);
    runs[r] = fegs_replication(model, schedule, config.sample_size, rng, config.chain);
  });

  EstimateResult result;
  result.method = "fegs";
  result.seed = master_seed;
  result.replications = reps;
  result.levels = schedule.levels;

  double sum = 0.0;
  for (const auto& run : runs) {
    sum += run.estimate;
    result.evaluations += run.evaluations;
    result.replication_estimates.push_back(run.estimate);
  }
  const double mean = sum / static_cast<double>(reps);
  result.risk_estimate = mean;

  if (reps >= 2) {
    double ss = 0.0;
    for (const auto& run : runs) ss += (run.estimate - mean) * (run.estimate - mean);
    const double sd = std::sqrt(ss / static_cast<double>(reps - 1));
    result.standard_error = sd / std::sqrt(static_cast<double>(reps));
    if (mean > 0.0) result.relative_error = result.standard_error / mean;
  }

  for (std::size_t t = 0; t < schedule.size(); ++t) {
    StageRecord stage;
    stage.level = schedule.levels[t];
    for (const auto& run : runs) stage.mean_entrants += static_cast<double>(run.entrants[t]);
    stage.mean_entrants /= static_cast<double>(reps);
    stage.conditional_probability = stage.mean_entrants / static_cast<double>(config.sample_size);
    result.stages.push_back(stage);
  }
  return result;
}

EstimateResult estimate_fegs_adaptive(const SystemModel& model, double load_mw,
                                      const AdamConfig& adam, const FegsConfig& config,
                                      std::uint64_t master_seed, bool include_pilot) {
  Rng pilot_rng = make_stream(master_seed, streams::kAdamPilot);
  const AdamResult pilot = adam_levels(model, risk_threshold(model, load_mw), adam, pilot_rng);

  EstimateResult result = estimate_fegs(model, pilot.schedule, config, master_seed);
  result.pilot_evaluations = pilot.evaluations;
  result.pilot_included = include_pilot;
  if (include_pilot) result.evaluations += pilot.evaluations;
  return result;
}

}  // namespace gsrisk
