#include "gsrisk/cmcs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsrisk/errors.hpp"

namespace gsrisk {

void CmcsConfig::validate() const {
  if (!(target_relative_error > 0.0 && target_relative_error < 1.0))
    throw ValidationError("target relative error must lie in (0, 1)");
  if (batch_size < 1) throw ValidationError("batch size must be >= 1");
  if (max_evaluations < batch_size) throw ValidationError("max evaluations must be >= batch size");
}

double cmcs_relative_error(double risk_estimate, std::uint64_t samples) {
  if (risk_estimate <= 0.0 || samples == 0) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt((1.0 - risk_estimate) / (risk_estimate * static_cast<double>(samples)));
}

EstimateResult estimate_cmcs(const SystemModel& model, double load_mw, const CmcsConfig& config,
                             Rng& rng) {
  config.validate();
  const double threshold = risk_threshold(model, load_mw);

  std::uint64_t hits = 0;
  std::uint64_t n = 0;
  double re = std::numeric_limits<double>::quiet_NaN();
  while (n < config.max_evaluations) {
    const std::uint64_t batch = std::min(config.batch_size, config.max_evaluations - n);
    for (std::uint64_t i = 0; i < batch; ++i)
      if (indicator(sample_state(model, rng), model, threshold)) ++hits;
    n += batch;
    re = cmcs_relative_error(static_cast<double>(hits) / static_cast<double>(n), n);
    if (re <= config.target_relative_error) break;
  }

  EstimateResult result;
  result.method = "cmcs";
  result.risk_estimate = static_cast<double>(hits) / static_cast<double>(n);
  result.relative_error = re;
  result.standard_error = std::sqrt(result.risk_estimate * (1.0 - result.risk_estimate) /
                                    static_cast<double>(n));
  result.evaluations = n;
  result.levels = {threshold};
  return result;
}

EstimateResult estimate_cmcs(const SystemModel& model, double load_mw, const CmcsConfig& config,
                             std::uint64_t master_seed) {
  Rng rng = make_stream(master_seed, 0);
  EstimateResult result = estimate_cmcs(model, load_mw, config, rng);
  result.seed = master_seed;
  return result;
}

}  // namespace gsrisk
