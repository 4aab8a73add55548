#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gsrisk/random.hpp"

namespace gsrisk {

/// A group of identical two-state generating units.
struct Station {
  int unit_count = 1;
  double unit_capacity_mw = 0.0;
  double outage_rate_per_hour = 0.0;

  bool operator==(const Station&) const = default;
};

/// Gaussian forecast error for load or wind over the lead time.
struct GaussianComponent {
  double forecast_mw = 0.0;
  double sigma_mw = 0.0;
  // Draws are conditioned on being >= 0. Off unless requested.
  bool truncate_at_zero = false;

  bool operator==(const GaussianComponent&) const = default;
};

/// Optional continuous components of the state. An absent component is
/// disabled and contributes nothing to the state or the importance value.
struct UncertaintyModel {
  std::optional<GaussianComponent> load;
  std::optional<GaussianComponent> wind;

  bool enabled() const noexcept { return load.has_value() || wind.has_value(); }
  bool operator==(const UncertaintyModel&) const = default;
};

/// Multi-station generating system observed over a short lead time.
///
/// Construction validates every invariant and precomputes the per-station
/// binomial tables that sampling and the MCMC kernel read on every step.
/// Station order is part of the model identity.
class SystemModel {
 public:
  SystemModel(std::vector<Station> stations, double lead_time_hours,
              UncertaintyModel uncertainty = {});

  const std::vector<Station>& stations() const noexcept { return stations_; }
  const Station& station(std::size_t g) const { return stations_.at(g); }
  std::size_t station_count() const noexcept { return stations_.size(); }
  double lead_time_hours() const noexcept { return lead_time_; }
  const UncertaintyModel& uncertainty() const noexcept { return uncertainty_; }

  /// Sum of N^g * P^g over all stations.
  double installed_capacity() const noexcept { return installed_capacity_; }

  /// Per-unit outage probability lambda_g * dt.
  double outage_probability(std::size_t g) const { return outage_prob_.at(g); }

  /// pmf[k] = P(n^g = k), k = 0..N^g.
  std::span<const double> pmf(std::size_t g) const { return pmf_.at(g); }
  std::span<const double> log_pmf(std::size_t g) const { return log_pmf_.at(g); }
  std::span<const double> cdf(std::size_t g) const { return cdf_.at(g); }

  /// Number of discrete states, prod (N^g + 1), saturating at SIZE_MAX.
  std::size_t discrete_state_count() const noexcept;

  /// True when every unit capacity is an integer number of megawatts.
  bool integer_capacities() const noexcept;

  bool operator==(const SystemModel& other) const {
    return stations_ == other.stations_ && lead_time_ == other.lead_time_ &&
           uncertainty_ == other.uncertainty_;
  }

 private:
  std::vector<Station> stations_;
  double lead_time_;
  UncertaintyModel uncertainty_;
  double installed_capacity_ = 0.0;
  std::vector<double> outage_prob_;
  std::vector<std::vector<double>> pmf_;
  std::vector<std::vector<double>> log_pmf_;
  std::vector<std::vector<double>> cdf_;
};

/// Available units per station plus the continuous draws that are enabled.
struct SystemState {
  std::vector<int> available_units;
  std::optional<double> load_draw;
  std::optional<double> wind_draw;

  bool operator==(const SystemState&) const = default;
};

/// Throws ModelMismatchError on a dimension or component mismatch and
/// DomainError when a unit count is out of range.
void validate_state(const SystemState& state, const SystemModel& model);

/// All units available; continuous components at their forecasts.
SystemState all_available_state(const SystemModel& model);

/// Available capacity, or the capacity margin when load/wind are modelled.
double importance(const SystemState& state, const SystemModel& model);

/// I{importance(state) <= threshold}, inclusive at the boundary.
bool indicator(const SystemState& state, const SystemModel& model, double threshold);

/// Threshold on the importance function equivalent to "capacity short of
/// `load`". With load uncertainty the load enters the state and the
/// threshold is a zero margin.
double risk_threshold(const SystemModel& model, double load_mw);

/// Highest importance value any state can reach. Infinite when a Gaussian
/// component is present.
double initial_level(const SystemModel& model);

/// Binomial(N^g, 1 - lambda_g dt) probability of k available units.
double station_pmf(const Station& station, double lead_time_hours, int k);
double log_station_pmf(const Station& station, double lead_time_hours, int k);

/// Log density of a Gaussian component, including the truncation
/// normalizer when enabled. A zero sigma is a point mass at the forecast.
double log_component_density(const GaussianComponent& component, double x);

/// Joint density of a state; discrete part times the Gaussian densities.
double log_state_density(const SystemState& state, const SystemModel& model);
double state_density(const SystemState& state, const SystemModel& model);

/// Draw from a Gaussian component (rejection when truncated).
double sample_component(const GaussianComponent& component, Rng& rng);

/// Draw n^g from the station's binomial law by CDF inversion.
int sample_units(const SystemModel& model, std::size_t g, Rng& rng);

/// One IID draw from the full state law. Consumes one uniform per station,
/// then the load draw, then the wind draw.
SystemState sample_state(const SystemModel& model, Rng& rng);

}  // namespace gsrisk
