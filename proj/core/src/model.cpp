#include "gsrisk/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gsrisk/errors.hpp"

namespace gsrisk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double binomial_coefficient(int n, int k) {
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(c);
}

void validate_component(const GaussianComponent& c, const char* what) {
  const std::string name(what);
  if (!std::isfinite(c.forecast_mw)) throw ValidationError(name + ".forecast_mw must be finite");
  if (!(c.sigma_mw >= 0.0) || !std::isfinite(c.sigma_mw))
    throw ValidationError(name + ".sigma_mw must be finite and >= 0");
  if (c.truncate_at_zero && c.forecast_mw < 0.0)
    throw ValidationError(name + ": truncation at zero requires a non-negative forecast");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

SystemModel::SystemModel(std::vector<Station> stations, double lead_time_hours,
                         UncertaintyModel uncertainty)
    : stations_(std::move(stations)), lead_time_(lead_time_hours), uncertainty_(uncertainty) {
  if (!(lead_time_ > 0.0) || !std::isfinite(lead_time_))
    throw ValidationError("lead_time_hours must be positive");
  if (stations_.empty()) throw ValidationError("model has no stations; installed capacity must be positive");

  for (std::size_t g = 0; g < stations_.size(); ++g) {
    const Station& s = stations_[g];
    const std::string where = "station " + std::to_string(g);
    if (s.unit_count < 1) throw ValidationError(where + ": count must be >= 1");
    if (!(s.unit_capacity_mw > 0.0) || !std::isfinite(s.unit_capacity_mw))
      throw ValidationError(where + ": capacity_mw must be positive");
    if (!(s.outage_rate_per_hour >= 0.0) || !std::isfinite(s.outage_rate_per_hour))
      throw ValidationError(where + ": outage_rate_per_hour must be >= 0");
    const double q = s.outage_rate_per_hour * lead_time_;
    if (!(q < 1.0))
      throw ValidationError(where + ": outage_rate_per_hour * lead_time_hours must be < 1");

    installed_capacity_ += s.unit_count * s.unit_capacity_mw;
    outage_prob_.push_back(q);

    std::vector<double> pmf(static_cast<std::size_t>(s.unit_count) + 1);
    std::vector<double> log_pmf(pmf.size());
    std::vector<double> cdf(pmf.size());
    double acc = 0.0;
    for (int k = 0; k <= s.unit_count; ++k) {
      pmf[k] = station_pmf(s, lead_time_, k);
      log_pmf[k] = log_station_pmf(s, lead_time_, k);
      acc += pmf[k];
      cdf[k] = acc;
    }
    // Inversion must always terminate on the last atom.
    cdf.back() = 1.0;
    pmf_.push_back(std::move(pmf));
    log_pmf_.push_back(std::move(log_pmf));
    cdf_.push_back(std::move(cdf));
  }

  if (uncertainty_.load) validate_component(*uncertainty_.load, "load");
  if (uncertainty_.wind) validate_component(*uncertainty_.wind, "wind");
}

std::size_t SystemModel::discrete_state_count() const noexcept {
  std::size_t count = 1;
  for (const Station& s : stations_) {
    const auto width = static_cast<std::size_t>(s.unit_count) + 1;
    if (count > std::numeric_limits<std::size_t>::max() / width)
      return std::numeric_limits<std::size_t>::max();
    count *= width;
  }
  return count;
}

bool SystemModel::integer_capacities() const noexcept {
  return std::all_of(stations_.begin(), stations_.end(), [](const Station& s) {
    return s.unit_capacity_mw == std::floor(s.unit_capacity_mw) && s.unit_capacity_mw < 1e12;
  });
}

void validate_state(const SystemState& state, const SystemModel& model) {
  if (state.available_units.size() != model.station_count())
    throw ModelMismatchError("state has " + std::to_string(state.available_units.size()) +
                             " stations, model has " + std::to_string(model.station_count()));
  if (state.load_draw.has_value() != model.uncertainty().load.has_value())
    throw ModelMismatchError("load draw presence does not match the model's load uncertainty");
  if (state.wind_draw.has_value() != model.uncertainty().wind.has_value())
    throw ModelMismatchError("wind draw presence does not match the model's wind uncertainty");
  for (std::size_t g = 0; g < model.station_count(); ++g) {
    const int n = state.available_units[g];
    if (n < 0 || n > model.station(g).unit_count)
      throw DomainError("station " + std::to_string(g) + ": available units " +
                        std::to_string(n) + " outside [0, " +
                        std::to_string(model.station(g).unit_count) + "]");
  }
}

SystemState all_available_state(const SystemModel& model) {
  SystemState state;
  state.available_units.reserve(model.station_count());
  for (const Station& s : model.stations()) state.available_units.push_back(s.unit_count);
  if (model.uncertainty().load) state.load_draw = model.uncertainty().load->forecast_mw;
  if (model.uncertainty().wind) state.wind_draw = model.uncertainty().wind->forecast_mw;
  return state;
}

double importance(const SystemState& state, const SystemModel& model) {
  if (state.available_units.size() != model.station_count() ||
      state.load_draw.has_value() != model.uncertainty().load.has_value() ||
      state.wind_draw.has_value() != model.uncertainty().wind.has_value())
    validate_state(state, model);

  double s = 0.0;
  for (std::size_t g = 0; g < model.station_count(); ++g)
    s += state.available_units[g] * model.stations()[g].unit_capacity_mw;
  if (state.load_draw) s -= *state.load_draw;
  if (state.wind_draw) s += *state.wind_draw;
  return s;
}

bool indicator(const SystemState& state, const SystemModel& model, double threshold) {
  return importance(state, model) <= threshold;
}

double risk_threshold(const SystemModel& model, double load_mw) {
  return model.uncertainty().load ? 0.0 : load_mw;
}

double initial_level(const SystemModel& model) {
  return model.uncertainty().enabled() ? kInf : model.installed_capacity();
}

double station_pmf(const Station& station, double lead_time_hours, int k) {
  const int n = station.unit_count;
  if (k < 0 || k > n)
    throw DomainError("k = " + std::to_string(k) + " outside [0, " + std::to_string(n) + "]");
  const double q = station.outage_rate_per_hour * lead_time_hours;
  const double p = 1.0 - q;
  return binomial_coefficient(n, k) * std::pow(p, k) * std::pow(q, n - k);
}

double log_station_pmf(const Station& station, double lead_time_hours, int k) {
  const int n = station.unit_count;
  if (k < 0 || k > n)
    throw DomainError("k = " + std::to_string(k) + " outside [0, " + std::to_string(n) + "]");
  const double q = station.outage_rate_per_hour * lead_time_hours;
  if (q == 0.0) return k == n ? 0.0 : -kInf;
  const double log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  return log_choose + k * std::log1p(-q) + (n - k) * std::log(q);
}

double log_component_density(const GaussianComponent& c, double x) {
  if (c.truncate_at_zero && x < 0.0) return -kInf;
  if (c.sigma_mw == 0.0) return x == c.forecast_mw ? 0.0 : -kInf;
  const double z = (x - c.forecast_mw) / c.sigma_mw;
  double log_density = -0.5 * z * z - std::log(c.sigma_mw) - 0.5 * std::log(2.0 * std::numbers::pi);
  if (c.truncate_at_zero) log_density -= std::log(normal_cdf(c.forecast_mw / c.sigma_mw));
  return log_density;
}

double log_state_density(const SystemState& state, const SystemModel& model) {
  validate_state(state, model);
  double log_density = 0.0;
  for (std::size_t g = 0; g < model.station_count(); ++g)
    log_density += model.log_pmf(g)[static_cast<std::size_t>(state.available_units[g])];
  if (state.load_draw) log_density += log_component_density(*model.uncertainty().load, *state.load_draw);
  if (state.wind_draw) log_density += log_component_density(*model.uncertainty().wind, *state.wind_draw);
  return log_density;
}

double state_density(const SystemState& state, const SystemModel& model) {
  return std::exp(log_state_density(state, model));
}

double sample_component(const GaussianComponent& c, Rng& rng) {
  if (c.sigma_mw == 0.0) return c.forecast_mw;
  std::normal_distribution<double> normal(c.forecast_mw, c.sigma_mw);
  double x = normal(rng);
  // forecast >= 0 is enforced, so each attempt succeeds with probability >= 1/2.
  while (c.truncate_at_zero && x < 0.0) x = normal(rng);
  return x;
}

int sample_units(const SystemModel& model, std::size_t g, Rng& rng) {
  const auto cdf = model.cdf(g);
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                   static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

SystemState sample_state(const SystemModel& model, Rng& rng) {
  SystemState state;
  state.available_units.resize(model.station_count());
  for (std::size_t g = 0; g < model.station_count(); ++g)
    state.available_units[g] = sample_units(model, g, rng);
  if (model.uncertainty().load) state.load_draw = sample_component(*model.uncertainty().load, rng);
  if (model.uncertainty().wind) state.wind_draw = sample_component(*model.uncertainty().wind, rng);
  return state;
}

}  // namespace gsrisk
