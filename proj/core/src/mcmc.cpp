#include "gsrisk/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gsrisk/errors.hpp"

namespace gsrisk {
namespace {

double pmf_ratio(std::span<const double> log_pmf, int current, int candidate) {
  const double to = log_pmf[static_cast<std::size_t>(candidate)];
  const double from = log_pmf[static_cast<std::size_t>(current)];
  if (candidate == current) return 1.0;
  if (std::isinf(from) && from < 0.0) return 1.0;
  return std::min(1.0, std::exp(to - from));
}

void require_inside(const SystemState& state, const SystemModel& model, double level) {
  validate_state(state, model);
  const double s = importance(state, model);
  if (!(s <= level))
    throw ContractError("chain state has importance " + std::to_string(s) + " above level " +
                        std::to_string(level));
}

}  // namespace

double component_acceptance(const SystemModel& model, std::size_t g, int current, int candidate) {
  const int n = model.station(g).unit_count;
  if (current < 0 || current > n || candidate < 0 || candidate > n)
    throw DomainError("unit count outside station range");
  return pmf_ratio(model.log_pmf(g), current, candidate);
}

MhKernel::MhKernel(const SystemModel& model, double level, ChainOptions options)
    : model_(model), level_(level), options_(options) {
  const std::size_t stations = model.station_count();
  acceptance_.resize(stations);
  width_.resize(stations);
  order_.resize(stations);
  std::iota(order_.begin(), order_.end(), 0);
  for (std::size_t g = 0; g < stations; ++g) {
    const int n = model.station(g).unit_count;
    width_[g] = static_cast<std::size_t>(n) + 1;
    acceptance_[g].resize(width_[g] * width_[g]);
    for (int from = 0; from <= n; ++from)
      for (int to = 0; to <= n; ++to)
        acceptance_[g][static_cast<std::size_t>(from) * width_[g] + static_cast<std::size_t>(to)] =
            pmf_ratio(model.log_pmf(g), from, to);
  }
}

bool MhKernel::advance(SystemState& current, double& current_importance, Rng& rng) {
  proposal_ = current;
  if (options_.scan == ScanOrder::random) std::shuffle(order_.begin(), order_.end(), rng);

  for (std::size_t g : order_) {
    const int n = current.available_units[g];
    const int candidate = uniform_int(rng, 0, model_.stations()[g].unit_count);
    if (candidate == n) continue;
    const double a = ratio(g, n, candidate);
    if (a >= 1.0 || uniform01(rng) < a) proposal_.available_units[g] = candidate;
  }
  const auto& u = model_.uncertainty();
  if (u.load) proposal_.load_draw = sample_component(*u.load, rng);
  if (u.wind) proposal_.wind_draw = sample_component(*u.wind, rng);

  if (proposal_ == current) return false;

  const double s = importance(proposal_, model_);
  if (s <= level_) {
    std::swap(current, proposal_);
    current_importance = s;
  }
  return true;
}

SystemState mh_step(const SystemState& current, double level, const SystemModel& model, Rng& rng,
                    ChainOptions options) {
  require_inside(current, model, level);
  MhKernel kernel(model, level, options);
  SystemState next = current;
  double s = importance(next, model);
  kernel.advance(next, s, rng);
  return next;
}

ChainResult run_chain(const ChainRequest& request, Rng& rng, ChainOptions options) {
  require_inside(request.seed_state, request.model, request.level);
  MhKernel kernel(request.model, request.level, options);

  ChainResult result;
  result.states.reserve(request.length);
  SystemState current = request.seed_state;
  double s = importance(current, request.model);
  for (std::size_t i = 0; i < request.length; ++i) {
    if (kernel.advance(current, s, rng)) ++result.evaluations;
    result.states.push_back(current);
  }
  return result;
}

}  // namespace gsrisk
