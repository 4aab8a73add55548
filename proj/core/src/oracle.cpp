#include "gsrisk/oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <string>

#include "gsrisk/errors.hpp"

namespace gsrisk {
namespace {

constexpr double kMergeTolerance = 1e-9;
// Dense integer tables are used up to this many megawatts.
constexpr double kDenseLimitMw = 5e7;

std::string to_shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::size_t> convolution_order(const SystemModel& model) {
  std::vector<std::size_t> order(model.station_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return model.station(a).unit_count < model.station(b).unit_count;
  });
  return order;
}

std::vector<ExactDistribution::Atom> convolve_dense(const SystemModel& model) {
  const auto total = static_cast<std::size_t>(model.installed_capacity());
  std::vector<double> mass(total + 1, 0.0);
  std::vector<double> next(total + 1, 0.0);
  mass[0] = 1.0;
  std::size_t reach = 0;

  for (std::size_t g : convolution_order(model)) {
    const Station& s = model.station(g);
    const auto step = static_cast<std::size_t>(s.unit_capacity_mw);
    const auto pmf = model.pmf(g);
    const std::size_t new_reach = reach + step * static_cast<std::size_t>(s.unit_count);
    std::fill(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(new_reach + 1), 0.0);
    for (std::size_t c = 0; c <= reach; ++c) {
      if (mass[c] == 0.0) continue;
      for (std::size_t k = 0; k < pmf.size(); ++k) next[c + k * step] += mass[c] * pmf[k];
    }
    std::swap(mass, next);
    reach = new_reach;
  }

  std::vector<ExactDistribution::Atom> atoms;
  for (std::size_t c = 0; c <= reach; ++c)
    if (mass[c] > 0.0) atoms.push_back({static_cast<double>(c), mass[c]});
  return atoms;
}

std::vector<ExactDistribution::Atom> convolve_sparse(const SystemModel& model) {
  std::vector<ExactDistribution::Atom> atoms{{0.0, 1.0}};
  std::vector<ExactDistribution::Atom> raw;
  for (std::size_t g : convolution_order(model)) {
    const Station& s = model.station(g);
    const auto pmf = model.pmf(g);
    raw.clear();
    for (const auto& a : atoms)
      for (std::size_t k = 0; k < pmf.size(); ++k)
        if (pmf[k] > 0.0)
          raw.push_back({a.capacity_mw + static_cast<double>(k) * s.unit_capacity_mw,
                         a.probability * pmf[k]});
    std::sort(raw.begin(), raw.end(),
              [](const auto& x, const auto& y) { return x.capacity_mw < y.capacity_mw; });
    atoms.clear();
    for (const auto& a : raw) {
      if (!atoms.empty() && a.capacity_mw - atoms.back().capacity_mw <= kMergeTolerance)
        atoms.back().probability += a.probability;
      else
        atoms.push_back(a);
    }
  }
  return atoms;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

ExactDistribution::ExactDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  std::sort(atoms_.begin(), atoms_.end(),
            [](const Atom& a, const Atom& b) { return a.capacity_mw < b.capacity_mw; });
}

double ExactDistribution::total_mass() const noexcept {
  double sum = 0.0;
  for (const Atom& a : atoms_) sum += a.probability;
  return sum;
}

double ExactDistribution::cdf(double x) const noexcept {
  if (atoms_.empty()) return 0.0;
  // The whole support lies at or below x.
  if (x >= atoms_.back().capacity_mw) return 1.0;
  double sum = 0.0;
  for (const Atom& a : atoms_) {
    if (a.capacity_mw > x) break;
    sum += a.probability;
  }
  return sum;
}

double ExactDistribution::mass_at(double x) const noexcept {
  for (const Atom& a : atoms_)
    if (std::abs(a.capacity_mw - x) <= kMergeTolerance) return a.probability;
  return 0.0;
}

ExactDistribution exact_capacity_distribution(const SystemModel& model, OracleOptions options) {
  const std::size_t states = model.discrete_state_count();
  if (states > options.state_limit)
    throw CapacityLimitError("model has " + std::to_string(states) +
                             " discrete states, above the oracle limit of " +
                             std::to_string(options.state_limit));
  if (model.integer_capacities() && model.installed_capacity() <= kDenseLimitMw)
    return ExactDistribution(convolve_dense(model));
  return ExactDistribution(convolve_sparse(model));
}

double exact_risk(const ExactDistribution& copt, const SystemModel& model, double load_mw) {
  const auto& u = model.uncertainty();
  if ((u.load && u.load->truncate_at_zero) || (u.wind && u.wind->truncate_at_zero))
    throw ContractError("exact oracle supports untruncated Gaussian components only");

  // S = C - X_L + X_W <= t  <=>  C <= t + X_L - X_W.
  double shift = risk_threshold(model, load_mw);
  double variance = 0.0;
  if (u.load) {
    shift += u.load->forecast_mw;
    variance += u.load->sigma_mw * u.load->sigma_mw;
  }
  if (u.wind) {
    shift -= u.wind->forecast_mw;
    variance += u.wind->sigma_mw * u.wind->sigma_mw;
  }

  if (variance == 0.0) return std::min(1.0, copt.cdf(shift));

  const double sd = std::sqrt(variance);
  double risk = 0.0;
  for (const auto& a : copt.atoms()) risk += a.probability * normal_cdf((shift - a.capacity_mw) / sd);
  return std::min(1.0, risk);
}

double exact_risk(const SystemModel& model, double load_mw, OracleOptions options) {
  return exact_risk(exact_capacity_distribution(model, options), model, load_mw);
}

void write_copt_csv(std::ostream& out, const ExactDistribution& copt) {
  out << "capacity_mw,probability,cumulative_probability\n";
  double cumulative = 0.0;
  for (const auto& a : copt.atoms()) {
    cumulative += a.probability;
    out << to_shortest(a.capacity_mw) << ',' << to_shortest(a.probability) << ','
        << to_shortest(cumulative) << '\n';
  }
}

}  // namespace gsrisk
