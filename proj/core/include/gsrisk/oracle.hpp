#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "gsrisk/model.hpp"

namespace gsrisk {

/// Exact law of total available capacity (a capacity outage probability
/// table). Atoms are sorted by ascending capacity and have positive mass.
class ExactDistribution {
 public:
  struct Atom {
    double capacity_mw;
    double probability;
  };

  ExactDistribution() = default;
  explicit ExactDistribution(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  double total_mass() const noexcept;

  /// P(C <= x), inclusive.
  double cdf(double x) const noexcept;
  /// P(C == x), zero when x is not an atom.
  double mass_at(double x) const noexcept;

 private:
  std::vector<Atom> atoms_;
};

struct OracleOptions {
  /// Upper bound on prod (N^g + 1); guards against accidental huge models.
  std::uint64_t state_limit = 10'000'000;
};

/// Station-by-station convolution of the binomial capacity laws. Only the
/// discrete part of the model is used. Throws CapacityLimitError.
ExactDistribution exact_capacity_distribution(const SystemModel& model, OracleOptions options = {});

/// Exact P(S(X) <= threshold) for `load`. Without uncertainty this is the
/// inclusive COPT tail. With Gaussian load and/or wind it is
/// sum_c P(c) Phi((mu_L - mu_W + t - c) / sqrt(sigma_L^2 + sigma_W^2)),
/// where mu_L is the model's load forecast when load uncertainty is on
/// (and `load_mw` is then ignored) and t = risk_threshold(model, load_mw).
double exact_risk(const SystemModel& model, double load_mw, OracleOptions options = {});
double exact_risk(const ExactDistribution& copt, const SystemModel& model, double load_mw);

/// CSV with columns capacity_mw,probability,cumulative_probability.
void write_copt_csv(std::ostream& out, const ExactDistribution& copt);

}  // namespace gsrisk
