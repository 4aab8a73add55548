#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsrisk/cmcs.hpp"
#include "gsrisk/estimate.hpp"
#include "gsrisk/model.hpp"
#include "gsrisk/splitting.hpp"

namespace gsrisk {

enum class StudyId { table1, table2, table3 };

StudyId parse_study(std::string_view text);
std::string_view to_string(StudyId id);

struct StudyTolerances {
  /// Estimates must lie within this many reported standard errors.
  double sigma_multiplier = 3.0;
  double max_relative_error = 0.10;
  /// Work-normalized CMCS/FEGS cost ratio required on rare points.
  double min_efficiency_ratio = 10.0;
  /// Points at or below this exact risk are "rare" for the efficiency check.
  double rare_risk_cutoff = 1e-4;
};

struct StudySpec {
  StudyId id = StudyId::table1;
  /// Load grid (table1), sigma grid in percent (table2) or wind forecasts
  /// in MW (table3).
  std::vector<double> grid;
  double load_forecast_mw = 2850.0;
  double load_sigma_percent = 0.1;
  double wind_sigma_fraction = 0.10;
  /// Unit size removed when the wind farm is committed.
  double decommitted_unit_mw = 155.0;

  std::uint64_t seed = 20190501;
  /// Efficiency measurement on rare points (table1): this many independent
  /// level pilots, each followed by `efficiency_replications` FEGS
  /// replications. Averaging the work-normalized cost over pilots removes
  /// the dependence on one particular level schedule. 0 pilots disables the
  /// measurement and the efficiency check.
  std::size_t efficiency_pilots = 8;
  std::size_t efficiency_replications = 50;
  FegsConfig fegs;
  AdamConfig adam;
  CmcsConfig cmcs;
  StudyTolerances tolerances;
};

/// Desk-scale defaults for each study (N = 50,000, 10 replications,
/// CMCS at 10% RE capped at 5,000,000 evaluations).
StudySpec default_study(StudyId id);

/// One row of a study table.
struct StudyPoint {
  std::string label;
  double parameter = 0.0;
  double exact = 0.0;
  EstimateResult fegs;
  std::optional<EstimateResult> cmcs;
  /// Independent adaptive FEGS runs used only to measure efficiency.
  std::vector<EstimateResult> efficiency_runs;
  /// Mean work-normalized FEGS cost at the target RE (table1 only).
  std::optional<double> fegs_cost;
  /// Analytic CMCS cost at the target RE, (1 - R) / (R RE^2), over fegs_cost.
  std::optional<double> efficiency_ratio;
  /// Measured CMCS cost, normalized to the target RE, over fegs_cost.
  std::optional<double> measured_efficiency_ratio;
};

struct StudyAssertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct StudyReport {
  StudyId id = StudyId::table1;
  std::string title;
  std::vector<StudyPoint> points;
  /// Reference points outside the main grid (table3's conventional case).
  std::vector<StudyPoint> baselines;
  std::vector<StudyAssertion> assertions;
  std::vector<std::string> notes;

  bool passed() const;
  std::string markdown() const;
  std::string csv() const;
};

/// Conventional system with one unit of `unit_mw` removed and a Gaussian
/// wind source added, plus Gaussian load.
SystemModel wind_committed_model(const SystemModel& conventional, double unit_mw, double wind_forecast_mw,
                                 double wind_sigma_mw, double load_forecast_mw, double load_sigma_mw);

/// Conventional system with Gaussian load only.
SystemModel load_uncertain_model(const SystemModel& conventional, double load_forecast_mw, double load_sigma_mw);

/// Cost of reaching `target_re` given a run that spent `evaluations` and
/// achieved `achieved_re`, scaling the variance-bearing part by
/// (achieved / target)^2. `fixed_cost` is added unscaled.
double normalized_cost(double evaluations, double achieved_re, double target_re, double fixed_cost = 0.0);

StudyReport run_study(const StudySpec& spec, const SystemModel& rts);

/// Writes <id>.md and <id>.csv into `directory`.
void write_study_report(const StudyReport& report, const std::filesystem::path& directory);

}  // namespace gsrisk
