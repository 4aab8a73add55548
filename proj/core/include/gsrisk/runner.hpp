#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsrisk/model.hpp"

namespace gsrisk {

enum class Method { oracle, cmcs, fegs, compare };
enum class OutputFormat { csv, json };

Method parse_method(std::string_view text);
std::string_view to_string(Method method);
OutputFormat parse_format(std::string_view text);

/// A standard deviation given in MW or as a percentage of the forecast.
struct SigmaSpec {
  double value = 0.0;
  bool percent = false;

  double resolve(double forecast_mw) const { return percent ? value / 100.0 * forecast_mw : value; }
};

/// "25" -> 25 MW, "2.5%" -> 2.5 percent. Throws ValidationError.
SigmaSpec parse_sigma(std::string_view text);

/// Comma-separated megawatt list. Throws ValidationError.
std::vector<double> parse_load_list(std::string_view text);

struct RunManifest {
  std::filesystem::path model_path;
  Method method = Method::compare;
  std::vector<double> loads;

  std::optional<SigmaSpec> sigma_load;
  std::optional<double> wind_forecast_mw;
  std::optional<SigmaSpec> sigma_wind;

  std::uint64_t seed = 1;
  std::size_t samples = 50'000;
  std::size_t replications = 10;
  std::size_t pilot_size = 10'000;
  double rho = 0.1;
  bool pilot_in_evaluations = true;

  double target_re = 0.10;
  std::uint64_t max_evaluations = 5'000'000;
  std::uint64_t batch_size = 1'000;

  std::optional<std::filesystem::path> out;
  OutputFormat format = OutputFormat::csv;
  unsigned threads = 0;

  void validate() const;
};

/// One output row: a (load, method) pair.
struct RunRecord {
  double load_mw = 0.0;
  std::string method;
  double risk = 0.0;
  double relative_error = 0.0;  // NaN when undefined
  std::uint64_t evaluations = 0;
  std::uint64_t pilot_evaluations = 0;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> levels;
  std::optional<double> exact;
  /// |estimate - exact| / exact, compare runs only.
  std::optional<double> agreement;
  std::string model;
  /// Everything besides the seed needed to reproduce the row.
  std::string config;
  std::string error;
};

/// The base model with the manifest's uncertainty overrides applied for one
/// grid point. A load component's forecast is always the grid load; percent
/// sigmas resolve against the respective forecast.
SystemModel model_for_point(const SystemModel& base, double load_mw, const RunManifest& manifest);

/// Runs every grid point (in parallel) and returns records in grid order.
/// Capacity-limit failures are recorded per point; other library errors are
/// recorded and flagged through `failed`.
std::vector<RunRecord> run_points(const SystemModel& base, const RunManifest& manifest, bool* failed = nullptr);

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records, bool include_timing = true);
void write_records_json(std::ostream& out, const std::vector<RunRecord>& records, bool include_timing = true);

/// Loads the model, runs the manifest and writes the records. Returns the
/// process exit status: 0 on success, 2 if any point failed.
int run(const RunManifest& manifest, std::ostream& diagnostics);

}  // namespace gsrisk
