#include "gsrisk/runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "gsrisk/cmcs.hpp"
#include "gsrisk/config_io.hpp"
#include "gsrisk/errors.hpp"
#include "gsrisk/oracle.hpp"
#include "gsrisk/parallel.hpp"
#include "gsrisk/splitting.hpp"

namespace gsrisk {
namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::string_view what) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
    throw ValidationError(std::string(what) + ": '" + std::string(text) + "' is not a number");
  return v;
}

std::string join_levels(const std::vector<double>& levels) {
  std::string s;
  for (std::size_t i = 0; i < levels.size(); ++i) s += (i ? ";" : "") + num(levels[i]);
  return s;
}

std::string uncertainty_config(const RunManifest& m) {
  std::string s;
  if (m.sigma_load) s += ";sigma_load=" + num(m.sigma_load->value) + (m.sigma_load->percent ? "%" : "");
  if (m.wind_forecast_mw) s += ";wind_forecast=" + num(*m.wind_forecast_mw);
  if (m.sigma_wind) s += ";sigma_wind=" + num(m.sigma_wind->value) + (m.sigma_wind->percent ? "%" : "");
  return s;
}

std::string cmcs_config(const RunManifest& m) {
  return "target_re=" + num(m.target_re) + ";max_evaluations=" + std::to_string(m.max_evaluations) +
         ";batch=" + std::to_string(m.batch_size) + uncertainty_config(m);
}

std::string fegs_config(const RunManifest& m) {
  return "samples=" + std::to_string(m.samples) + ";replications=" + std::to_string(m.replications) +
         ";rho=" + num(m.rho) + ";pilot=" + std::to_string(m.pilot_size) +
         ";pilot_in_evaluations=" + (m.pilot_in_evaluations ? "1" : "0") + uncertainty_config(m);
}

template <typename Fn>
double timed(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<RunRecord> run_point(const SystemModel& base, double load, const RunManifest& m,
                                 unsigned inner_threads, bool& failed) {
  const SystemModel model = model_for_point(base, load, m);
  const bool want_oracle = m.method == Method::oracle || m.method == Method::compare;
  const bool want_cmcs = m.method == Method::cmcs || m.method == Method::compare;
  const bool want_fegs = m.method == Method::fegs || m.method == Method::compare;

  RunRecord proto;
  proto.load_mw = load;
  proto.seed = m.seed;
  proto.model = m.model_path.string();

  std::vector<RunRecord> records;
  std::optional<double> exact;

  const auto guarded = [&](RunRecord& record, auto&& body) {
    try {
      body();
    } catch (const CapacityLimitError& e) {
      record.error = e.what();
    } catch (const Error& e) {
      record.error = e.what();
      failed = true;
    }
  };

  if (want_oracle) {
    RunRecord r = proto;
    r.method = "oracle";
    r.config = "exact" + uncertainty_config(m);
    r.relative_error = 0.0;
    guarded(r, [&] {
      r.wall_time_s = timed([&] { r.risk = exact_risk(model, load); });
      exact = r.risk;
      r.levels = {risk_threshold(model, load)};
    });
    if (!r.error.empty()) r.risk = std::nan("");
    records.push_back(std::move(r));
  }

  if (want_cmcs) {
    RunRecord r = proto;
    r.method = "cmcs";
    r.config = cmcs_config(m);
    guarded(r, [&] {
      CmcsConfig config{m.target_re, m.max_evaluations, m.batch_size};
      EstimateResult est;
      r.wall_time_s = timed([&] { est = estimate_cmcs(model, load, config, m.seed); });
      r.risk = est.risk_estimate;
      r.relative_error = est.relative_error;
      r.evaluations = est.evaluations;
      r.levels = est.levels;
    });
    records.push_back(std::move(r));
  }

  if (want_fegs) {
    RunRecord r = proto;
    r.method = "fegs";
    r.config = fegs_config(m);
    guarded(r, [&] {
      AdamConfig adam;
      adam.pilot_size = m.pilot_size;
      adam.quantile = m.rho;
      FegsConfig config;
      config.sample_size = m.samples;
      config.replications = m.replications;
      config.threads = inner_threads;
      EstimateResult est;
      r.wall_time_s = timed(
          [&] { est = estimate_fegs_adaptive(model, load, adam, config, m.seed, m.pilot_in_evaluations); });
      r.risk = est.risk_estimate;
      r.relative_error = est.relative_error;
      r.evaluations = est.evaluations;
      r.pilot_evaluations = est.pilot_evaluations;
      r.levels = est.levels;
    });
    records.push_back(std::move(r));
  }

  if (m.method == Method::compare && exact) {
    for (RunRecord& r : records) {
      r.exact = exact;
      if (!r.error.empty()) continue;
      if (*exact > 0.0)
        r.agreement = std::abs(r.risk - *exact) / *exact;
      else
        r.agreement = r.risk == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
  }
  return records;
}

}  // namespace

Method parse_method(std::string_view text) {
  if (text == "oracle") return Method::oracle;
  if (text == "cmcs") return Method::cmcs;
  if (text == "fegs") return Method::fegs;
  if (text == "compare") return Method::compare;
  throw ValidationError("unknown method '" + std::string(text) + "'");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::oracle: return "oracle";
    case Method::cmcs: return "cmcs";
    case Method::fegs: return "fegs";
    case Method::compare: return "compare";
  }
  return "?";
}

OutputFormat parse_format(std::string_view text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw ValidationError("unknown format '" + std::string(text) + "'");
}

SigmaSpec parse_sigma(std::string_view text) {
  SigmaSpec spec;
  if (!text.empty() && text.back() == '%') {
    spec.percent = true;
    text.remove_suffix(1);
  }
  spec.value = parse_double(text, "sigma");
  if (spec.value < 0.0) throw ValidationError("sigma must be >= 0");
  return spec;
}

std::vector<double> parse_load_list(std::string_view text) {
  std::vector<double> loads;
  while (!text.empty()) {
    const auto comma = text.find(',');
    loads.push_back(parse_double(text.substr(0, comma), "load"));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (loads.empty()) throw ValidationError("load grid is empty");
  return loads;
}

void RunManifest::validate() const {
  if (loads.empty()) throw ValidationError("load grid is empty");
  if (sigma_wind && !wind_forecast_mw) throw ValidationError("--sigma-wind requires --wind-forecast");
  if (method == Method::cmcs || method == Method::compare)
    CmcsConfig{target_re, max_evaluations, batch_size}.validate();
  if (method == Method::fegs || method == Method::compare) {
    AdamConfig adam;
    adam.pilot_size = pilot_size;
    adam.quantile = rho;
    adam.validate();
    FegsConfig fegs;
    fegs.sample_size = samples;
    fegs.replications = replications;
    fegs.validate();
  }
}

SystemModel model_for_point(const SystemModel& base, double load_mw, const RunManifest& manifest) {
  UncertaintyModel u = base.uncertainty();
  if (u.load) u.load->forecast_mw = load_mw;
  if (manifest.sigma_load) {
    if (!u.load) u.load = GaussianComponent{};
    u.load->forecast_mw = load_mw;
    u.load->sigma_mw = manifest.sigma_load->resolve(load_mw);
  }
  if (manifest.wind_forecast_mw) {
    if (!u.wind) u.wind = GaussianComponent{};
    u.wind->forecast_mw = *manifest.wind_forecast_mw;
  }
  if (manifest.sigma_wind && u.wind) u.wind->sigma_mw = manifest.sigma_wind->resolve(u.wind->forecast_mw);
  return SystemModel(base.stations(), base.lead_time_hours(), u);
}

std::vector<RunRecord> run_points(const SystemModel& base, const RunManifest& manifest, bool* failed) {
  manifest.validate();
  const std::size_t points = manifest.loads.size();
  const unsigned outer = worker_count(manifest.threads, points);
  const unsigned inner = outer > 1 ? 1u : manifest.threads;

  std::vector<std::vector<RunRecord>> per_point(points);
  std::vector<char> point_failed(points, 0);
  parallel_for(points, outer, [&](std::size_t i) {
    bool f = false;
    per_point[i] = run_point(base, manifest.loads[i], manifest, inner, f);
    point_failed[i] = f;
  });

  std::vector<RunRecord> records;
  for (auto& rows : per_point)
    for (auto& r : rows) records.push_back(std::move(r));
  if (failed) *failed = std::find(point_failed.begin(), point_failed.end(), 1) != point_failed.end();
  return records;
}

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records, bool include_timing) {
  out << "load,method,risk,relative_error,evaluations,pilot_evaluations";
  if (include_timing) out << ",wall_time";
  out << ",seed,levels,exact,agreement,model,config,error\n";
  for (const RunRecord& r : records) {
    out << num(r.load_mw) << ',' << r.method << ',' << num(r.risk) << ',' << num(r.relative_error) << ','
        << r.evaluations << ',' << r.pilot_evaluations;
    if (include_timing) out << ',' << num(r.wall_time_s);
    out << ',' << r.seed << ',' << join_levels(r.levels) << ',' << (r.exact ? num(*r.exact) : "") << ','
        << (r.agreement ? num(*r.agreement) : "") << ',' << r.model << ',' << r.config << ','
        << '"' << r.error << '"' << '\n';
  }
}

void write_records_json(std::ostream& out, const std::vector<RunRecord>& records, bool include_timing) {
  nlohmann::json rows = nlohmann::json::array();
  for (const RunRecord& r : records) {
    nlohmann::json row = {
        {"load", r.load_mw},
        {"method", r.method},
        {"risk", r.risk},
        {"relative_error", std::isnan(r.relative_error) ? nlohmann::json(nullptr) : nlohmann::json(r.relative_error)},
        {"evaluations", r.evaluations},
        {"pilot_evaluations", r.pilot_evaluations},
        {"seed", r.seed},
        {"levels", r.levels},
        {"model", r.model},
        {"config", r.config},
    };
    if (include_timing) row["wall_time"] = r.wall_time_s;
    row["exact"] = r.exact ? nlohmann::json(*r.exact) : nlohmann::json(nullptr);
    row["agreement"] = r.agreement ? nlohmann::json(*r.agreement) : nlohmann::json(nullptr);
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(std::move(row));
  }
  out << rows.dump(2) << '\n';
}

int run(const RunManifest& manifest, std::ostream& diagnostics) {
  bool failed = false;
  std::vector<RunRecord> records;
  try {
    const SystemModel base = load_model(manifest.model_path);
    records = run_points(base, manifest, &failed);
  } catch (const Error& e) {
    diagnostics << "error: " << e.what() << '\n';
    return 2;
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (manifest.out) {
    file.open(*manifest.out);
    if (!file) {
      diagnostics << "error: cannot write " << manifest.out->string() << '\n';
      return 2;
    }
    out = &file;
  }
  if (manifest.format == OutputFormat::csv)
    write_records_csv(*out, records);
  else
    write_records_json(*out, records);

  for (const RunRecord& r : records)
    if (!r.error.empty()) diagnostics << "load " << r.load_mw << " (" << r.method << "): " << r.error << '\n';
  return failed ? 2 : 0;
}

}  // namespace gsrisk
