#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gsrisk/model.hpp"

namespace gsrisk {

// Model files are key/value text with nested blocks:
//
//   # comment
//   lead_time_hours = 4
//   station { count = 5  capacity_mw = 12  outage_rate_per_hour = 3.4e-4 }
//   load { forecast_mw = 2850  sigma_mw = 2.85 }
//   wind { forecast_mw = 155  sigma_mw = 15.5  truncate_at_zero = false }
//
// `station` repeats and keeps file order. `load` and `wind` are optional.

/// Throws ParseError (with line and field) on schema violations and
/// ValidationError when the values break a model invariant.
SystemModel parse_model(std::string_view text);
SystemModel load_model(const std::filesystem::path& path);

/// Canonical text form; parse_model(serialize_model(m)) == m bit for bit.
std::string serialize_model(const SystemModel& model);

}  // namespace gsrisk
